"""Request and response schemas for the computation service.

Rationals travel as exact "p/q" strings in both directions; floats appear
only where the quantity itself is a float (residuals, singular values,
the surd deformation parameter).
"""

from __future__ import annotations

from fractions import Fraction

from pydantic import BaseModel, Field, field_validator, model_validator

from ..kt_geometry import AcsParams, MetricSpec


def parse_rational(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational 'p/q': {text!r}") from exc


class ParamsRequest(BaseModel):
    """Shared (a, d, metric) block of sector-based requests."""

    a: str = "0"
    d: str
    metric: str = "standard"
    r: str = "1"

    @field_validator("a", "d", "r")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return str(value).strip()

    @field_validator("metric")
    @classmethod
    def _metric(cls, value: str) -> str:
        if value not in ("standard", "rho"):
            raise ValueError("metric must be 'standard' or 'rho'")
        return value

    def acs_params(self) -> AcsParams:
        return AcsParams(parse_rational(self.a), parse_rational(self.d))

    def metric_spec(self) -> MetricSpec:
        if self.metric == "standard":
            return MetricSpec.standard()
        return MetricSpec.rho(parse_rational(self.r))


class DiamondRequest(ParamsRequest):
    pass


class LatticeCountRequest(BaseModel):
    d: str

    @field_validator("d")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return str(value).strip()


class OdeCheckRequest(ParamsRequest):
    k: int = 0
    m: int = 0
    n: int
    tol: float | None = None

    @field_validator("n")
    @classmethod
    def _nonzero(cls, value: int) -> int:
        if value == 0:
            raise ValueError("n = 0 sectors are trigonometric; use lattice-count")
        return value


class SchinzelRequest(BaseModel):
    target: int


class SurdRequest(BaseModel):
    n: int
    u: int
    a: str = "0"
    tol: float | None = None

    @field_validator("a")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return str(value).strip()


class KsDemoRequest(BaseModel):
    K: int
    a: str = "0"
    r: str = "1"

    @field_validator("a", "r")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return str(value).strip()


class VerifyRequest(BaseModel):
    """Sector sweep over (a, d) or randomized pencil sweep, per `mode`."""

    mode: str = "sectors"
    a: str = "0"
    d: str | None = None
    metric: str = "standard"
    r: str = "1"
    nmax: int = Field(default=2, ge=1, le=8)
    k_cutoff: int = Field(default=1, ge=0, le=8)
    count: int = Field(default=20, ge=1, le=500)
    seed: int = 0
    tol: float | None = None

    @field_validator("mode")
    @classmethod
    def _mode(cls, value: str) -> str:
        if value not in ("sectors", "random"):
            raise ValueError("mode must be 'sectors' or 'random'")
        return value

    @field_validator("a", "r")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return str(value).strip()

    @field_validator("metric")
    @classmethod
    def _metric(cls, value: str) -> str:
        if value not in ("standard", "rho"):
            raise ValueError("metric must be 'standard' or 'rho'")
        return value

    @model_validator(mode="after")
    def _sectors_need_d(self):
        if self.mode == "sectors":
            if self.d is None:
                raise ValueError("sector mode needs d")
            parse_rational(self.d)
        return self

    def acs_params(self) -> AcsParams:
        return AcsParams(parse_rational(self.a), parse_rational(self.d))

    def metric_spec(self) -> MetricSpec:
        if self.metric == "standard":
            return MetricSpec.standard()
        return MetricSpec.rho(parse_rational(self.r))


# --- responses ----------------------------------------------------------------------


class HealthResponse(BaseModel):
    status: str
    package: str
    version: str


class DiamondResponse(BaseModel):
    params: dict[str, str]
    metric: str
    h: list[list[int]]
    provenance: list[list[str]]


class LatticeCountResponse(BaseModel):
    d: str
    points: list[list[int]]
    count: int
    formula_status: str
    formula_count: int | None


class CriterionReport(BaseModel):
    verdict: str
    kindex: int | None


class MatchingReport(BaseModel):
    verdict: str
    defect: float
    floor: float
    X: float


class KernelReport(BaseModel):
    method: str
    dim: int
    diagnostic: float  # sigma_min for "fd", ratio distance for "ratio"


class OdeCheckResponse(BaseModel):
    sector: dict[str, int]
    params: dict[str, str]
    metric: str
    criterion: CriterionReport
    matching: MatchingReport
    kernel: KernelReport
    agree: bool


class SchinzelResponse(BaseModel):
    target: int
    status: str
    d: str | None
    realized_count: int | None


class SurdResponse(BaseModel):
    n: int
    u: int
    d: float
    disc: int
    w_int: int
    w_coef: int
    quartic_residual: float
    h01: int


class KsDemoResponse(BaseModel):
    K: int
    d: str
    standard: int
    rho: int


class VerifyRowModel(BaseModel):
    sector: str
    criterion: str
    oracle_dim: int
    sigma_min: float
    agree: bool
    method: str


class VerifyResponse(BaseModel):
    mode: str
    rows: list[VerifyRowModel]
    all_agree: bool

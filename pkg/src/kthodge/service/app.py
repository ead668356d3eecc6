"""FastAPI application wrapping the computation pipeline.

Domain errors (bad rationals, unsupported metrics, resource limits) map to
400; a failed cross-check between independent routes maps to 409 so that
clients can distinguish "you asked wrong" from "the answers disagree".
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..exact_arith import format_rational
from ..hodge_engine import (
    OracleDisagreement,
    compute_h01_surd,
    diamond_report,
    hodge_diamond,
    ks_demo,
    solve_deq,
)
from ..kt_geometry import HeisenbergSector, sector_system
from ..lattice_nt import (
    ResourceLimit,
    count_by_formula,
    lattice_points_on_circle,
    schinzel_d_for_target,
)
from ..ode_core import ORACLE_DEFECT_TOL, l2_solvability, matching_oracle
from ..spectral_oracle import FD_DEFAULT_TOL, routed_kernel_dim, verify_random, verify_sectors
from .models import (
    CriterionReport,
    DiamondRequest,
    DiamondResponse,
    HealthResponse,
    KernelReport,
    KsDemoRequest,
    KsDemoResponse,
    LatticeCountRequest,
    LatticeCountResponse,
    MatchingReport,
    OdeCheckRequest,
    OdeCheckResponse,
    SchinzelRequest,
    SchinzelResponse,
    SurdRequest,
    SurdResponse,
    VerifyRequest,
    VerifyResponse,
    VerifyRowModel,
    parse_rational,
)


# circle enumeration is O(|d|); keep requests inside an interactive budget
MAX_CIRCLE_D = 10**6
MAX_KS_K = 19  # d grows like 5^{(K-1)/2}


def _check_enumerable(d) -> None:
    if abs(d) > MAX_CIRCLE_D:
        raise ValueError(f"|d| > {MAX_CIRCLE_D} exceeds the enumeration budget")


def create_app() -> FastAPI:
    app = FastAPI(title="kthodge", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.exception_handler(ValueError)
    async def _domain_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ArithmeticError)
    async def _arithmetic_error(request: Request, exc: ArithmeticError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ResourceLimit)
    async def _resource_error(request: Request, exc: ResourceLimit):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(OracleDisagreement)
    async def _oracle_error(request: Request, exc: OracleDisagreement):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", package="kthodge", version=__version__)

    @app.post("/diamond", response_model=DiamondResponse)
    def diamond(req: DiamondRequest) -> DiamondResponse:
        p = req.acs_params()
        _check_enumerable(p.d)
        metric = req.metric_spec()
        report = diamond_report(p, metric, hodge_diamond(p, metric))
        return DiamondResponse(**report)

    @app.post("/lattice-count", response_model=LatticeCountResponse)
    def lattice_count(req: LatticeCountRequest) -> LatticeCountResponse:
        d = parse_rational(req.d)
        _check_enumerable(d)
        circle = lattice_points_on_circle(d)
        formula = count_by_formula(d)
        if formula.status == "count" and formula.count != circle.count:
            raise OracleDisagreement(
                f"closed form gives {formula.count} but enumeration finds {circle.count} for d = {req.d}"
            )
        return LatticeCountResponse(
            d=format_rational(d),
            points=[[l, m] for l, m in circle.points],
            count=circle.count,
            formula_status=formula.status,
            formula_count=formula.count,
        )

    @app.post("/ode-check", response_model=OdeCheckResponse)
    def ode_check(req: OdeCheckRequest) -> OdeCheckResponse:
        p = req.acs_params()
        metric = req.metric_spec()
        sysx = sector_system(p, metric, HeisenbergSector(k=req.k, m=req.m, n=req.n))
        solv = l2_solvability(sysx)
        oracle = matching_oracle(sysx, tol=req.tol or ORACLE_DEFECT_TOL)
        dim, diagnostic, method = routed_kernel_dim(sysx, tol=req.tol or FD_DEFAULT_TOL)
        expected = 1 if solv.is_solvable else 0
        agree = dim == expected and (
            oracle.verdict == "inconclusive" or oracle.l2_exists == solv.is_solvable
        )
        if not agree:
            raise OracleDisagreement(
                f"sector (k={req.k}, m={req.m}, n={req.n}): criterion {solv.verdict}, "
                f"matching {oracle.verdict} (defect {oracle.defect:.3e}), {method} kernel dim {dim}"
            )
        return OdeCheckResponse(
            sector={"k": req.k, "m": req.m, "n": req.n},
            params={"a": format_rational(p.a), "d": format_rational(p.d)},
            metric=metric.label(),
            criterion=CriterionReport(verdict=solv.verdict, kindex=solv.kindex),
            matching=MatchingReport(
                verdict=oracle.verdict, defect=oracle.defect, floor=oracle.floor, X=oracle.X
            ),
            kernel=KernelReport(method=method, dim=dim, diagnostic=diagnostic),
            agree=agree,
        )

    @app.post("/schinzel", response_model=SchinzelResponse)
    def schinzel(req: SchinzelRequest) -> SchinzelResponse:
        result = schinzel_d_for_target(req.target)
        realized = None
        if result.status == "reachable":
            realized = lattice_points_on_circle(result.d).count
            if realized != req.target:
                raise OracleDisagreement(
                    f"constructed d = {format_rational(result.d)} carries {realized} points, "
                    f"target was {req.target}"
                )
        return SchinzelResponse(
            target=req.target,
            status=result.status,
            d=None if result.d is None else format_rational(result.d),
            realized_count=realized,
        )

    @app.post("/surd", response_model=SurdResponse)
    def surd(req: SurdRequest) -> SurdResponse:
        case = solve_deq(req.n, req.u)
        h01 = compute_h01_surd(case, a=parse_rational(req.a), tol=req.tol or ORACLE_DEFECT_TOL)
        return SurdResponse(**case.to_json(), h01=h01)

    @app.post("/ks-demo", response_model=KsDemoResponse)
    def ks_demo_endpoint(req: KsDemoRequest) -> KsDemoResponse:
        if req.K > MAX_KS_K:
            raise ValueError(f"K > {MAX_KS_K} exceeds the enumeration budget")
        out = ks_demo(req.K, a=parse_rational(req.a), r=parse_rational(req.r))
        return KsDemoResponse(
            K=out["K"], d=format_rational(out["d"]), standard=out["standard"], rho=out["rho"]
        )

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        tol = req.tol or FD_DEFAULT_TOL
        if req.mode == "sectors":
            rows = verify_sectors(
                req.acs_params(), req.metric_spec(), nmax=req.nmax, k_cutoff=req.k_cutoff, tol=tol
            )
        else:
            rows = verify_random(count=req.count, seed=req.seed, tol=tol)
        models = [VerifyRowModel(**row.to_json()) for row in rows]
        return VerifyResponse(mode=req.mode, rows=models, all_agree=all(row.agree for row in rows))

    return app


app = create_app()

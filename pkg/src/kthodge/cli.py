"""Command-line front end for the Hodge-number computations.

Thin client over the HTTP service: by default the FastAPI app runs
in-process, `--server URL` talks to a running instance instead.  Exit
codes: 0 success, 2 input error, 3 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_DISAGREE = 3


class ServiceClient:
    """POST/GET against the in-process app or a remote server."""

    def __init__(self, server: str | None = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # test-client import deprecation noise
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)
        else:
            import httpx

            self._client = httpx.Client(base_url=server)

    def get(self, path: str):
        response = self._client.get(path)
        return response.status_code, response.json()

    def post(self, path: str, payload: dict):
        response = self._client.post(path, json=payload)
        return response.status_code, response.json()


def _add_output_flags(sp):
    sp.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    sp.add_argument("--server", metavar="URL", help="use a running service instead of in-process")


def _add_acs_flags(sp):
    sp.add_argument("--a", default="0", metavar="p/q", help="structure parameter a (default 0)")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--d", metavar="p/q", help="structure parameter d, with b = 8*pi*d")
    group.add_argument("--b-over-8pi", dest="d", metavar="p/q", help="alias for --d")
    sp.add_argument("--metric", choices=["standard", "rho"], default="standard")
    sp.add_argument("--r", default="1", metavar="p/q", help="deformation parameter (rho metric)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kthodge",
        description="Hodge numbers and harmonic-form bases of the twisted 4-manifold.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("diamond", help="full Hodge diamond for (a, d)")
    _add_acs_flags(sp)
    _add_output_flags(sp)

    sp = sub.add_parser("lattice-count", help="lattice points on the circle attached to d")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--d", metavar="p/q")
    group.add_argument("--b-over-8pi", dest="d", metavar="p/q", help="alias for --d")
    _add_output_flags(sp)

    sp = sub.add_parser("ode-check", help="three-route solvability check of one sector")
    _add_acs_flags(sp)
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--n", type=int, required=True, help="nonzero sector index")
    sp.add_argument("--tol", type=float, help="oracle tolerance override")
    _add_output_flags(sp)

    sp = sub.add_parser("schinzel", help="rational d whose circle carries exactly n points")
    sp.add_argument("--n", type=int, required=True, metavar="COUNT")
    _add_output_flags(sp)

    sp = sub.add_parser("surd", help="irrational d from the quartic for (n, u), plus h^{0,1}")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--u", type=int, required=True)
    sp.add_argument("--a", default="0", metavar="p/q")
    sp.add_argument("--tol", type=float, help="oracle tolerance override")
    _add_output_flags(sp)

    sp = sub.add_parser("ks-demo", help="metric dependence: standard vs deformed count")
    sp.add_argument("--K", type=int, required=True, help="odd target for the standard count")
    sp.add_argument("--a", default="0", metavar="p/q")
    sp.add_argument("--r", default="1", metavar="p/q")
    _add_output_flags(sp)

    sp = sub.add_parser("verify", help="per-sector oracle agreement table")
    sp.add_argument("--a", default="0", metavar="p/q")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--d", metavar="p/q")
    group.add_argument("--b-over-8pi", dest="d", metavar="p/q", help="alias for --d")
    group.add_argument("--random", type=int, metavar="COUNT", help="randomized pencils instead of sectors")
    sp.add_argument("--metric", choices=["standard", "rho"], default="standard")
    sp.add_argument("--r", default="1", metavar="p/q")
    sp.add_argument("--nmax", type=int, default=2)
    sp.add_argument("--k-cutoff", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, help="oracle tolerance override")
    _add_output_flags(sp)

    return parser


# --- table renderers ------------------------------------------------------------


def _render_diamond(payload: dict) -> str:
    from .hodge_engine import HodgeDiamond, diamond_ascii

    h = tuple(tuple(row) for row in payload["h"])
    provenance = tuple(tuple(row) for row in payload["provenance"])
    diamond = HodgeDiamond(h, provenance)  # re-validates duality on the way in
    params = payload["params"]
    lines = [f"a = {params['a']}, d = {params['d']}, metric = {payload['metric']}"]
    lines.append(diamond_ascii(diamond))
    lines.append(f"h^(0,1) = {h[0][1]}, h^(1,1) = {h[1][1]}, h^(2,0) = {h[0][2]}")
    return "\n".join(lines)


def _render_lattice(payload: dict) -> str:
    lines = [f"d = {payload['d']}: {payload['count']} lattice points"]
    for l, m in payload["points"]:
        lines.append(f"  ({l}, {m})")
    if payload["formula_status"] == "count":
        lines.append(f"closed form: {payload['formula_count']} (agrees)")
    else:
        lines.append("closed form: unsupported denominator (enumeration only)")
    return "\n".join(lines)


def _render_ode_check(payload: dict) -> str:
    sector = payload["sector"]
    criterion = payload["criterion"]
    matching = payload["matching"]
    kernel = payload["kernel"]
    lines = [
        f"sector (k={sector['k']}, m={sector['m']}, n={sector['n']}), "
        f"a = {payload['params']['a']}, d = {payload['params']['d']}, metric = {payload['metric']}",
        f"criterion: {criterion['verdict']}"
        + (f" (kindex {criterion['kindex']})" if criterion["kindex"] is not None else ""),
        f"matching:  {matching['verdict']} (defect {matching['defect']:.3e}, floor {matching['floor']:.1e})",
        f"kernel:    dim {kernel['dim']} via {kernel['method']} (diagnostic {kernel['diagnostic']:.3e})",
        f"agree: {'yes' if payload['agree'] else 'no'}",
    ]
    return "\n".join(lines)


def _render_schinzel(payload: dict) -> str:
    if payload["status"] == "reachable":
        return (
            f"target {payload['target']}: d = {payload['d']} "
            f"({payload['realized_count']} points on its circle)"
        )
    return f"target {payload['target']}: unreachable (counts divisible by 8 never occur)"


def _render_surd(payload: dict) -> str:
    return "\n".join(
        [
            f"n = {payload['n']}, u = {payload['u']}",
            f"d = {payload['d']!r}",
            f"  where 8*pi*d^2 = {payload['w_int']} + {payload['w_coef']}*sqrt({payload['disc']})",
            f"quartic residual = {payload['quartic_residual']:.3e}",
            f"h^(0,1) = {payload['h01']}",
        ]
    )


def _render_ks_demo(payload: dict) -> str:
    return "\n".join(
        [
            f"K = {payload['K']}, d = {payload['d']}",
            f"  standard: {payload['standard']}",
            f"  rho:      {payload['rho']}",
        ]
    )


def _render_verify(payload: dict) -> str:
    header = ("sector", "criterion", "dim", "diagnostic", "method", "agree")
    rows = [
        (
            row["sector"],
            row["criterion"],
            str(row["oracle_dim"]),
            f"{row['sigma_min']:.3e}",
            row["method"],
            "yes" if row["agree"] else "NO",
        )
        for row in payload["rows"]
    ]
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(6)]
    lines = ["  ".join(header[i].ljust(widths[i]) for i in range(6)).rstrip()]
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(6)).rstrip())
    lines.append(f"all agree: {'yes' if payload['all_agree'] else 'NO'}")
    return "\n".join(lines)


# --- dispatch ---------------------------------------------------------------------


def _request_for(args: argparse.Namespace) -> tuple:
    if args.command == "diamond":
        return "/diamond", {"a": args.a, "d": args.d, "metric": args.metric, "r": args.r}
    if args.command == "lattice-count":
        return "/lattice-count", {"d": args.d}
    if args.command == "ode-check":
        payload = {
            "a": args.a,
            "d": args.d,
            "metric": args.metric,
            "r": args.r,
            "k": args.k,
            "m": args.m,
            "n": args.n,
        }
        if args.tol is not None:
            payload["tol"] = args.tol
        return "/ode-check", payload
    if args.command == "schinzel":
        return "/schinzel", {"target": args.n}
    if args.command == "surd":
        payload = {"n": args.n, "u": args.u, "a": args.a}
        if args.tol is not None:
            payload["tol"] = args.tol
        return "/surd", payload
    if args.command == "ks-demo":
        return "/ks-demo", {"K": args.K, "a": args.a, "r": args.r}
    if args.command == "verify":
        if args.random is not None:
            payload = {"mode": "random", "count": args.random, "seed": args.seed}
        else:
            payload = {
                "mode": "sectors",
                "a": args.a,
                "d": args.d,
                "metric": args.metric,
                "r": args.r,
                "nmax": args.nmax,
                "k_cutoff": args.k_cutoff,
            }
        if args.tol is not None:
            payload["tol"] = args.tol
        return "/verify", payload
    raise AssertionError(f"unhandled command {args.command}")


_RENDERERS = {
    "diamond": _render_diamond,
    "lattice-count": _render_lattice,
    "ode-check": _render_ode_check,
    "schinzel": _render_schinzel,
    "surd": _render_surd,
    "ks-demo": _render_ks_demo,
    "verify": _render_verify,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    client = ServiceClient(args.server)
    path, payload = _request_for(args)
    status, body = client.post(path, payload)

    if status in (400, 422):
        print(f"error: {body.get('detail', body)}", file=sys.stderr)
        return EXIT_INPUT
    if status == 409:
        print(f"oracle disagreement: {body.get('detail', body)}", file=sys.stderr)
        return EXIT_DISAGREE
    if status != 200:
        print(f"error: service returned {status}: {body}", file=sys.stderr)
        return EXIT_FAILURE

    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        print(_RENDERERS[args.command](body))
    if args.command == "verify" and not body["all_agree"]:
        return EXIT_DISAGREE
    return EXIT_OK


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())

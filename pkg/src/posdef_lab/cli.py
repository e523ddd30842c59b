"""Command-line entry point: ``posdef-lab <subcommand> ...``.

Exit status: 0 when every expectation is met, 1 when a scientific
expectation fails, 2 on usage or configuration errors.  Every file written
starts with a provenance header (tool version, the full run configuration
and the seed).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .kernels import Direction, DomainError, KernelParams, eval_f, eval_f_prime, eval_f_second, eval_g, eval_h
from .matrices import (
    Generator,
    PointConfig,
    Status,
    build_kernel_matrix,
    cnd_verdict,
    hadamard_power,
    psd_verdict,
)
from .polynomials import Verdict, verify_convexity, verify_logconvexity
from .probes import (
    Outcome,
    bernstein_probe,
    midpoint_logconvexity_check,
    factorization_check_r4,
    finite_diff_cm_probe,
    growth_obstruction_probe,
    logconvex_midpoint_probe,
    pick_probe,
    polya_certificate,
    quadrature_identity_check,
    widder_cm_probe,
)
from .records import dumps, provenance, write_csv
from .search import CampaignPlan, default_plan, load_records, replay, run_campaign

DEFAULT_SEED = 20140704
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("posdef_lab")


class UsageError(Exception):
    """Bad flags or configuration; maps to exit status 2."""


# ---------------------------------------------------------------------------
# argument helpers


def _kernel(text: str, direction: str = "F") -> KernelParams:
    try:
        return KernelParams.parse(text, direction)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid exponent {text!r}: {exc}") from exc


def _exact(text: str) -> Fraction:
    """An exact rational; decimals are refused rather than approximated."""
    text = text.strip()
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid rational {text!r}") from exc
    if "." in text or "e" in text.lower():
        raise UsageError(f"{text!r} is a decimal; give the exponent exactly as p/q (e.g. 3/2)")
    if frac <= 0:
        raise UsageError("exponent must be positive")
    return frac


def _number(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid number {text!r}") from exc


def _floats(text: str) -> list[float]:
    return [_number(tok) for tok in text.split(",") if tok.strip()]


def _grid(args, fallback: str | None = None) -> np.ndarray:
    if args.points:
        return np.asarray(_floats(args.points))
    if args.grid is None:
        if fallback is not None:
            return np.asarray(_floats(fallback))
        args.grid = (0.01, 100.0, 41)
    lo, hi, num = args.grid
    if not (0 < lo < hi) or num < 2:
        raise UsageError("--grid needs 0 < LO < HI and NUM >= 2")
    return np.geomspace(lo, hi, int(num))


def _run_config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if getattr(args, "out", None):
        path = Path(args.out)
        path.write_text(dumps({"provenance": provenance(_run_config(args), args.seed)}) + "\n"
                        + text + "\n", encoding="utf-8")
    print(text)


def _expect(actual: str, expected: str | None) -> int:
    if expected is None or actual == expected:
        return EXIT_OK
    logger.error("expected %s, observed %s", expected, actual)
    return EXIT_FAILED


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    params = _kernel(args.r)
    t = _grid(args, fallback="0,0.5,1,2,4")
    f = np.atleast_1d(eval_f(params, t))
    g = np.atleast_1d(eval_g(params, t))
    if params.r > 1:
        d1 = np.atleast_1d(eval_f_prime(params, t))
        d2 = np.atleast_1d(eval_f_second(params, t))
    else:
        d1 = d2 = [None] * len(t)
    rows = [[float(a), float(b), float(c), None if d is None else float(d), None if e is None else float(e)]
            for a, b, c, d, e in zip(t, f, g, d1, d2)]
    columns = ("t", "f", "g", "f_prime", "f_second")
    header = provenance(_run_config(args), args.seed)
    if args.out:
        write_csv(args.out, header, columns, rows)
    print(",".join(columns))
    for row in rows:
        print(",".join("" if v is None else repr(v) for v in row))
    return EXIT_OK


def cmd_poly_analyze(args) -> int:
    r = _exact(args.r)
    if r < 1:
        raise UsageError("poly-analyze needs r >= 1")
    payload = {"r": f"{r.numerator}/{r.denominator}"}
    if r > 1:
        payload["phi"] = verify_convexity(r).to_dict()
    psi = verify_logconvexity(r)
    payload["psi"] = psi.to_dict()
    if psi.poly is not None:
        payload["psi_at_zero"] = str(psi.poly(Fraction(0)))
    _emit(args, payload)
    return EXIT_OK


def _config_from_args(args) -> PointConfig:
    if args.coords:
        pts = json.loads(args.coords)
        return PointConfig.explicit(pts)
    return PointConfig.generate(Generator(args.generator), args.m, args.n, seed=args.seed, scale=args.scale)


def cmd_matrix_test(args) -> int:
    params = _kernel(args.r, args.direction)
    cfg = _config_from_args(args)
    mat = hadamard_power(build_kernel_matrix(cfg, params), args.alpha)
    verdict = psd_verdict(mat, args.tol) if params.direction is Direction.F else cnd_verdict(mat, args.tol)
    payload = {"kernel": params.to_dict(), "config": cfg.to_dict(), "alpha": args.alpha,
               "checksum": mat.checksum(), "verdict": verdict.to_dict()}
    _emit(args, payload)
    return _expect(verdict.status.value, args.expect)


def _probe_report(args):
    kind = args.kind
    if kind == "cm":
        params = _kernel(args.r)
        grid = _grid(args)
        evaluate = eval_h if args.function == "h" else eval_f
        fn = lambda s: evaluate(params, s)  # noqa: E731
        if args.widder:
            return widder_cm_probe(fn, grid)
        return finite_diff_cm_probe(fn, args.max_order, grid, name=f"cm_{args.function}")
    if kind == "bernstein":
        params = _kernel(args.r, "G")
        return bernstein_probe(lambda s: eval_g(params, np.sqrt(s)), _grid(args), max_order=args.max_order)
    if kind == "pick":
        return pick_probe(_number(args.p), _number(args.q))
    if kind == "logconvex":
        params = _kernel(args.r)
        if args.pairs is None:
            return midpoint_logconvexity_check(params.r, tol=args.tol)
        pairs = np.asarray(_floats(args.pairs)).reshape(-1, 2)
        return logconvex_midpoint_probe(lambda s: eval_h(params, s), pairs, args.tol)
    if kind == "polya":
        return polya_certificate(_kernel(args.r))
    if kind == "growth":
        return growth_obstruction_probe(_kernel(args.r, "G"), x_max=args.x_max)
    if kind == "quadrature":
        return quadrature_identity_check(_number(args.p), _number(args.q), nodes=args.nodes)
    if kind == "factor4":
        return factorization_check_r4()
    raise UsageError(f"unknown probe {kind!r}")


def cmd_probe(args) -> int:
    rep = _probe_report(args)
    _emit(args, rep.to_dict())
    return _expect(rep.verdict.value, args.expect)


# ---------------------------------------------------------------------------
# reproduction bundle


def _claim(cid, description, expected, run):
    try:
        observed, detail = run()
    except Exception as exc:  # any probe error marks the bundle failed
        observed, detail = "ERROR", repr(exc)
    status = "PASS" if observed == expected else "FAIL"
    return {"claim": cid, "description": description, "expected": expected,
            "observed": observed, "status": status, "detail": detail}


def _cnd_suite(r: float, seed: int):
    worst = math.inf
    rng = np.random.default_rng(seed)
    for n in (1, 3, 5):
        for k in (-2, 0, 2, 4):
            cfg = PointConfig.generate(Generator.RANDOM_GAUSSIAN, 20, n,
                                       seed=int(rng.integers(2**31)), scale=2.0**k)
            v = cnd_verdict(build_kernel_matrix(cfg, KernelParams(r, Direction.G)))
            if not v.certified:
                return v.status.value, f"n={n}, scale=2^{k}, min_eig={v.min_eigenvalue:.3e}"
            worst = min(worst, v.min_eigenvalue)
    return Status.CERTIFIED.value, f"12 configs, worst min_eig {worst:.3e}"


def _cnd_refute(r: float):
    params = KernelParams(r, Direction.G)
    for k in range(-4, 13):
        cfg = PointConfig.generate(Generator.GRID_LINE, 3, 1, scale=2.0**k)
        v = cnd_verdict(build_kernel_matrix(cfg, params))
        if v.violated:
            return v.status.value, f"3 points on a line, spacing 2^{k}, min_eig={v.min_eigenvalue:.3e}"
    return Status.CERTIFIED.value, "no violation found on the scale sweep"


def _probe(rep, detail_key=None):
    detail = rep.witness if rep.witness is not None else {"worst_margin": rep.worst_margin}
    return rep.verdict.value, detail


def reproduction_claims(tol: float = 0.0, seed: int = DEFAULT_SEED) -> dict:
    """Claim id -> (description, expected, thunk returning (observed, detail))."""
    claims = {
        "midpoint_r9": ("midpoint log-convexity of h fails at r=9, x=9/25, y=16/25", "FAIL",
                 lambda: _probe(midpoint_logconvexity_check(9, 9 / 25, 16 / 25, tol=tol))),
        "factor4": ("f at r=4 equals 1/((1+t)(1+t^2))", "PASS", lambda: _probe(factorization_check_r4())),
    }
    for r in (1, 2, 3):
        claims[f"cnd_r{r}"] = (f"g is cnd at r={r} (random clouds in R^1, R^3, R^5)", "CERTIFIED",
                               lambda r=r: _cnd_suite(r, seed))
    claims["cnd_refute_r3.5"] = ("g is not cnd at r=3.5", "VIOLATED", lambda: _cnd_refute(3.5))
    claims["growth_r3.5"] = ("g grows faster than quadratically at r=3.5", "PASS",
                             lambda: _probe(growth_obstruction_probe(3.5)))
    for r in range(1, 10):
        claims[f"polya_r{r}"] = (f"Polya hypotheses hold for f at r={r}", "PASS",
                                 lambda r=r: _probe(polya_certificate(r)))
    picks = [(0.5, 0.5)] + [(r / 2, 0.5) for r in (0.25, 0.5, 1)] + [(0.5, r / 2) for r in (1, 2, 3)]
    for p, q in picks:
        claims[f"pick_{p:g}_{q:g}"] = (f"(1-z^{q:g})/(1-z^{p:g}) maps the upper half-plane into itself",
                                       "PASS", lambda p=p, q=q: _probe(pick_probe(p, q)))
    claims["pick_0.5_3"] = ("(1-z^3)/(1-z^0.5) leaves the upper half-plane", "FAIL",
                            lambda: _probe(pick_probe(0.5, 3)))
    for p, q in ((0.5, 1), (0.5, 1.5), (0.25, 1)):
        claims[f"quadrature_{p:g}_{q:g}"] = (f"integral identity for p={p:g}, q={q:g}", "PASS",
                                            lambda p=p, q=q: _probe(quadrature_identity_check(p, q)))
    for r in ("3/2", "2", "3", "9"):
        claims[f"convex_{r}"] = (f"phi has no sign change on (0,1)U(1,inf), r={r}", Verdict.CONVEX.value,
                                 lambda r=r: _theorem(verify_convexity(Fraction(r))))
    for r, exp in (("1", Verdict.LOG_CONVEX), ("3/2", Verdict.LOG_CONVEX), ("2", Verdict.LOG_CONVEX),
                   ("5/2", Verdict.NOT_LOG_CONVEX), ("3", Verdict.NOT_LOG_CONVEX)):
        claims[f"logconvex_{r}"] = (f"log-convexity of h at r={r}", exp.value,
                                    lambda r=r: _theorem(verify_logconvexity(Fraction(r))))
    return claims


def _theorem(res):
    detail = {"sign_changes": res.report.sign_changes if res.report else None,
              "multiplicity_at_one": res.report.multiplicity_at_one if res.report else None,
              "witness": res.witness}
    return res.verdict.value, detail


def cmd_reproduce_paper(args) -> int:
    claims = reproduction_claims(args.tol, args.seed)
    selected = list(claims)
    if args.only:
        selected = [c.strip() for c in args.only.split(",") if c.strip()]
        unknown = [c for c in selected if c not in claims]
        if unknown:
            raise UsageError(f"unknown claim id(s) {unknown}; known: {', '.join(claims)}")
    rows = [_claim(cid, *claims[cid]) for cid in selected]
    width = max(len(r["claim"]) for r in rows)
    for row in rows:
        print(f"{row['status']:4}  {row['claim']:<{width}}  expected {row['expected']:<15} "
              f"observed {row['observed']}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        header = provenance(_run_config(args), args.seed)
        write_csv(out / "claims.csv", header, ("claim", "expected", "observed", "status", "description"),
                  [[r["claim"], r["expected"], r["observed"], r["status"], r["description"]] for r in rows])
        (out / "claims.json").write_text(dumps({"provenance": header, "claims": rows}) + "\n", encoding="utf-8")
    failed = sum(r["status"] != "PASS" for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} claims reproduced")
    return EXIT_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# campaigns


def cmd_search(args) -> int:
    if args.plan:
        path = Path(args.plan)
        if not path.is_file():
            raise UsageError(f"campaign plan not found: {path}")
        try:
            plan = CampaignPlan.from_json(path)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"invalid campaign plan {path}: {exc}") from exc
    else:
        plan = default_plan()
    result = run_campaign(plan, args.out, workers=args.workers,
                          run_config={"subcommand": "search", "plan": plan.to_dict()})
    print(json.dumps({k: v for k, v in result.items() if k != "witness_files"}, indent=2))
    print(f"{len(result['witness_files'])} witness file(s) in {args.out}")
    return EXIT_FAILED if result["theory_violations"] or result["errors"] else EXIT_OK


def cmd_replay(args) -> int:
    path = Path(args.records)
    if not path.is_file():
        raise UsageError(f"records file not found: {path}")
    _, records = load_records(path)
    worst, bad = 0.0, 0
    for rec in records:
        if rec.error is not None:
            continue
        delta = abs(replay(rec) - rec.min_eig)
        worst = max(worst, delta)
        bad += delta > args.tol
    print(f"replayed {len(records)} records, max |delta min_eig| = {worst:.3e}, {bad} beyond {args.tol:g}")
    return EXIT_FAILED if bad else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit seed (default %(default)s)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="posdef-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_args(p, default_help):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--points", help="comma-separated points, fractions allowed")
        g.add_argument("--grid", nargs=3, type=float, metavar=("LO", "HI", "NUM"),
                       help=f"log-spaced grid (default {default_help})")

    p = sub.add_parser("eval", parents=[common], help="tabulate t, f, g, f', f''")
    p.add_argument("--r", required=True)
    grid_args(p, "points 0,0.5,1,2,4")
    p.add_argument("--out", help="CSV file to write")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("poly-analyze", parents=[common], help="exact sign analysis for rational r = p/q")
    p.add_argument("--r", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_poly_analyze)

    p = sub.add_parser("matrix-test", parents=[common], help="psd (f) or cnd (g) verdict on one configuration")
    p.add_argument("--r", required=True)
    p.add_argument("--direction", choices=("F", "G"), default="F")
    p.add_argument("--generator", choices=[g.value for g in Generator if g is not Generator.EXPLICIT],
                   default=Generator.RANDOM_GAUSSIAN.value)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--coords", help="JSON list of points (overrides the generator)")
    p.add_argument("--alpha", type=float, default=1.0, help="Hadamard exponent")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--expect", choices=[s.value for s in Status])
    p.add_argument("--out")
    p.set_defaults(func=cmd_matrix_test)

    p = sub.add_parser("probe", help="function-level probes")
    kinds = p.add_subparsers(dest="kind", required=True)
    specs = {
        "cm": ("complete monotonicity of f (or h(s) = f(sqrt s))", ("r",)),
        "bernstein": ("Bernstein property of s -> g(sqrt s)", ("r",)),
        "pick": ("Pick property of (1-z^q)/(1-z^p)", ("p", "q")),
        "logconvex": ("midpoint log-convexity of h", ("r",)),
        "polya": ("Polya hypotheses for f", ("r",)),
        "growth": ("super-quadratic growth of g", ("r",)),
        "quadrature": ("integral identity for the power ratio", ("p", "q")),
        "factor4": ("factorisation of f at r=4", ()),
    }
    for kind, (help_text, needs) in specs.items():
        k = kinds.add_parser(kind, parents=[common], help=help_text)
        for name in needs:
            k.add_argument(f"--{name}", required=True)
        if kind in ("cm", "bernstein"):
            grid_args(k, "0.01 100 41")
            k.add_argument("--max-order", type=int, default=6)
        if kind == "cm":
            k.add_argument("--widder", action="store_true", help="Hankel matrix test instead of differences")
            k.add_argument("--function", choices=("f", "h"), default="f")
        if kind == "logconvex":
            k.add_argument("--pairs", help="x1,y1,x2,y2,... (default 9/25,16/25)")
            k.add_argument("--tol", type=float, default=0.0)
        if kind == "growth":
            k.add_argument("--x-max", type=float, default=1e6)
        if kind == "quadrature":
            k.add_argument("--nodes", type=int, default=32)
        k.add_argument("--expect", choices=[o.value for o in Outcome])
        k.add_argument("--out")
        k.set_defaults(func=cmd_probe)

    p = sub.add_parser("reproduce-paper", parents=[common], help="run the fixed claim suite")
    p.add_argument("--only", help="comma-separated claim ids")
    p.add_argument("--tol", type=float, default=0.0, help="absolute allowance on the midpoint gap")
    p.add_argument("--out", help="directory for claims.csv and claims.json")
    p.set_defaults(func=cmd_reproduce_paper)

    p = sub.add_parser("search", parents=[common], help="run a search campaign")
    p.add_argument("--plan", help="campaign plan JSON (default: built-in bounded campaign)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None, help="worker threads (default: $POSDEF_LAB_THREADS)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("replay", parents=[common], help="recompute min_eig for a records file")
    p.add_argument("--records", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"posdef-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"posdef-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Search campaigns for matrix-level failures of positive definiteness.

A campaign plan fixes a grid of exponents ``r``, dimensions ``n``, Hadamard
exponents ``alpha`` and point-configuration families.  :func:`sweep`
evaluates every combination (up to the eigensolve budget), in parallel,
and returns records in plan order.  Every record is replayable from its
``config_ref``; violations can be exported as self-contained witness files.

Results are reported as brackets and evidence.  A certified sweep proves
nothing about configurations it did not try.
"""
from __future__ import annotations

import datetime as _dt
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import scipy.special

from .kernels import Direction, KernelParams, eval_f
from .matrices import (
    Generator,
    PointConfig,
    Status,
    Subspace,
    build_kernel_matrix,
    cnd_verdict,
    exact_quadratic_form,
    hadamard_power,
    psd_verdict,
)
from .probes import Outcome, ProbeReport, midpoint_logconvexity_check
from .records import dumps, provenance, read_jsonl, write_csv, write_jsonl

logger = logging.getLogger(__name__)

__all__ = [
    "THREADS_ENV",
    "REPLAY_ATOL",
    "ConfigFamily",
    "CampaignPlan",
    "default_plan",
    "SearchRecord",
    "Bracket",
    "worker_count",
    "plan_tasks",
    "sweep",
    "replay",
    "theory_violations",
    "bisect_r",
    "find_cnd_violation",
    "bochner_radial_probe",
    "bochner_outcome",
    "witness_export",
    "verify_witness_file",
    "summary_rows",
    "dimension_audit",
    "continuity_audit",
    "run_campaign",
]

THREADS_ENV = "POSDEF_LAB_THREADS"
REPLAY_ATOL = 1e-10


def worker_count(requested: int | None = None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ConfigFamily:
    generator: Generator
    m: int
    scales: tuple[float, ...] = (1.0,)
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "generator", Generator(self.generator))
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.m < 1 or not self.scales or not self.seeds:
            raise ValueError("family needs m >= 1 and nonempty scales and seeds")

    def configs(self, n: int) -> Iterator[PointConfig]:
        # only the Gaussian recipe depends on the seed
        seeds = self.seeds if self.generator is Generator.RANDOM_GAUSSIAN else self.seeds[:1]
        m = min(self.m, n + 1) if self.generator is Generator.SIMPLEX else self.m
        for scale in self.scales:
            for seed in seeds:
                yield PointConfig.generate(self.generator, m, n, seed=seed, scale=scale)

    def to_dict(self) -> dict:
        return {"generator": self.generator.value, "m": self.m,
                "scales": list(self.scales), "seeds": list(self.seeds)}

    @classmethod
    def from_dict(cls, d: dict) -> "ConfigFamily":
        scales = d.get("scales")
        if scales is None and "scale_exponents" in d:
            lo, hi = d["scale_exponents"]
            scales = [2.0**k for k in range(int(lo), int(hi) + 1)]
        return cls(d["generator"], int(d["m"]), tuple(scales or (1.0,)), tuple(d.get("seeds", (0,))))


@dataclass(frozen=True)
class CampaignPlan:
    r_grid: tuple[float, ...]
    n_list: tuple[int, ...]
    alpha_grid: tuple[float, ...]
    families: tuple[ConfigFamily, ...]
    budget: int = 10_000
    bisect_iters: int = 0
    seed: int = 20140704
    bochner_dims: tuple[int, ...] = ()
    bochner_freqs: tuple[float, ...] = tuple(np.geomspace(0.5, 30.0, 64).tolist())

    def __post_init__(self):
        for name in ("r_grid", "n_list", "alpha_grid", "families"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"campaign plan needs a nonempty {name}")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if any(a <= 0 for a in self.alpha_grid) or any(r <= 0 for r in self.r_grid):
            raise ValueError("r and alpha values must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["families"] = [f.to_dict() for f in self.families]
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignPlan":
        return cls(
            r_grid=tuple(float(r) for r in d["r_grid"]),
            n_list=tuple(int(n) for n in d["n_list"]),
            alpha_grid=tuple(float(a) for a in d.get("alpha_grid", (1.0,))),
            families=tuple(ConfigFamily.from_dict(f) for f in d["families"]),
            budget=int(d.get("budget", 10_000)),
            bisect_iters=int(d.get("bisect_iters", 0)),
            seed=int(d.get("seed", 20140704)),
            bochner_dims=tuple(int(n) for n in d.get("bochner_dims", ())),
            **({"bochner_freqs": tuple(float(w) for w in d["bochner_freqs"])}
               if "bochner_freqs" in d else {}),
        )

    @classmethod
    def from_json(cls, path) -> "CampaignPlan":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def default_plan(budget: int = 10_000, bisect_iters: int = 4) -> CampaignPlan:
    """The bounded campaign: ``r`` in {4.5, 5, 6, 7, 8, 9}, ``n <= 6``.

    Gaussian clouds and integer lattices at scales ``2**k``, plus a
    400-point lattice at fine scales, which is where fractional Hadamard
    powers first lose positivity on the line.
    """
    coarse = tuple(2.0**k for k in range(-4, 13, 2))
    fine = tuple(2.0 ** (k / 2) for k in range(-10, -5))
    families = (
        ConfigFamily(Generator.RANDOM_GAUSSIAN, 20, coarse, (0,)),
        ConfigFamily(Generator.RANDOM_GAUSSIAN, 50, coarse, (0,)),
        ConfigFamily(Generator.RANDOM_GAUSSIAN, 100, coarse, (0,)),
        ConfigFamily(Generator.SCALED_LATTICE, 50, coarse),
        ConfigFamily(Generator.SCALED_LATTICE, 200, coarse),
        ConfigFamily(Generator.SCALED_LATTICE, 400, fine),
    )
    return CampaignPlan((4.5, 5.0, 6.0, 7.0, 8.0, 9.0), (1, 2, 3, 4, 5, 6), (0.01, 0.1, 0.5, 1.0),
                        families, budget=budget, bisect_iters=bisect_iters, bochner_dims=(5, 6))


@dataclass(frozen=True)
class SearchRecord:
    index: int
    r: float
    n: int
    alpha: float
    config_ref: dict
    min_eig: float
    subspace: str
    verdict: str
    tolerance: float
    direction: str = "F"
    timestamp: str = ""
    error: str | None = None

    @property
    def violated(self) -> bool:
        return self.verdict == Status.VIOLATED.value

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SearchRecord":
        return cls(**d)


@dataclass(frozen=True)
class _Task:
    index: int
    r: float
    n: int
    config: PointConfig
    alphas: tuple[float, ...]


def plan_tasks(plan: CampaignPlan) -> list[_Task]:
    """Plan-ordered tasks; each shares one kernel matrix across its alphas.

    The budget counts eigensolves, i.e. (config, alpha) pairs.
    """
    tasks, index, left = [], 0, plan.budget
    for r in plan.r_grid:
        for n in plan.n_list:
            for fam in plan.families:
                for cfg in fam.configs(n):
                    if left <= 0:
                        return tasks
                    alphas = tuple(plan.alpha_grid[:left])
                    tasks.append(_Task(index, r, n, cfg, alphas))
                    index += len(alphas)
                    left -= len(alphas)
    return tasks


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _run_task(task: _Task, direction: Direction) -> list[SearchRecord]:
    params = KernelParams(task.r, direction)
    subspace = Subspace.FULL if direction is Direction.F else Subspace.SUM_ZERO
    out = []
    try:
        base = build_kernel_matrix(task.config, params)
    except Exception as exc:  # recorded, sweep continues
        return [SearchRecord(task.index + i, task.r, task.n, a, task.config.ref(), math.nan,
                             subspace.value, "ERROR", math.nan, direction.value, _now(), repr(exc))
                for i, a in enumerate(task.alphas)]
    for i, alpha in enumerate(task.alphas):
        try:
            mat = hadamard_power(base, alpha)
            v = psd_verdict(mat) if subspace is Subspace.FULL else cnd_verdict(mat)
            out.append(SearchRecord(task.index + i, task.r, task.n, alpha, task.config.ref(),
                                    v.min_eigenvalue, subspace.value, v.status.value, v.tolerance,
                                    direction.value, _now()))
        except Exception as exc:
            out.append(SearchRecord(task.index + i, task.r, task.n, alpha, task.config.ref(), math.nan,
                                    subspace.value, "ERROR", math.nan, direction.value, _now(), repr(exc)))
    return out


def sweep(plan: CampaignPlan, workers: int | None = None, direction=Direction.F) -> list[SearchRecord]:
    """Evaluate every (r, n, config, alpha) of the plan; records in plan order."""
    direction = Direction(direction)
    tasks = plan_tasks(plan)
    if not tasks:
        return []
    width = worker_count(workers)
    if width == 1:
        batches = [_run_task(t, direction) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            batches = list(pool.map(lambda t: _run_task(t, direction), tasks))
    records = [rec for batch in batches for rec in batch]
    records.sort(key=lambda rec: rec.index)
    return records


def _rebuild(record: SearchRecord):
    cfg = PointConfig.from_dict(record.config_ref)
    base = build_kernel_matrix(cfg, KernelParams(record.r, record.direction))
    return cfg, hadamard_power(base, record.alpha)


def replay(record: SearchRecord) -> float:
    """Recompute ``min_eig`` for a record from its config reference."""
    _, mat = _rebuild(record)
    v = psd_verdict(mat) if record.subspace == Subspace.FULL.value else cnd_verdict(mat)
    return v.min_eigenvalue


def theory_violations(records: Sequence[SearchRecord]) -> list[SearchRecord]:
    """Records contradicting known positive definiteness: f, ``1 <= r <= 4``, ``alpha = 1``.

    Every alpha is covered in fact (infinite divisibility), but the hard
    requirement is stated for ``alpha = 1``.
    """
    return [rec for rec in records
            if rec.violated and rec.direction == "F" and 1 <= rec.r <= 4 and rec.alpha == 1.0]


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    inconclusive: bool
    records: list[SearchRecord] = field(default_factory=list, repr=False)
    reason: str = ""


def _violates(r, n, family: ConfigFamily, alpha_grid, start_index=0):
    plan = CampaignPlan((r,), (n,), tuple(alpha_grid), (family,), budget=10**9)
    recs = sweep(plan, workers=1)
    return any(rec.violated for rec in recs), recs


def bisect_r(n: int, family: ConfigFamily, alpha_grid, r_lo: float, r_hi: float, iters: int) -> Bracket:
    """Bisection on ``r`` keeping "certified at lo, violated at hi".

    Returns the input interval flagged inconclusive when the end points do
    not straddle a change of verdict.
    """
    if iters < 0:
        raise ValueError("iters must be nonnegative")
    if iters == 0:
        return Bracket(r_lo, r_hi, False, [], "no iterations requested")
    lo_bad, recs_lo = _violates(r_lo, n, family, alpha_grid)
    hi_bad, recs_hi = _violates(r_hi, n, family, alpha_grid)
    records = recs_lo + recs_hi
    if lo_bad or not hi_bad:
        why = "violation already at r_lo" if lo_bad else "no confirmed violation at r_hi"
        return Bracket(r_lo, r_hi, True, records, why)
    lo, hi = r_lo, r_hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        bad, recs = _violates(mid, n, family, alpha_grid)
        records += recs
        if bad:
            hi = mid
        else:
            lo = mid
    return Bracket(lo, hi, False, records, "")


def find_cnd_violation(r: float, m: int = 3, n: int = 1, exponents=range(-4, 13),
                       generator=Generator.GRID_LINE, seed: int = 0):
    """Scan scales ``2**k`` for a configuration on which ``g`` is not cnd.

    Returns ``(config, verdict)`` for the first violation, or ``None``.
    """
    params = KernelParams(r, Direction.G)
    for k in exponents:
        cfg = PointConfig.generate(generator, m, n, seed=seed, scale=2.0**k)
        v = cnd_verdict(build_kernel_matrix(cfg, params))
        if v.violated:
            return cfg, v
    return None


# ---------------------------------------------------------------------------
# radial Fourier transform


def _gl_panel(fn, a, b, x, w):
    half = 0.5 * (b - a)
    t = (a + b)[..., None] * 0.5 + half[..., None] * x
    return (fn(t) * w).sum(axis=-1) * half


def bochner_radial_probe(r: float | None, n: int, freq_grid, quad_settings: dict | None = None,
                         fn=None) -> ProbeReport:
    """Radial Fourier transform of ``f(||x||)`` on ``R^n`` at the given frequencies.

    ``F(w) = (2 pi)**(n/2) w**(1 - n/2) int_0^inf f(t) t**(n/2) J_{n/2-1}(w t) dt``

    Without damping, the truncation error past ``t_max`` is bounded using
    ``f(t) <= 2 t**(1 - r)`` for ``t >= 2`` and the uniform bound
    ``|J_nu(x)| <= 0.8 x**(-1/3)`` for ``x >= 1``, and is added to the error
    estimate.  When ``r <= n + 1`` (or the tail decays too slowly for that
    bound to be useful) the integral is damped by ``exp(-(eps t)**2)``
    (``quad_settings["damping"]``, default 0.05).  The damped kernel is the
    product of ``f`` with a Gaussian, so it is positive definite whenever
    ``f`` is; a negative damped transform is therefore still evidence against
    ``f``.  Quadrature uses Gauss-Legendre panels (graded towards 0, then of
    length ``min(1, pi/w)``), with the error estimated by comparing ``G`` and
    ``2G`` nodes per panel.

    The verdict follows :func:`bochner_outcome`.  ``fn`` (a callable on ``t >= 0``) replaces
    ``f`` for calibration runs.
    """
    qs = {"nodes": 16, "damping": None, "t_max": None, "grading": 30}
    qs.update(quad_settings or {})
    if n < 1:
        raise ValueError("dimension must be positive")
    # exponent of the tail bound  f(t) t**(n/2) |J(wt)| <= 1.6 w**(-1/3) t**tail_exp
    tail_exp = None
    if fn is None:
        if r is None or r <= 1:
            raise ValueError("need r > 1 or an explicit fn")
        fn = lambda t: eval_f(r, t)  # noqa: E731
        tail_exp = 1 - r + n / 2 - 1 / 3
        if qs["damping"] is None:
            qs["damping"] = 0.0 if (r > n + 1 and tail_exp < -1.5) else 0.05
    eps = float(qs["damping"] or 0.0)
    nu = n / 2 - 1
    if qs["t_max"] is not None:
        t_max = float(qs["t_max"])
    elif eps > 0:
        t_max = 6.5 / eps
    else:
        t_max = 2000.0 if tail_exp is not None else 200.0
    x, w = np.polynomial.legendre.leggauss(qs["nodes"])
    x2, w2 = np.polynomial.legendre.leggauss(2 * qs["nodes"])
    omegas = np.asarray(freq_grid, dtype=float)
    if np.any(omegas <= 0):
        raise ValueError("frequencies must be positive")
    values, errors = [], []
    for om in omegas:
        def integrand(t, om=om):
            val = np.asarray(fn(t), dtype=float) * t ** (n / 2) * scipy.special.jv(nu, om * t)
            if eps:
                val = val * np.exp(-(eps * t) ** 2)
            return val

        step = min(1.0, math.pi / om)
        graded = step * 2.0 ** -np.arange(qs["grading"], 0, -1)
        edges = np.concatenate([[0.0], graded, np.arange(step, t_max + step, step)])
        a, b = edges[:-1], edges[1:]
        coarse = _gl_panel(integrand, a, b, x, w)
        fine = _gl_panel(integrand, a, b, x2, w2)
        pref = (2 * math.pi) ** (n / 2) * om ** (1 - n / 2)
        err = np.abs(fine - coarse).sum() + 1e-15 * np.abs(fine).sum()
        if tail_exp is not None and not eps and t_max >= 2 and om * t_max >= 1:
            # f(t) <= 2 t**(1-r) for t >= 2, and |J_nu(x)| <= 0.8 x**(-1/3) for x >= 1
            err += 1.6 * om ** (-1 / 3) * t_max ** (tail_exp + 1) / -(tail_exp + 1)
        values.append(pref * fine.sum())
        errors.append(pref * err)
    values, errors = np.array(values), np.array(errors)
    i = int(np.argmin(values))
    settings = {"r": r, "n": n, "frequencies": omegas.tolist(), "nodes": qs["nodes"],
                "damping": eps, "t_max": t_max, "transform": values.tolist(), "errors": errors.tolist()}
    outcome = bochner_outcome(values, errors)
    if outcome is Outcome.PASS:
        return ProbeReport("bochner_radial", outcome, float(values[i]), None, settings)
    witness = {"frequency": float(omegas[i]), "value": float(values[i]), "error": float(errors[i])}
    return ProbeReport("bochner_radial", outcome, float(values[i]), witness, settings)


def bochner_outcome(values, errors) -> Outcome:
    """PASS when every value is nonnegative within its error bar; FAIL when
    the most negative value exceeds ten times its error in size; otherwise
    INCONCLUSIVE."""
    values, errors = np.asarray(values, dtype=float), np.asarray(errors, dtype=float)
    if np.all(values >= -errors):
        return Outcome.PASS
    i = int(np.argmin(values))
    if 10 * errors[i] < -values[i]:
        return Outcome.FAIL
    return Outcome.INCONCLUSIVE


# ---------------------------------------------------------------------------
# witnesses and campaign output


def witness_export(record: SearchRecord, path) -> Path:
    """Write a self-contained JSON witness for a VIOLATED record."""
    if not record.violated:
        raise ValueError(f"record {record.index} is {record.verdict}, only violations are exported")
    cfg, mat = _rebuild(record)
    v = psd_verdict(mat) if record.subspace == Subspace.FULL.value else cnd_verdict(mat)
    payload = {
        "record": record.to_dict(),
        "kernel": KernelParams(record.r, record.direction).to_dict(),
        "alpha": record.alpha,
        "points": cfg.points.tolist(),
        "matrix_sha256": mat.checksum(),
        "min_eigenvalue": v.min_eigenvalue,
        "eigenvector": v.witness.tolist(),
        "subspace": record.subspace,
        "quadratic_form": exact_quadratic_form(
            mat.entries if record.subspace == Subspace.FULL.value else -mat.entries, v.witness),
    }
    path = Path(path)
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    return path


def verify_witness_file(path) -> dict:
    """Independently re-check a witness file: rebuild the matrix from the
    stored points and evaluate the stored eigenvector's quadratic form."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    params = KernelParams.from_dict(data["kernel"])
    cfg = PointConfig.explicit(data["points"])
    mat = hadamard_power(build_kernel_matrix(cfg, params), data["alpha"])
    w = np.asarray(data["eigenvector"])
    op = mat.entries if data["subspace"] == Subspace.FULL.value else -mat.entries
    form = exact_quadratic_form(op, w) / float(w @ w)
    v = psd_verdict(mat) if data["subspace"] == Subspace.FULL.value else cnd_verdict(mat)
    return {
        "checksum_matches": mat.checksum() == data["matrix_sha256"],
        "min_eigenvalue": v.min_eigenvalue,
        "replay_delta": abs(v.min_eigenvalue - data["min_eigenvalue"]),
        "quadratic_form": form,
        "negative": form < 0 and v.violated,
    }


def summary_rows(records: Sequence[SearchRecord]) -> list[list]:
    """One row per (r, n): the alpha with the smallest eigenvalue and that value."""
    best: dict[tuple, SearchRecord] = {}
    for rec in records:
        if rec.error is not None:
            continue
        key = (rec.r, rec.n)
        if key not in best or rec.min_eig < best[key].min_eig:
            best[key] = rec
    return [[k[0], k[1], rec.alpha, rec.min_eig, rec.verdict] for k, rec in sorted(best.items())]


SUMMARY_COLUMNS = ("r", "n", "worst_alpha", "min_eig", "verdict")


def dimension_audit(records: Sequence[SearchRecord]) -> list[dict]:
    """(r, n) cells that sampled no violation although a lower dimension did.

    A kernel positive definite on ``R^n`` is so on every ``R^m``, ``m < n``,
    so those cells are violated too; the family simply did not sample an
    embedded copy of the lower-dimensional witness.
    """
    low: dict[float, int] = {}
    for rec in records:
        if rec.violated:
            low[rec.r] = min(low.get(rec.r, rec.n), rec.n)
    notes = []
    for r, n, _, _, verdict in summary_rows(records):
        if r in low and n > low[r] and verdict != Status.VIOLATED.value:
            notes.append({"r": r, "n": n, "sampled": verdict,
                          "explanation": f"implied by the violation at n={low[r]} (restriction)"})
    return notes


def continuity_audit(records: Sequence[SearchRecord], factor: float = 50.0) -> list[dict]:
    """Flag jumps of ``r -> min_eig`` for a fixed (n, config, alpha).

    An interior slope is flagged when it exceeds ``factor`` times both
    neighbouring slopes and the step is above 1% of the series' magnitude.
    """
    series: dict[tuple, list[tuple[float, float]]] = {}
    for rec in records:
        if rec.error is None:
            key = (rec.n, dumps(rec.config_ref), rec.alpha, rec.direction)
            series.setdefault(key, []).append((rec.r, rec.min_eig))
    flags = []
    for (n, ref, alpha, _), pts in series.items():
        pts.sort()
        slopes = [abs(b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(pts, pts[1:]) if b[0] > a[0]]
        floor = 1e-2 * max((abs(v) for _, v in pts), default=0.0)
        for i in range(1, len(slopes) - 1):
            step = slopes[i] * (pts[i + 1][0] - pts[i][0])
            if step > floor and slopes[i] > factor * max(slopes[i - 1], slopes[i + 1]):
                flags.append({"n": n, "alpha": alpha, "config_ref": json.loads(ref),
                              "r_interval": [pts[i][0], pts[i + 1][0]], "step": step})
    return flags


def _bisect_target(plan: CampaignPlan, records: Sequence[SearchRecord]):
    """Pick (n, family, alphas, r_lo, r_hi) for refinement, or None.

    Uses the smallest violated grid value of ``r`` and the record with the
    most negative ``min_eig / alpha`` there (its dimension and family).
    """
    bad = [rec for rec in records if rec.violated]
    if not bad:
        return None
    r_hi = min(rec.r for rec in bad)
    below = [r for r in plan.r_grid if r < r_hi]
    if not below:
        return None
    first = min((rec for rec in bad if rec.r == r_hi), key=lambda rec: (rec.min_eig / rec.alpha, rec.index))
    cfg = PointConfig.from_dict(first.config_ref)
    family = next(f for f in plan.families
                  if f.generator is cfg.generator and (f.m == cfg.m or f.generator is Generator.SIMPLEX)
                  and cfg.scale in f.scales)
    return first.n, family, tuple(plan.alpha_grid), max(below), r_hi


def run_campaign(plan: CampaignPlan, out_dir, workers: int | None = None,
                 run_config: dict | None = None) -> dict:
    """Run a campaign and write its outputs to ``out_dir``.

    Files: ``records.jsonl`` (one record per eigensolve), ``summary.csv``
    (worst alpha per (r, n)), ``witness_*.json`` for every violation,
    ``bisect.jsonl`` when refinement ran, and ``evidence.json`` (analytic
    midpoint test at r=9, radial transforms, audits).

    The bracket starts as (4, 9].  Its upper end moves down to the smallest
    ``r`` with a confirmed matrix violation or a confirmed negative radial
    transform, then to the upper end of the bisection.  The lower end stays
    at 4: certified samples do not prove positivity.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = provenance(run_config or {"subcommand": "search", "plan": plan.to_dict()}, plan.seed)
    records = sweep(plan, workers)
    write_jsonl(out / "records.jsonl", header, (r.to_dict() for r in records))
    write_csv(out / "summary.csv", header, SUMMARY_COLUMNS, summary_rows(records))

    violated = [r for r in records if r.violated]
    witnesses = [str(witness_export(rec, out / f"witness_{rec.index:06d}.json")) for rec in violated]
    upper, sources = 9.0, ["log-convexity failure of h at r=9"]
    analytic = midpoint_logconvexity_check(9, 9 / 25, 16 / 25)

    if violated:
        r_min = min(r.r for r in violated)
        if r_min < upper:
            upper, sources = r_min, [f"matrix witness at r={r_min:g}"]
    bochner = []
    for n in plan.bochner_dims:
        for r in plan.r_grid:
            rep = bochner_radial_probe(r, n, plan.bochner_freqs)
            bochner.append({"r": r, "n": n, "verdict": rep.verdict.value,
                            "worst": rep.worst_margin, "witness": rep.witness})
            if rep.verdict is Outcome.FAIL and r < upper:
                upper, sources = r, [f"negative radial transform at r={r:g}, n={n}"]

    bracket = None
    target = _bisect_target(plan, records) if plan.bisect_iters > 0 else None
    if target is not None:
        n, family, alphas, lo, hi = target
        bracket = bisect_r(n, family, alphas, lo, hi, plan.bisect_iters)
        write_jsonl(out / "bisect.jsonl", header, (r.to_dict() for r in bracket.records))
        if not bracket.inconclusive and bracket.hi < upper:
            upper, sources = bracket.hi, [f"bisection witness at r={bracket.hi:g}, n={n}"]
            for rec in bracket.records:
                if rec.violated and rec.r == bracket.hi:
                    path = out / f"witness_bisect_{rec.r:g}_{rec.index:06d}.json"
                    witnesses.append(str(witness_export(rec, path)))
                    break

    evidence = {
        "provenance": header,
        "analytic": [analytic.to_dict()],
        "bochner": bochner,
        "dimension_audit": dimension_audit(records),
        "continuity_audit": continuity_audit(records),
        "bisection": None if bracket is None else
        {"lo": bracket.lo, "hi": bracket.hi, "inconclusive": bracket.inconclusive, "reason": bracket.reason},
    }
    (out / "evidence.json").write_text(dumps(evidence) + "\n", encoding="utf-8")
    return {
        "records": len(records),
        "violations": len(violated),
        "errors": sum(r.error is not None for r in records),
        "theory_violations": len(theory_violations(records)),
        "bracket": [4.0, upper],
        "bracket_narrowed": upper < 9.0,
        "bracket_source": sources[0],
        "witness_files": witnesses,
        "analytic_evidence": analytic.verdict.value,
    }


def load_records(path) -> tuple[dict, list[SearchRecord]]:
    header, rows = read_jsonl(path)
    return header, [SearchRecord.from_dict(r) for r in rows]

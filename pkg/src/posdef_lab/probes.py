"""Function-level probes: complete monotonicity, Bernstein and Pick tests,
log-convexity, Polya's hypotheses, growth at infinity, and the integral and
factorisation identities of the kernel family.

Every probe returns a :class:`ProbeReport`.  A PASS from a sampling probe is
evidence only; a FAIL carries a witness that can be recomputed from the
report's settings and refutes the property outright.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .kernels import DEFAULT_BAND, Direction, KernelParams, eval_f, eval_f_complex, eval_g, eval_h
from .matrices import Status, psd_verdict
from .polynomials import Verdict, verify_convexity

__all__ = [
    "Outcome",
    "ProbeReport",
    "EVIDENCE_NOTE",
    "widder_cm_probe",
    "finite_diff_cm_probe",
    "bernstein_probe",
    "default_pick_grid",
    "pick_probe",
    "quadrature_identity_check",
    "logconvex_midpoint_probe",
    "midpoint_logconvexity_check",
    "polya_certificate",
    "growth_obstruction_probe",
    "factorization_check_r4",
    "exact_fraction",
]

EPS = np.finfo(float).eps
EVIDENCE_NOTE = "PASS from sampling is evidence, not proof; FAIL carries a reproducible witness"


class Outcome(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ProbeReport:
    probe_name: str
    verdict: Outcome
    worst_margin: float
    witness: dict | None = None
    settings: dict = field(default_factory=dict)
    note: str = EVIDENCE_NOTE

    @property
    def passed(self) -> bool:
        return self.verdict is Outcome.PASS

    def to_dict(self) -> dict:
        return {"probe_name": self.probe_name, "verdict": self.verdict.value,
                "worst_margin": self.worst_margin, "witness": self.witness,
                "settings": self.settings, "note": self.note}


def _values(fn, x) -> np.ndarray:
    return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)


def widder_cm_probe(fn: Callable, sample_points: Sequence[float], tol: float | None = None) -> ProbeReport:
    """psd test of the Hankel-type matrix ``[fn(x_i + x_j)]``.

    Completely monotone functions give psd matrices of this form, so a
    violation refutes complete monotonicity.
    """
    x = np.asarray(sample_points, dtype=float)
    if np.any(x <= 0) or len(np.unique(x)) != len(x):
        raise ValueError("sample points must be positive and distinct")
    h = _values(fn, x[:, None] + x[None, :])
    h = 0.5 * (h + h.T)
    v = psd_verdict(h, tol)
    settings = {"points": x.tolist(), "tol": v.tolerance}
    if v.status is Status.CERTIFIED:
        return ProbeReport("widder_cm", Outcome.PASS, v.min_eigenvalue, None, settings)
    witness = {"min_eigenvalue": v.min_eigenvalue, "eigenvector": v.witness.tolist()}
    outcome = Outcome.FAIL if v.violated else Outcome.INCONCLUSIVE
    return ProbeReport("widder_cm", outcome, v.min_eigenvalue, witness, settings)


def _difference_step(x: np.ndarray, k: int) -> np.ndarray:
    return EPS ** (1.0 / (k + 2)) * np.maximum(x, 1.0)


def finite_diff_cm_probe(fn: Callable, max_order: int, grid: Sequence[float], tol: float = 0.0,
                         value_error: float | None = None, name: str = "finite_diff_cm") -> ProbeReport:
    """Sign test ``(-1)**k Delta_h**k fn(x) >= 0`` for ``k = 0..max_order``.

    Forward differences of a completely monotone function alternate in sign
    for every step ``h``; the step only controls sensitivity and is taken as
    ``eps**(1/(k+2)) * max(x, 1)``.  A difference counts as negative only
    once it is below the rounding bound ``2**k * value_error`` plus
    ``tol * h**k``.  ``value_error`` is the absolute error of one
    evaluation, by default ``8 eps`` times the largest sampled value.
    """
    if not 0 <= max_order <= 8:
        raise ValueError("finite-difference orders above 8 carry no signal in double precision")
    x = np.asarray(grid, dtype=float)
    worst = math.inf
    worst_at = None
    for k in range(max_order + 1):
        h = _difference_step(x, k)
        stencil = _values(fn, x[:, None] + np.arange(k + 1)[None, :] * h[:, None])
        weights = np.array([(-1) ** (k - j) * math.comb(k, j) for j in range(k + 1)], dtype=float)
        signed = (-1) ** k * (stencil @ weights)
        err = value_error if value_error is not None else 8 * EPS * float(np.max(np.abs(stencil)))
        bound = 2**k * err + tol * h**k
        scaled = signed / h**k
        i = int(np.argmin(scaled))
        if scaled[i] < worst:
            worst, worst_at = float(scaled[i]), k
        bad = np.nonzero(signed < -bound)[0]
        if bad.size:
            j = int(bad[0])
            witness = {"order": k, "x": float(x[j]), "h": float(h[j]),
                       "signed_difference": float(signed[j]), "bound": float(bound[j])}
            return ProbeReport(name, Outcome.FAIL, float(scaled[j]), witness,
                               {"max_order": max_order, "grid": x.tolist(), "tol": tol})
    return ProbeReport(name, Outcome.PASS, worst, None,
                       {"max_order": max_order, "grid": x.tolist(), "tol": tol, "worst_order": worst_at})


def bernstein_probe(fn: Callable, grid: Sequence[float], max_order: int = 6, step: float = 0.1,
                    tol: float = 0.0) -> ProbeReport:
    """Bernstein test: ``fn >= 0`` and the difference quotient
    ``(fn(x + step) - fn(x))/step`` passes the complete-monotonicity probe.

    The quotient of a Bernstein function is an average of its completely
    monotone derivative, hence itself completely monotone for any step.
    Witness orders are reported for ``fn``'s derivatives (quotient order + 1).
    """
    x = np.asarray(grid, dtype=float)
    settings = {"grid": x.tolist(), "max_order": max_order, "step": step, "tol": tol}
    vals = _values(fn, x)
    if np.any(vals < -tol):
        j = int(np.argmin(vals))
        return ProbeReport("bernstein", Outcome.FAIL, float(vals[j]),
                           {"order": 0, "x": float(x[j]), "value": float(vals[j])}, settings)

    def quotient(t):
        return (_values(fn, t + step) - _values(fn, t)) / step

    # the stencils reach at most ~0.25 max(x, 1) beyond x
    span = np.concatenate([x, 1.25 * x + 1 + step])
    value_error = 8 * EPS * float(np.max(np.abs(_values(fn, span)))) / step
    inner = finite_diff_cm_probe(quotient, max_order - 1, x, tol, value_error, name="bernstein")
    witness = inner.witness
    if witness is not None:
        witness = dict(witness, order=witness["order"] + 1)
    return ProbeReport("bernstein", inner.verdict, min(inner.worst_margin, float(vals.min())),
                       witness, settings)


def default_pick_grid(n_radii: int = 32, n_angles: int = 16, r_min: float = 1e-2,
                      r_max: float = 1e2) -> np.ndarray:
    """Log-spaced radii times interior angles ``(j + 1/2) pi / n_angles``."""
    radii = np.geomspace(r_min, r_max, n_radii)
    angles = (np.arange(n_angles) + 0.5) * np.pi / n_angles
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def pick_probe(p: float, q: float, grid=None, tol: float = 0.0) -> ProbeReport:
    """Upper-half-plane test of ``(1 - z**q)/(1 - z**p)``.

    FAIL when some grid value has ``Im < -(1e-10 (1 + |value|) + tol)``.
    """
    z = default_pick_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    if np.any(z.imag <= 0):
        raise ValueError("Pick grid must lie in the open upper half-plane")
    w = eval_f_complex(z, p, q)
    scale = 1.0 + np.abs(w)
    margin = w.imag / scale
    i = int(np.argmin(margin))
    settings = {"p": p, "q": q, "grid_size": int(z.size), "tol": tol}
    if w.imag[i] < -(1e-10 * scale[i] + tol):
        witness = {"z": [z[i].real, z[i].imag], "value": [w[i].real, w[i].imag]}
        return ProbeReport("pick", Outcome.FAIL, float(margin[i]), witness, settings)
    return ProbeReport("pick", Outcome.PASS, float(margin[i]), None, settings)


def _power_ratio(t: np.ndarray, p: float, q: float) -> np.ndarray:
    out = np.full(t.shape, q / p)
    off = t != 1.0
    lt = np.log(t[off])
    out[off] = np.expm1(q * lt) / np.expm1(p * lt)
    return out


def quadrature_identity_check(p: float, q: float, t_grid=None, nodes: int = 32,
                              tol: float = 1e-10, band: float = DEFAULT_BAND) -> ProbeReport:
    """Compare ``(1 - t**q)/(1 - t**p)`` with
    ``(q/p) * int_0^1 (lam t**p + 1 - lam)**((q-p)/p) dlam`` (Gauss-Legendre).

    The default grid is 401 log-spaced points on ``[0.01, 100]`` with the
    band ``|t - 1| < band`` removed.
    """
    if not 0 < p < q:
        raise ValueError("identity needs 0 < p < q")
    if t_grid is None:
        t = np.geomspace(0.01, 100, 401)
        t = t[np.abs(t - 1) >= band]
    else:
        t = np.asarray(t_grid, dtype=float)
    x, w = np.polynomial.legendre.leggauss(nodes)
    lam, w = 0.5 * (x + 1), 0.5 * w
    base = lam[None, :] * t[:, None] ** p + 1 - lam[None, :]
    rhs = (q / p) * (base ** ((q - p) / p) @ w)
    lhs = _power_ratio(t, p, q)
    rel = np.abs(rhs - lhs) / np.abs(lhs)
    i = int(np.argmax(rel))
    settings = {"p": p, "q": q, "nodes": nodes, "tol": tol, "n_points": int(t.size)}
    if rel[i] <= tol:
        return ProbeReport("quadrature_identity", Outcome.PASS, float(rel[i]), None, settings)
    witness = {"t": float(t[i]), "direct": float(lhs[i]), "quadrature": float(rhs[i])}
    return ProbeReport("quadrature_identity", Outcome.FAIL, float(rel[i]), witness, settings)


def logconvex_midpoint_probe(fn: Callable, pairs, tol: float = 0.0) -> ProbeReport:
    """Midpoint test ``fn((x+y)/2)**2 <= fn(x) fn(y) (1 + tol)``.

    The witness also carries the reciprocal forms ``1/(fn(x) fn(y))`` and
    ``1/fn(mid)**2``, which for ``fn = 1/S`` are the products of sums.
    """
    pr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    mid = pr.mean(axis=1)
    fm, fx, fy = _values(fn, mid), _values(fn, pr[:, 0]), _values(fn, pr[:, 1])
    if np.any(fm <= 0) or np.any(fx <= 0) or np.any(fy <= 0):
        raise ValueError("midpoint probe needs a positive function")
    lhs = fm * fm
    rhs = fx * fy
    margin = (rhs * (1 + tol) - lhs) / rhs
    i = int(np.argmin(margin))
    settings = {"pairs": pr.tolist(), "tol": tol}
    if margin[i] >= 0:
        return ProbeReport("logconvex_midpoint", Outcome.PASS, float(margin[i]), None, settings)
    witness = {"x": float(pr[i, 0]), "y": float(pr[i, 1]), "lhs": float(lhs[i]), "rhs": float(rhs[i]),
               "reciprocal_lhs": float(1 / rhs[i]), "reciprocal_rhs": float(1 / lhs[i])}
    return ProbeReport("logconvex_midpoint", Outcome.FAIL, float(margin[i]), witness, settings)


def midpoint_logconvexity_check(r: float = 9, x: float = 9 / 25, y: float = 16 / 25, tol: float = 0.0) -> ProbeReport:
    """Midpoint log-convexity test of ``h(s) = f(sqrt(s))`` at one pair, in
    the reciprocal (sum) form.

    With ``lhs = 1/(h(x) h(y))`` and ``rhs = 1/h((x+y)/2)**2``, log-convexity
    requires ``lhs <= rhs``.  FAIL when ``lhs - rhs > tol``; ``tol`` is an
    absolute allowance on that gap and ``worst_margin`` is ``rhs - lhs``.
    """
    h = lambda s: eval_h(r, s)  # noqa: E731
    hx, hy, hm = (float(h(s)) for s in (x, y, 0.5 * (x + y)))
    lhs, rhs = 1.0 / (hx * hy), 1.0 / (hm * hm)
    settings = {"r": r, "x": x, "y": y, "tol": tol}
    witness = {"x": x, "y": y, "lhs": lhs, "rhs": rhs, "gap": lhs - rhs}
    if lhs - rhs > tol:
        return ProbeReport("midpoint_logconvexity", Outcome.FAIL, rhs - lhs, witness, settings)
    return ProbeReport("midpoint_logconvexity", Outcome.PASS, rhs - lhs, None, settings)


def exact_fraction(params, max_den: int = 1000) -> Fraction | None:
    """Exact ``p/q`` for ``params`` if it is a short fraction, else ``None``."""
    if isinstance(params, KernelParams):
        if params.exact_r is not None:
            return params.fraction
        r = params.r
    else:
        r = float(params)
    frac = Fraction(r).limit_denominator(max_den)
    return frac if float(frac) == r else None


def polya_certificate(r, grid=None, tol: float = 1e-12) -> ProbeReport:
    """Check Polya's hypotheses for ``f`` on ``[0, inf)``: nonnegative,
    nonincreasing and convex on the sampled grid, plus the exact convexity
    verdict when ``r`` is a short fraction.  PASS means ``f`` (even, radial in
    one dimension) is positive definite on the line, granted Polya's theorem.
    """
    params = r if isinstance(r, KernelParams) else KernelParams(float(r))
    if params.r < 1:
        raise ValueError("Polya certificate is stated for r >= 1")
    t = (np.unique(np.concatenate([np.linspace(0, 4, 401), np.geomspace(4, 1e4, 200)]))
         if grid is None else np.asarray(grid, dtype=float))
    f = eval_f(params, t)
    dt = np.diff(t)
    slopes = np.diff(f) / dt
    noise_slope = 4 * EPS * max(1.0, float(np.abs(f).max())) / dt
    rises = slopes - noise_slope
    curv = np.diff(slopes)
    noise_curv = noise_slope[:-1] + noise_slope[1:]
    settings = {"r": params.r, "n_points": int(t.size), "tol": tol}
    frac = exact_fraction(params)
    exact = None
    if frac is not None and frac > 1:
        exact = verify_convexity(frac)
        settings["exact"] = exact.to_dict()
    if np.any(f < -tol):
        j = int(np.argmin(f))
        return ProbeReport("polya", Outcome.FAIL, float(f[j]), {"t": float(t[j]), "f": float(f[j])}, settings)
    if np.any(rises > tol):
        j = int(np.argmax(rises))
        return ProbeReport("polya", Outcome.FAIL, -float(slopes[j]),
                           {"t": float(t[j]), "slope": float(slopes[j])}, settings)
    if np.any(curv < -(noise_curv + tol)):
        j = int(np.argmin(curv + noise_curv))
        return ProbeReport("polya", Outcome.FAIL, float(curv[j]),
                           {"t": float(t[j + 1]), "slope_change": float(curv[j])}, settings)
    if exact is not None and exact.verdict is not Verdict.CONVEX:
        return ProbeReport("polya", Outcome.INCONCLUSIVE, 0.0, {"exact_verdict": exact.verdict.value}, settings)
    margin = float(np.min(curv + noise_curv)) if curv.size else 0.0
    return ProbeReport("polya", Outcome.PASS, margin, None, settings)


def growth_obstruction_probe(params, x_max: float = 1e6, num: int = 241) -> ProbeReport:
    """Growth of ``g(x)/(1 + x**2)`` on ``[1, x_max]``.

    A continuous cnd function grows at most quadratically, so a ratio that is
    still increasing over the top half of the log grid and exceeds ten times
    its value at ``x = 1`` marks ``g`` as not cnd (PASS = obstruction
    present).  Otherwise the report is FAIL with ``bounded`` set.
    """
    if isinstance(params, KernelParams):
        if params.direction is not Direction.G:
            raise ValueError("growth obstruction applies to g (direction G)")
    else:
        params = KernelParams(float(params), Direction.G)
    x = np.geomspace(1.0, x_max, num)
    ratio = eval_g(params, x) / (1 + x * x)
    tail = ratio[num // 2:]
    increasing = bool(np.all(np.diff(tail) > 0))
    growth = float(ratio[-1] / ratio[0])
    settings = {"r": params.r, "x_max": x_max, "num": num}
    witness = {"ratio_at_1": float(ratio[0]), "ratio_at_x_max": float(ratio[-1]),
               "growth_factor": growth, "tail_increasing": increasing}
    if increasing and growth > 10:
        return ProbeReport("growth_obstruction", Outcome.PASS, growth, witness, settings)
    return ProbeReport("growth_obstruction", Outcome.FAIL, growth, dict(witness, bounded=True), settings)


def factorization_check_r4(t_grid=None, tol: float = 1e-12) -> ProbeReport:
    """``f`` at ``r = 4`` against ``1/((1 + t)(1 + t**2))``."""
    t = (np.unique(np.append(np.linspace(0, 100, 10_000), 1.0))
         if t_grid is None else np.asarray(t_grid, dtype=float))
    f4 = eval_f(4, t)
    ref = 1.0 / ((1 + t) * (1 + t * t))
    dev = np.abs(f4 - ref) / np.abs(f4)
    i = int(np.argmax(dev))
    settings = {"n_points": int(t.size), "tol": tol}
    if dev[i] <= tol:
        return ProbeReport("factorization_r4", Outcome.PASS, float(dev[i]), None, settings)
    return ProbeReport("factorization_r4", Outcome.FAIL, float(dev[i]),
                       {"t": float(t[i]), "f4": float(f4[i]), "product": float(ref[i])}, settings)

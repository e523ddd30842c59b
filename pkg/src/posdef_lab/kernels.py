"""Radial kernel family ``f(t) = (1 - t) / (1 - t**r)`` and its reciprocal.

All evaluators take the nonnegative radial variable ``t = ||x||`` (scalar or
array) and never see the point ``x`` itself.  The value at ``t = 1`` is the
removable limit ``1/r`` for ``f`` and ``r`` for ``g``.

Near ``t = 1`` the quotient is evaluated in the cancellation-free form

    f(1 + u) = u / expm1(r * log1p(u))

inside a band ``|t - 1| < delta``.  Outside the band the same quotient is
formed from ``expm1`` of ``r * log(t)`` (and of ``-r * log(t)`` for ``t > 1``
so that large ``t`` does not overflow).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DEFAULT_BAND",
    "DomainError",
    "Direction",
    "KernelParams",
    "EvalGrid",
    "eval_f",
    "eval_g",
    "eval_h",
    "eval_kernel",
    "eval_f_prime",
    "eval_f_second",
    "eval_f_complex",
    "eval_f_naive",
]

DEFAULT_BAND = 1e-3

# Number of binomial-series terms used for the derivatives inside the band.
_SERIES_TERMS = 14


class DomainError(ValueError):
    """Argument outside the domain of a kernel evaluator."""


class Direction(str, enum.Enum):
    F = "F"
    G = "G"


@dataclass(frozen=True)
class KernelParams:
    """Exponent ``r`` plus the choice between ``f`` and ``g = 1/f``.

    ``exact_r`` optionally pins ``r`` to a reduced fraction ``(p, q)``; it is
    what the exact polynomial module consumes.
    """

    r: float
    direction: Direction = Direction.F
    exact_r: tuple[int, int] | None = None

    def __post_init__(self):
        r = float(self.r)
        if not (r > 0 and math.isfinite(r)):
            raise DomainError(f"exponent r must be positive and finite, got {self.r!r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.exact_r is not None:
            p, q = (int(v) for v in self.exact_r)
            if p < 1 or q < 1:
                raise DomainError(f"exact exponent needs p, q >= 1, got {p}/{q}")
            if math.gcd(p, q) != 1:
                raise DomainError(f"exact exponent {p}/{q} is not in lowest terms")
            if abs(p / q - r) > math.ulp(r):
                raise DomainError(f"exact exponent {p}/{q} does not match r={r!r}")
            object.__setattr__(self, "exact_r", (p, q))

    @classmethod
    def from_fraction(cls, value, direction=Direction.F) -> "KernelParams":
        frac = Fraction(value)
        return cls(float(frac), direction, (frac.numerator, frac.denominator))

    @classmethod
    def parse(cls, text: str, direction=Direction.F) -> "KernelParams":
        """Accept ``"3/2"`` (exact) or a decimal such as ``"3.5"`` (float only)."""
        text = text.strip()
        if "/" in text:
            return cls.from_fraction(Fraction(text), direction)
        return cls(float(text), direction)

    @property
    def fraction(self) -> Fraction | None:
        if self.exact_r is None:
            return None
        return Fraction(*self.exact_r)

    def with_direction(self, direction) -> "KernelParams":
        return KernelParams(self.r, direction, self.exact_r)

    def describe(self) -> str:
        name = "f" if self.direction is Direction.F else "g"
        r = f"{self.exact_r[0]}/{self.exact_r[1]}" if self.exact_r else repr(self.r)
        return f"{name}[r={r}]"

    def to_dict(self) -> dict:
        return {"r": self.r, "direction": self.direction.value,
                "exact_r": list(self.exact_r) if self.exact_r else None}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelParams":
        exact = d.get("exact_r")
        return cls(d["r"], d.get("direction", "F"), tuple(exact) if exact else None)


@dataclass(frozen=True)
class EvalGrid:
    points: np.ndarray
    near_one_band: float = DEFAULT_BAND

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size and (pts.min() < 0 or np.any(np.diff(pts) < 0)):
            raise DomainError("grid points must be nonnegative and sorted ascending")
        if not 0 < self.near_one_band < 1:
            raise DomainError("band half-width must lie in (0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def logspace(cls, lo, hi, num, band=DEFAULT_BAND) -> "EvalGrid":
        return cls(np.geomspace(lo, hi, num), band)


def _as_params(params) -> KernelParams:
    if isinstance(params, KernelParams):
        return params
    return KernelParams(float(params))


def _radial(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("radial argument must be nonnegative")
    return arr, arr.ndim == 0


def _check_band(delta):
    if not 0 < delta < 1:
        raise DomainError(f"band half-width must lie in (0, 1), got {delta!r}")


def _finish(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def _f_array(r: float, t: np.ndarray, delta: float) -> np.ndarray:
    out = np.empty(np.shape(t))
    if r == 1.0:
        out.fill(1.0)
        return out
    u = t - 1.0
    at_one = t == 1.0
    band = (np.abs(u) < delta) & ~at_one
    lo = (t < 1.0) & ~band & ~at_one
    hi = (t > 1.0) & ~band & ~at_one
    out[at_one] = 1.0 / r
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        ub = u[band]
        out[band] = ub / np.expm1(r * np.log1p(ub))
        tl = t[lo]
        out[lo] = (1.0 - tl) / -np.expm1(r * np.log(tl))
        th = t[hi]
        out[hi] = (th - 1.0) * th ** (-r) / -np.expm1(-r * np.log(th))
    return out


def _g_array(r: float, t: np.ndarray, delta: float) -> np.ndarray:
    out = np.empty(np.shape(t))
    if r == 1.0:
        out.fill(1.0)
        return out
    u = t - 1.0
    at_one = t == 1.0
    band = (np.abs(u) < delta) & ~at_one
    lo = (t < 1.0) & ~band & ~at_one
    hi = (t > 1.0) & ~band & ~at_one
    out[at_one] = r
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        ub = u[band]
        out[band] = np.expm1(r * np.log1p(ub)) / ub
        tl = t[lo]
        out[lo] = -np.expm1(r * np.log(tl)) / (1.0 - tl)
        th = t[hi]
        out[hi] = -np.expm1(-r * np.log(th)) / ((th - 1.0) * th ** (-r))
    return out


def eval_f(params, t, band: float = DEFAULT_BAND):
    """Evaluate ``f(t) = (1 - t)/(1 - t**r)``, with ``f(1) = 1/r``.

    Parameters
    ----------
    params : KernelParams or float
        Exponent ``r`` (the direction flag is ignored here).
    t : float or array_like
        Nonnegative radial argument.
    band : float
        Half-width of the series band around ``t = 1``.
    """
    p = _as_params(params)
    _check_band(band)
    arr, scalar = _radial(t)
    return _finish(_f_array(p.r, arr, band), scalar)


def eval_g(params, t, band: float = DEFAULT_BAND):
    """Evaluate ``g(t) = (1 - t**r)/(1 - t) = 1/f(t)``, with ``g(1) = r``."""
    p = _as_params(params)
    _check_band(band)
    arr, scalar = _radial(t)
    return _finish(_g_array(p.r, arr, band), scalar)


def eval_kernel(params: KernelParams, t, band: float = DEFAULT_BAND):
    """Dispatch on ``params.direction``."""
    if params.direction is Direction.G:
        return eval_g(params, t, band)
    return eval_f(params, t, band)


def eval_h(params, s, band: float = DEFAULT_BAND):
    """``h(s) = (1 - s**(1/2))/(1 - s**(r/2))``, i.e. ``f`` at ``t = sqrt(s)``."""
    arr, scalar = _radial(s)
    return _finish(np.asarray(eval_f(params, np.sqrt(arr), band)), scalar)


def eval_f_naive(params, t):
    """Textbook quotient ``(1 - t)/(1 - t**r)`` without any band treatment.

    Only meant as a comparison point for the stable evaluator.
    """
    p = _as_params(params)
    arr, scalar = _radial(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (1.0 - arr) / (1.0 - arr**p.r)
    return _finish(out, scalar)


def _series_coefficients(r: float, terms: int) -> np.ndarray:
    # c_k = binom(r, k + 1), so that ((1+u)**r - 1)/u = sum c_k u**k
    c = np.empty(terms)
    b = 1.0
    for k in range(terms):
        b *= (r - k) / (k + 1)
        c[k] = b
    return c


def _band_derivatives(r: float, u: np.ndarray):
    c = _series_coefficients(r, _SERIES_TERMS)
    k = np.arange(_SERIES_TERMS)
    d0 = np.polynomial.polynomial.polyval(u, c)
    d1 = np.polynomial.polynomial.polyval(u, (k * c)[1:])
    d2 = np.polynomial.polynomial.polyval(u, (k * (k - 1) * c)[2:])
    return d0, d1, d2


def _derivative_args(params, t, band):
    p = _as_params(params)
    _check_band(band)
    if not p.r > 1:
        raise DomainError(f"derivative formulas need r > 1, got r={p.r!r}")
    arr, scalar = _radial(t)
    return p.r, arr, scalar


def eval_f_prime(params, t, band: float = DEFAULT_BAND):
    """First derivative of ``f`` for ``r > 1``.

    Uses ``((1-r) t**r + r t**(r-1) - 1)/(1 - t**r)**2`` off the band
    (rescaled by ``t**(-2r)`` for ``t > 1``) and the binomial series of
    ``((1+u)**r - 1)/u`` inside it.
    """
    r, t, scalar = _derivative_args(params, t, band)
    out = np.empty(np.shape(t))
    u = t - 1.0
    band_mask = np.abs(u) < band
    lo = (t < 1.0) & ~band_mask
    hi = (t > 1.0) & ~band_mask
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        d0, d1, _ = _band_derivatives(r, u[band_mask])
        out[band_mask] = -d1 / d0**2
        x = t[lo]
        xr = x**r
        out[lo] = ((1 - r) * xr + r * x ** (r - 1) - 1) / (1 - xr) ** 2
        x = t[hi]
        xm = x ** (-r)
        out[hi] = ((1 - r) * xm + r * xm / x - xm * xm) / (xm - 1) ** 2
    return _finish(out, scalar)


def eval_f_second(params, t, band: float = DEFAULT_BAND):
    """Second derivative of ``f`` for ``r > 1``, i.e. ``phi(t)/(1 - t**r)**3``.

    ``phi(t) = r(1-r) t**(2r-1) + r(1+r) t**(2r-2) - r(1+r) t**(r-1) - r(1-r) t**(r-2)``.
    At ``t = 0`` this is ``+inf`` for ``1 < r < 2``, ``2`` for ``r = 2`` and
    ``0`` for ``r > 2``.
    """
    r, t, scalar = _derivative_args(params, t, band)
    out = np.empty(np.shape(t))
    u = t - 1.0
    band_mask = np.abs(u) < band
    lo = (t < 1.0) & ~band_mask
    hi = (t > 1.0) & ~band_mask
    a, b = r * (1 - r), r * (1 + r)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        d0, d1, d2 = _band_derivatives(r, u[band_mask])
        out[band_mask] = (2 * d1**2 - d0 * d2) / d0**3
        x = t[lo]
        xr = x**r
        phi = (a * x ** (2 * r - 1) + b * x ** (2 * r - 2)
               - b * x ** (r - 1) - a * x ** (r - 2))
        out[lo] = phi / (1 - xr) ** 3
        x = t[hi]
        xm = x ** (-r)
        # phi(x) * x**(-3r) over (x**(-r) - 1)**3 with the sign of (1 - x**r)**3 folded in
        scaled = (a * xm / x + b * xm / (x * x) - b * xm * xm / x - a * xm * xm / (x * x))
        out[hi] = scaled / (xm - 1) ** 3
    return _finish(out, scalar)


def eval_f_complex(z, p: float, q: float):
    """Principal-branch ``(1 - z**q)/(1 - z**p)`` on the open upper half-plane.

    ``z**a`` means ``exp(a * Log z)`` with ``Arg z`` in ``(-pi, pi]``.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(~(arr.imag > 0)):
        raise DomainError("complex evaluator requires Im z > 0")
    if not (p > 0 and q > 0):
        raise DomainError("exponents must be positive")
    if p == q:
        out = np.ones(arr.shape, dtype=complex)
    else:
        logz = np.log(arr)
        den = np.expm1(p * logz)
        num = np.expm1(q * logz)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, q / p, num / den)
    return complex(out) if arr.ndim == 0 else out

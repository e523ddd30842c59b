"""Exact sign analysis of the numerators of ``f''`` and of ``f f'' - f'^2``.

For rational ``r = p/q`` the substitution ``x = t**q`` turns the fractional
powers of ``x`` into integer powers of ``t``; a positive monomial factor then
moves the lowest exponent to zero.  Neither step changes signs on
``(0, inf)``, so Descartes' rule of signs on the resulting polynomial,
combined with the order of the zero at ``t = 1``, settles the sign of the
original expression on each side of 1.

Everything here is exact (:class:`fractions.Fraction`); no floats enter the
arithmetic.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

logger = logging.getLogger(__name__)

__all__ = [
    "RationalPoly",
    "Sign",
    "SignReport",
    "Verdict",
    "TheoremResult",
    "build_phi_poly",
    "build_psi_poly",
    "phi_float",
    "psi_float",
    "descartes_sign_changes",
    "multiplicity_at_one",
    "sign_analysis",
    "verify_convexity",
    "verify_logconvexity",
]


@dataclass(frozen=True)
class RationalPoly:
    """Sparse polynomial in ``t`` with exact rational coefficients.

    ``terms`` holds ``(exponent, coefficient)`` pairs by strictly decreasing
    exponent, with no zero coefficients.  Use :meth:`from_terms` to build one
    from unsorted, possibly repeated monomials.
    """

    terms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(c == 0 for _, c in self.terms):
            raise ValueError("zero coefficient in RationalPoly")
        if any(a <= b for a, b in zip(exps, exps[1:])) or any(e < 0 for e in exps):
            raise ValueError("exponents must be nonnegative and strictly decreasing")

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, Fraction]], normalize=True) -> "RationalPoly":
        acc: dict[int, Fraction] = {}
        for e, c in terms:
            acc[int(e)] = acc.get(int(e), Fraction(0)) + Fraction(c)
        acc = {e: c for e, c in acc.items() if c != 0}
        if normalize and acc:
            shift = min(acc)
            acc = {e - shift: c for e, c in acc.items()}
        return cls(tuple(sorted(acc.items(), reverse=True)))

    @classmethod
    def from_dense(cls, coeffs_descending) -> "RationalPoly":
        n = len(coeffs_descending) - 1
        return cls.from_terms(((n - i, c) for i, c in enumerate(coeffs_descending)), normalize=False)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return self.terms[0][0] if self.terms else -1

    @property
    def coefficients(self) -> list[Fraction]:
        return [c for _, c in self.terms]

    def dense(self) -> list[Fraction]:
        """Coefficients by descending exponent, zeros included."""
        out = [Fraction(0)] * (self.degree + 1)
        for e, c in self.terms:
            out[self.degree - e] = c
        return out

    def __call__(self, t):
        """Evaluate; exact for ``Fraction``/``int`` input, float otherwise."""
        if isinstance(t, (int, Fraction)):
            return sum((c * Fraction(t) ** e for e, c in self.terms), Fraction(0))
        return math.fsum(float(c) * float(t) ** e for e, c in self.terms)

    def to_json(self) -> list[list[int]]:
        return [[e, c.numerator, c.denominator] for e, c in self.terms]

    @classmethod
    def from_json(cls, data) -> "RationalPoly":
        return cls(tuple((int(e), Fraction(int(n), int(d))) for e, n, d in data))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            coef = str(abs(c)) if (abs(c) != 1 or e == 0) else ""
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {coef}{'*' if coef and mono else ''}{mono}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _check_pq(p: int, q: int):
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need coprime positive integers, got {p}/{q}")
    if p <= q:
        raise ValueError(f"r = {p}/{q} must exceed 1")


def _substitute(p: int, q: int, monomials) -> RationalPoly:
    # x**(a + b r) with r = p/q becomes t**(q a + p b)
    return RationalPoly.from_terms((q * a + p * b, c) for (a, b), c in monomials)


def _phi_monomials(r: Fraction):
    # (constant part, multiple of r) of each x-exponent, with coefficient
    return [
        ((-1, 2), r * (1 - r)),
        ((-2, 2), r * (1 + r)),
        ((-1, 1), -r * (1 + r)),
        ((-2, 1), -r * (1 - r)),
    ]


def _psi_monomials(r: Fraction):
    return [
        ((0, 2), r - 1),
        ((-1, 2), -2 * r),
        ((-2, 2), r),
        ((0, 1), r * r - r + 2),
        ((-1, 1), -2 * r * (r - 1)),
        ((0, 0), Fraction(-1)),
        ((-2, 1), r * (r - 1)),
    ]


def build_phi_poly(p: int, q: int) -> RationalPoly:
    """Cleared numerator of ``f''`` for ``r = p/q > 1``.

    Lands on ``r(1-r) t**(p+q) + r(1+r) t**p - r(1+r) t**q - r(1-r)``.
    """
    _check_pq(p, q)
    return _substitute(p, q, _phi_monomials(Fraction(p, q)))


def build_psi_poly(p: int, q: int) -> RationalPoly:
    """Cleared numerator of ``f f'' - f'^2`` (up to ``(1 - x**r)**4``), ``r = p/q > 1``."""
    _check_pq(p, q)
    return _substitute(p, q, _psi_monomials(Fraction(p, q)))


def _float_sum(monomials, r: float, x: float) -> float:
    return math.fsum(float(c) * x ** (a + b * r) for (a, b), c in monomials)


def phi_float(r: float, x: float) -> float:
    """Floating evaluation of ``phi(x)`` straight from its four-term definition."""
    r = float(r)
    return _float_sum(_phi_monomials(r), r, x)


def psi_float(r: float, x: float) -> float:
    """Floating evaluation of ``psi(x)`` straight from its seven-term definition."""
    r = float(r)
    return _float_sum(_psi_monomials(r), r, x)


def descartes_sign_changes(poly: RationalPoly) -> int:
    """Sign changes in the coefficient sequence by descending exponent."""
    if poly.is_zero:
        raise ValueError("zero polynomial has no sign pattern")
    signs = [c > 0 for c in poly.coefficients]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def multiplicity_at_one(poly: RationalPoly) -> int:
    """Largest ``k`` with ``(t - 1)**k`` dividing ``poly`` (exact synthetic division)."""
    if poly.is_zero:
        raise ValueError("zero polynomial has unbounded multiplicity")
    coeffs = poly.dense()
    k = 0
    while len(coeffs) > 1:
        quotient = [coeffs[0]]
        for c in coeffs[1:]:
            quotient.append(c + quotient[-1])
        if quotient.pop() != 0:
            break
        coeffs = quotient
        k += 1
    return k


class Sign(str, enum.Enum):
    POS = "+"
    NEG = "-"
    ZERO = "0"


def _sign(c) -> Sign:
    return Sign.POS if c > 0 else Sign.NEG if c < 0 else Sign.ZERO


@dataclass(frozen=True)
class SignReport:
    sign_changes: int
    multiplicity_at_one: int
    sign_left: Sign
    sign_right: Sign
    conclusive: bool

    def to_dict(self) -> dict:
        return {"sign_changes": self.sign_changes,
                "multiplicity_at_one": self.multiplicity_at_one,
                "sign_left": self.sign_left.value, "sign_right": self.sign_right.value,
                "conclusive": self.conclusive}


def sign_analysis(poly: RationalPoly) -> SignReport:
    """Signs of ``poly`` on ``(0, 1)`` and ``(1, inf)``.

    When the Descartes count equals the multiplicity of the root at 1, every
    positive root sits at 1, so the sign on each side is that of the lowest
    and the leading coefficient respectively.  Otherwise the report is
    marked inconclusive; the side signs are then only the endpoint
    behaviour near 0 and near infinity.
    """
    changes = descartes_sign_changes(poly)
    mult = multiplicity_at_one(poly)
    return SignReport(
        sign_changes=changes,
        multiplicity_at_one=mult,
        sign_left=_sign(poly.terms[-1][1]),
        sign_right=_sign(poly.terms[0][1]),
        conclusive=changes == mult,
    )


class Verdict(str, enum.Enum):
    CONVEX = "CONVEX"
    NOT_CONVEX = "NOT_CONVEX"
    LOG_CONVEX = "LOG_CONVEX"
    NOT_LOG_CONVEX = "NOT_LOG_CONVEX"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class TheoremResult:
    """Verdict for one exponent plus the evidence it rests on.

    ``witness`` (if any) is an exact rational ``t`` with the polynomial value
    there; ``x = t**q`` is the corresponding point of the original variable.
    """

    verdict: Verdict
    r: Fraction
    poly: RationalPoly | None
    report: SignReport | None
    witness: dict | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "poly": self.poly.to_json() if self.poly is not None else None,
            "report": self.report.to_dict() if self.report else None,
            "witness": self.witness,
            "notes": self.notes,
        }


def _as_pq(p, q=None) -> tuple[int, int]:
    frac = Fraction(p) if q is None else Fraction(p, q)
    return frac.numerator, frac.denominator


def verify_convexity(p, q=None) -> TheoremResult:
    """Decide convexity (and monotone decrease) of ``f`` for rational ``r > 1``.

    ``f'' = phi/(1 - x**r)**3`` and ``(1 - x**r)**3`` is positive on ``(0,1)``
    and negative on ``(1, inf)``, so ``f'' >= 0`` exactly when ``phi`` is
    ``+`` left of 1 and ``-`` right of it.
    """
    p, q = _as_pq(p, q)
    r = Fraction(p, q)
    poly = build_phi_poly(p, q)
    report = sign_analysis(poly)
    if not report.conclusive:
        logger.warning("phi sign analysis inconclusive at r=%s: %s", r, report)
        return TheoremResult(Verdict.INCONCLUSIVE, r, poly, report,
                             notes="Descartes count exceeds multiplicity at 1")
    if report.sign_left is Sign.POS and report.sign_right is Sign.NEG:
        return TheoremResult(Verdict.CONVEX, r, poly, report)
    return TheoremResult(Verdict.NOT_CONVEX, r, poly, report)


def _negative_witness(poly: RationalPoly, q: int, max_halvings: int = 400) -> dict | None:
    t = Fraction(1, 2)
    for _ in range(max_halvings):
        value = poly(t)
        if value < 0:
            return {"t": str(t), "x": str(t**q), "value": str(value), "value_float": float(value)}
        t /= 2
    return None


def verify_logconvexity(p, q=None) -> TheoremResult:
    """Decide log-convexity of ``f`` on ``(0, inf)`` for rational ``r >= 1``.

    Log-convexity is ``psi >= 0``.  A conclusive sign analysis with both
    sides positive proves it; an exact rational ``t`` with ``psi(t) < 0``
    refutes it.
    """
    p, q = _as_pq(p, q)
    r = Fraction(p, q)
    if r < 1:
        raise ValueError(f"log-convexity check needs r >= 1, got {r}")
    if r == 1:
        # f is identically 1 and psi vanishes identically
        return TheoremResult(Verdict.LOG_CONVEX, r, None, None, notes="f is constant")
    poly = build_psi_poly(p, q)
    report = sign_analysis(poly)
    if report.conclusive and report.sign_left is Sign.POS and report.sign_right is Sign.POS:
        return TheoremResult(Verdict.LOG_CONVEX, r, poly, report)
    witness = _negative_witness(poly, q)
    if witness is not None:
        return TheoremResult(Verdict.NOT_LOG_CONVEX, r, poly, report, witness=witness,
                             notes=f"psi(0) = {poly(0)}")
    logger.warning("psi sign analysis inconclusive at r=%s: %s", r, report)
    return TheoremResult(Verdict.INCONCLUSIVE, r, poly, report,
                         notes="no conclusive sign pattern and no negative witness found")

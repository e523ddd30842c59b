"""Kernel matrices on point configurations and their positivity verdicts.

A verdict is read off the smallest eigenvalue of a dense symmetric
eigensolve.  ``psd_verdict`` looks at the whole space; ``cnd_verdict``
restricts ``-A`` to the vectors with zero component sum through an explicit
orthonormal basis, so the witness can be mapped back and checked.

Violations that are small in absolute terms (below ``CONFIRM_BELOW``) are
re-checked by evaluating the quadratic form of the witness exactly
(error-free products summed with ``math.fsum``) before they are reported.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.spatial.distance import pdist, squareform

from .kernels import KernelParams, eval_kernel

__all__ = [
    "CONFIRM_BELOW",
    "KERNEL_ENTRY_RTOL",
    "EigensolverError",
    "Generator",
    "PointConfig",
    "SymMatrix",
    "Status",
    "Subspace",
    "PositivityVerdict",
    "InfDivResult",
    "kernel_matrix",
    "build_kernel_matrix",
    "default_tolerance",
    "min_eigenvalue",
    "sum_zero_basis",
    "exact_quadratic_form",
    "psd_verdict",
    "cnd_verdict",
    "hadamard_power",
    "infdiv_probe",
    "sampled_min_form",
]

CONFIRM_BELOW = 1e-6
# Relative accuracy promised by the kernel evaluators; bounds how far a
# stored entry may sit from the true kernel value.
KERNEL_ENTRY_RTOL = 1e-13


class EigensolverError(RuntimeError):
    pass


class Generator(str, enum.Enum):
    RANDOM_GAUSSIAN = "RANDOM_GAUSSIAN"
    GRID_LINE = "GRID_LINE"
    SIMPLEX = "SIMPLEX"
    SCALED_LATTICE = "SCALED_LATTICE"
    EXPLICIT = "EXPLICIT"


def _lattice_points(m: int, n: int) -> np.ndarray:
    k = 1
    while True:
        cube = np.array(list(itertools.product(range(-k, k + 1), repeat=n)), dtype=float)
        norms = np.einsum("ij,ij->i", cube, cube)
        inside = norms <= k * k
        if inside.sum() >= m:
            pts, nrm = cube[inside], norms[inside]
            # by norm, ties broken lexicographically
            order = np.lexsort(tuple(pts.T[::-1]) + (nrm,))
            return pts[order[:m]]
        k += 1


def _simplex_points(m: int, n: int) -> np.ndarray:
    if m > n + 1:
        raise ValueError(f"a simplex in R^{n} has at most {n + 1} vertices, asked for {m}")
    pts = np.zeros((m, n))
    c = 1 / math.sqrt(2)
    for i in range(min(m, n)):
        pts[i, i] = c
    if m == n + 1:
        # equidistant (distance 1) from every c * e_i
        pts[n, :] = (math.sqrt(2) - math.sqrt(2 + 2 * n)) / (2 * n)
    return pts


@dataclass(frozen=True)
class PointConfig:
    """``m`` points in ``R^n`` plus the recipe that produced them.

    Recipes (``scale`` multiplies every coordinate):

    * ``RANDOM_GAUSSIAN``: i.i.d. standard normal coordinates from
      ``numpy.random.default_rng(seed)``.
    * ``GRID_LINE``: ``0, 1, ..., m-1`` along the first axis.
    * ``SIMPLEX``: vertices of a regular simplex with unit edges (``m <= n+1``).
    * ``SCALED_LATTICE``: the ``m`` points of ``Z^n`` closest to the origin,
      ties broken lexicographically (``seed`` unused).
    * ``EXPLICIT``: points given by the caller.
    """

    generator: Generator
    m: int
    n: int
    seed: int
    scale: float
    points: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape != (self.m, self.n) or self.m < 1:
            raise ValueError(f"expected {self.m} points of dimension {self.n}, got shape {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "generator", Generator(self.generator))

    @classmethod
    def generate(cls, generator, m: int, n: int, seed: int = 0, scale: float = 1.0) -> "PointConfig":
        generator = Generator(generator)
        if generator is Generator.RANDOM_GAUSSIAN:
            base = np.random.default_rng(seed).standard_normal((m, n))
        elif generator is Generator.GRID_LINE:
            base = np.zeros((m, n))
            base[:, 0] = np.arange(m)
        elif generator is Generator.SIMPLEX:
            base = _simplex_points(m, n)
        elif generator is Generator.SCALED_LATTICE:
            base = _lattice_points(m, n)
        else:
            raise ValueError("EXPLICIT configurations are built with PointConfig.explicit")
        return cls(generator, m, n, int(seed), float(scale), base * scale)

    @classmethod
    def explicit(cls, points) -> "PointConfig":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 1 and np.ndim(points) == 1:
            pts = pts.T  # a flat list means points on the line
        return cls(Generator.EXPLICIT, pts.shape[0], pts.shape[1], 0, 1.0, pts)

    def ref(self) -> dict:
        return {"generator": self.generator.value, "seed": self.seed, "m": self.m,
                "n": self.n, "scale": self.scale}

    def to_dict(self) -> dict:
        d = self.ref()
        if self.generator is Generator.EXPLICIT:
            d["points"] = self.points.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PointConfig":
        if Generator(d["generator"]) is Generator.EXPLICIT:
            return cls.explicit(d["points"])
        return cls.generate(d["generator"], d["m"], d["n"], d.get("seed", 0), d.get("scale", 1.0))

    def permuted(self, perm) -> "PointConfig":
        return PointConfig.explicit(self.points[np.asarray(perm)])

    def translated(self, shift) -> "PointConfig":
        return PointConfig.explicit(self.points + np.asarray(shift, dtype=float))


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix with a note of where it came from.

    ``entry_rtol`` bounds the relative error of each stored entry against the
    exact value it represents (0 for matrices given exactly).
    """

    entries: np.ndarray = field(repr=False)
    provenance: dict = field(default_factory=dict, compare=False)
    entry_rtol: float = 0.0

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"square matrix expected, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def checksum(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.entries).tobytes()).hexdigest()

    def to_dict(self) -> dict:
        return {"order": self.order, "entries": self.entries.tolist(),
                "provenance": self.provenance, "entry_rtol": self.entry_rtol,
                "sha256": self.checksum()}


def kernel_matrix(points, fn: Callable[[np.ndarray], np.ndarray], provenance=None,
                  entry_rtol: float = 0.0) -> SymMatrix:
    """``[fn(||x_i - x_j||)]`` with each unordered pair evaluated once."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    m = pts.shape[0]
    d = pdist(pts) if m > 1 else np.zeros(0)
    vals = np.asarray(fn(d), dtype=float)
    a = squareform(vals, checks=False) if m > 1 else np.zeros((1, 1))
    np.fill_diagonal(a, np.asarray(fn(np.zeros(1)), dtype=float)[0])
    return SymMatrix(a, provenance or {}, entry_rtol)


def build_kernel_matrix(config: PointConfig, params: KernelParams) -> SymMatrix:
    prov = {"kernel": params.to_dict(), "config": config.to_dict()}
    return kernel_matrix(config.points, lambda d: eval_kernel(params, d), prov, KERNEL_ENTRY_RTOL)


def default_tolerance(a: np.ndarray) -> float:
    """``1e-9 * order * max|entry|``, the eigensolver's backward-error scale."""
    a = np.asarray(a)
    return 1e-9 * a.shape[0] * float(np.max(np.abs(a))) if a.size else 0.0


def min_eigenvalue(matrix) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a unit eigenvector (LAPACK ``syevr``)."""
    a = matrix.entries if isinstance(matrix, SymMatrix) else np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(a)):
        raise EigensolverError("matrix has non-finite entries")
    try:
        w, v = scipy.linalg.eigh(a, subset_by_index=[0, 0], driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"symmetric eigensolve failed: {exc}") from exc
    return float(w[0]), v[:, 0]


def sum_zero_basis(m: int) -> np.ndarray:
    """Orthonormal ``m x (m-1)`` basis of the complement of the all-ones vector.

    Columns 2..m of the Householder reflector sending ``e_1`` to
    ``ones/sqrt(m)``.
    """
    if m < 2:
        raise ValueError("sum-zero subspace needs m >= 2")
    v = np.full(m, 1 / math.sqrt(m))
    v[0] -= 1.0
    h = np.eye(m) - 2.0 * np.outer(v, v) / (v @ v)
    return h[:, 1:]


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def _two_product(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def exact_quadratic_form(a: np.ndarray, w: np.ndarray) -> float:
    """Correctly rounded ``w^T a w`` for float data (Dekker products, fsum)."""
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    c_hi, c_lo = _two_product(w[:, None], w[None, :])
    p1, e1 = _two_product(a, c_hi)
    p2, e2 = _two_product(a, c_lo)
    return math.fsum(np.concatenate([p1.ravel(), e1.ravel(), p2.ravel(), e2.ravel()]).tolist())


class Status(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    VIOLATED = "VIOLATED"
    # eigenvalue below -tol but the exact witness form does not confirm it
    INCONCLUSIVE = "INCONCLUSIVE"


class Subspace(str, enum.Enum):
    FULL = "FULL"
    SUM_ZERO = "SUM_ZERO"


@dataclass(frozen=True)
class PositivityVerdict:
    """Outcome of a psd (``FULL``) or cnd (``SUM_ZERO``) test.

    ``min_eigenvalue`` belongs to the operator actually tested: ``A`` itself
    for psd, ``-A`` compressed to the sum-zero subspace for cnd.  ``witness``
    is a unit vector in the original coordinates attaining it.
    """

    status: Status
    min_eigenvalue: float
    tolerance: float
    subspace: Subspace
    witness: np.ndarray | None = field(default=None, repr=False, compare=False)
    confirmed_form: float | None = None

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    @property
    def violated(self) -> bool:
        return self.status is Status.VIOLATED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "subspace": self.subspace.value,
            "witness": None if self.witness is None else self.witness.tolist(),
            "confirmed_form": self.confirmed_form,
        }


def _decide(op: np.ndarray, lam: float, w: np.ndarray, tol: float, entry_rtol: float,
            subspace: Subspace) -> PositivityVerdict:
    if lam >= -tol:
        return PositivityVerdict(Status.CERTIFIED, lam, tol, subspace, w)
    if abs(lam) >= CONFIRM_BELOW:
        return PositivityVerdict(Status.VIOLATED, lam, tol, subspace, w)
    form = exact_quadratic_form(op, w) / float(w @ w)
    # how far the form can move if every entry is off by entry_rtol
    slack = entry_rtol * float(np.abs(w) @ np.abs(op) @ np.abs(w))
    status = Status.VIOLATED if form < -max(slack, 0.5 * tol) else Status.INCONCLUSIVE
    return PositivityVerdict(status, lam, tol, subspace, w, form)


def _entries(matrix) -> tuple[np.ndarray, float]:
    if isinstance(matrix, SymMatrix):
        return matrix.entries, matrix.entry_rtol
    return SymMatrix(matrix).entries, 0.0


def psd_verdict(matrix, tol: float | None = None) -> PositivityVerdict:
    """CERTIFIED iff the smallest eigenvalue is at least ``-tol``."""
    a, rtol = _entries(matrix)
    if tol is None:
        tol = default_tolerance(a)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    lam, w = min_eigenvalue(a)
    return _decide(a, lam, w, tol, rtol, Subspace.FULL)


def cnd_verdict(matrix, tol: float | None = None) -> PositivityVerdict:
    """CERTIFIED iff ``-A`` is psd on the sum-zero subspace up to ``tol``."""
    a, rtol = _entries(matrix)
    m = a.shape[0]
    if tol is None:
        tol = default_tolerance(a)
    q = sum_zero_basis(m)
    b = -(q.T @ a @ q)
    b = 0.5 * (b + b.T)
    lam, y = min_eigenvalue(b)
    w = q @ y
    return _decide(-a, lam, w, tol, rtol, Subspace.SUM_ZERO)


def hadamard_power(matrix, alpha: float) -> SymMatrix:
    """Entrywise ``alpha``-th power of a matrix with positive entries."""
    a, rtol = _entries(matrix)
    if not alpha > 0:
        raise ValueError("Hadamard exponent must be positive")
    if np.any(a <= 0):
        raise ValueError("Hadamard power needs strictly positive entries")
    prov = dict(matrix.provenance) if isinstance(matrix, SymMatrix) else {}
    prov["hadamard_alpha"] = alpha * prov.get("hadamard_alpha", 1.0)
    out = a if alpha == 1 else np.power(a, alpha)
    return SymMatrix(out, prov, rtol * max(1.0, alpha) + 4e-16)


@dataclass(frozen=True)
class InfDivResult:
    worst: PositivityVerdict
    table: list[tuple[float, PositivityVerdict]]

    @property
    def certified(self) -> bool:
        return all(v.certified for _, v in self.table)


def infdiv_probe(config: PointConfig, params: KernelParams, alphas: Sequence[float],
                 tol: float | None = None) -> InfDivResult:
    """psd test of every Hadamard power ``alpha`` of the kernel matrix.

    ``worst`` is the verdict with the smallest eigenvalue; the aggregate is
    certified only if every power is.
    """
    if len(alphas) == 0:
        raise ValueError("need at least one exponent")
    base = build_kernel_matrix(config, params)
    table = [(float(a), psd_verdict(hadamard_power(base, a), tol)) for a in alphas]
    worst = min((v for _, v in table), key=lambda v: v.min_eigenvalue)
    return InfDivResult(worst, table)


def sampled_min_form(matrix, subspace=Subspace.FULL, n_samples: int = 100_000,
                     rng=None, chunk: int = 20_000) -> float:
    """Smallest Rayleigh quotient over random Gaussian directions.

    For ``SUM_ZERO`` the samples are centred and the form is of ``-A``, so
    the sign convention matches :func:`cnd_verdict`.
    """
    a, _ = _entries(matrix)
    rng = np.random.default_rng(rng)
    op = a if Subspace(subspace) is Subspace.FULL else -a
    best = math.inf
    m = a.shape[0]
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        v = rng.standard_normal((k, m))
        if Subspace(subspace) is Subspace.SUM_ZERO:
            v -= v.mean(axis=1, keepdims=True)
        forms = np.einsum("ki,ij,kj->k", v, op, v) / np.einsum("ki,ki->k", v, v)
        best = min(best, float(forms.min()))
        done += k
    return best

"""Dense matrix and polynomial kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype float64; the helpers
here validate shape and finiteness on the way in.  Polynomials carry real
coefficients in ascending degree order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg

from .errors import (
    DegreeOverflow,
    DimensionMismatch,
    SingularMatrix,
    ZeroPolynomial,
    ZeroVector,
)

#: Coefficients smaller than this fraction of the largest one are flushed.
FLUSH_FLOOR = 1e-9

# det values below this fraction of the Hadamard bound count as exact zeros
_ZERO_DET_FLOOR = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Thresholds used for numerical decisions.

    Attributes
    ----------
    rank_tol : float
        Singular values below ``rank_tol * sigma_max`` are treated as zero.
    root_tol : float
        Absolute distance within which two roots are considered equal.
    det_tol : float
        Relative threshold for determinant and coefficient comparisons.
    """

    rank_tol: float = 1e-9
    root_tol: float = 1e-6
    det_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "root_tol", "det_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D float array."""
    arr = np.array(m, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


# ---------------------------------------------------------------------------
# Polynomials


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Real polynomial ``c[0] + c[1] s + ... + c[d] s^d``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.array(self.coeffs, dtype=float))
        if c.ndim != 1:
            raise ValueError("polynomial coefficients must be a flat sequence")
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: float = 1.0) -> "Polynomial":
        """Monic (times ``leading``) polynomial with the given roots.

        Complex roots must come in conjugate pairs for the product to be
        real; the residual imaginary part is discarded.
        """
        roots = np.asarray(list(roots), dtype=complex)
        if roots.size == 0:
            return cls([leading])
        c = npoly.polyfromroots(roots)
        return cls(leading * np.real(c))

    @property
    def degree(self) -> int:
        """Index of the highest nonzero coefficient (-1 for the zero polynomial)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else -1

    @property
    def leading(self) -> float:
        d = self.degree
        return float(self.coeffs[d]) if d >= 0 else 0.0

    def is_zero(self) -> bool:
        return self.degree < 0

    def trimmed(self) -> "Polynomial":
        return Polynomial(self.coeffs[: max(self.degree, 0) + 1])

    def normalized(self, floor: float = FLUSH_FLOOR) -> "Polynomial":
        """Flush coefficients below ``floor`` times the largest magnitude."""
        c = self.coeffs.copy()
        big = np.max(np.abs(c))
        if big == 0:
            return Polynomial([0.0])
        c[np.abs(c) < floor * big] = 0.0
        return Polynomial(c).trimmed()

    def monic(self) -> "Polynomial":
        if self.is_zero():
            raise ZeroPolynomial("cannot make the zero polynomial monic")
        p = self.trimmed()
        return Polynomial(p.coeffs / p.leading)

    def padded(self, length: int) -> np.ndarray:
        """Coefficient array zero-padded (or checked) to ``length`` entries."""
        p = self.trimmed().coeffs
        if p.size > length:
            if np.any(p[length:] != 0):
                raise ValueError(f"polynomial of degree {self.degree} does not fit in {length} coefficients")
            p = p[:length]
        return np.concatenate([p, np.zeros(length - p.size)])

    def __call__(self, s):
        return npoly.polyval(s, self.coeffs)

    def eval_matrix(self, a: np.ndarray) -> np.ndarray:
        """Evaluate at a square matrix by Horner's rule."""
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        eye = np.eye(a.shape[0])
        for c in self.coeffs[::-1]:
            out = out @ a + c * eye
        return out

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"

    def tolist(self) -> list[float]:
        return self.coeffs.tolist()


def coeff_distance(p: Polynomial, q: Polynomial) -> float:
    """Max coefficient difference relative to the larger of the two polynomials."""
    n = max(p.coeffs.size, q.coeffs.size)
    a = np.concatenate([p.coeffs, np.zeros(n - p.coeffs.size)])
    b = np.concatenate([q.coeffs, np.zeros(n - q.coeffs.size)])
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


# ---------------------------------------------------------------------------
# Matrix kernels


def rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank by singular-value thresholding relative to ``sigma_max``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol.rank_tol * sv[0]))


def inverse(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"cannot invert a non-square {m.shape} matrix")
    if rank(m, tol) < m.shape[0]:
        raise SingularMatrix(f"matrix of size {m.shape[0]} is singular at rank_tol={tol.rank_tol}")
    return np.linalg.inv(m)


def faddeev(a) -> tuple[Polynomial, list[np.ndarray]]:
    """Faddeev-LeVerrier recursion.

    Returns the monic characteristic polynomial ``det(sI - a)`` and the
    coefficient matrices ``B_0, ..., B_{m-1}`` of the adjugate,
    ``adj(sI - a) = sum_k s^k B_k``.
    """
    a = as_matrix(a, "a")
    m = a.shape[0]
    if a.shape != (m, m):
        raise DimensionMismatch(f"faddeev needs a square matrix, got {a.shape}")
    coeffs = np.zeros(m + 1)
    coeffs[m] = 1.0
    adj = [None] * m
    eye = np.eye(m)
    cur = eye
    for k in range(1, m + 1):
        adj[m - k] = cur
        ac = a @ cur
        coeffs[m - k] = -np.trace(ac) / k
        cur = ac + coeffs[m - k] * eye
    return Polynomial(coeffs), adj


def charpoly(a) -> Polynomial:
    return faddeev(a)[0]


def _hadamard(m: np.ndarray) -> float:
    return float(np.prod(np.linalg.norm(m, axis=1)))


def default_radius(evaluate: Callable[[complex], np.ndarray]) -> float:
    """Sampling radius for a pencil ``s E + F``: ``max(1, |F| / |E|)``.

    Exact for affine ``evaluate``; a reasonable magnitude guess otherwise.
    """
    f0 = np.asarray(evaluate(0.0))
    e0 = np.asarray(evaluate(1.0)) - f0
    ne = np.linalg.norm(e0, 2) if e0.size else 0.0
    nf = np.linalg.norm(f0, 2) if f0.size else 0.0
    if ne == 0:
        return 1.0
    return float(max(1.0, nf / ne))


def _sample_det(evaluate, npts: int, radius: float):
    nodes = radius * np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.empty(npts, dtype=complex)
    had = 0.0
    for k, s in enumerate(nodes):
        mat = np.asarray(evaluate(s), dtype=complex)
        vals[k] = np.linalg.det(mat) if mat.size else 1.0
        had = max(had, _hadamard(mat) if mat.size else 1.0)
    return vals, had


def _balanced_radius(scaled: np.ndarray, radius: float, floor: float) -> float:
    # geometric mean of the nonzero root magnitudes, |c_lo / c_hi|^(1/(hi-lo))
    mag = np.abs(scaled)
    idx = np.flatnonzero(mag > floor * mag.max())
    lo, hi = idx[0], idx[-1]
    if hi == lo:
        return radius
    return float(radius * (mag[lo] / mag[hi]) ** (1.0 / (hi - lo)))


def polymat_det(
    evaluate: Callable[[complex], np.ndarray],
    degree_bound: int,
    tol: Tolerance = DEFAULT_TOL,
    radius: float | None = None,
    floor: float = FLUSH_FLOOR,
) -> Polynomial:
    """Determinant of a polynomial matrix by evaluation and interpolation.

    ``det evaluate(s)`` is sampled at ``degree_bound + 1`` equispaced points
    on a circle and interpolated with an FFT, which is perfectly conditioned.
    Unless ``radius`` is given, the circle is re-centred on the geometric
    mean of the root magnitudes of the previous estimate until it settles,
    so that no coefficient drowns in the rounding error of the others.  A
    held-out point off the circle checks that the degree bound was large
    enough.

    Flushing is done on the radius-scaled coefficients ``c_k R^k`` so the
    decision does not depend on the units of ``s``.
    """
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    adaptive = radius is None
    if adaptive:
        radius = default_radius(evaluate)
    npts = degree_bound + 1

    vals, had = _sample_det(evaluate, npts, radius)
    if np.max(np.abs(vals)) <= _ZERO_DET_FLOOR * had:
        return Polynomial([0.0])
    scaled = np.fft.fft(vals) / npts
    for _ in range(8 if adaptive else 0):
        new = _balanced_radius(scaled, radius, floor)
        if 0.5 <= new / radius <= 2.0:
            break
        radius = new
        vals, _ = _sample_det(evaluate, npts, radius)
        scaled = np.fft.fft(vals) / npts

    scaled_real = np.real(scaled)
    big = np.max(np.abs(scaled_real))
    scaled_real[np.abs(scaled_real) < floor * big] = 0.0
    coeffs = scaled_real / radius ** np.arange(npts)
    poly = Polynomial(coeffs).trimmed()

    # held-out check: off the sampling circle and off the real axis
    probe = 0.61 * radius * np.exp(0.37j * np.pi / npts + 0.29j)
    probe_mat = np.asarray(evaluate(probe), dtype=complex)
    actual = np.linalg.det(probe_mat) if probe_mat.size else 1.0
    ref = max(np.max(np.abs(vals)), abs(actual))
    if abs(poly(probe) - actual) > tol.det_tol * ref:
        raise DegreeOverflow(
            f"determinant does not fit degree bound {degree_bound} "
            f"(held-out residual {abs(poly(probe) - actual):.3e}, scale {ref:.3e})"
        )
    return poly


def poly_roots(p: Polynomial) -> np.ndarray:
    """All complex roots with multiplicity, from a balanced companion matrix."""
    p = p.trimmed()
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no well-defined roots")
    c = p.coeffs
    nz = np.flatnonzero(c)
    n_zero = int(nz[0])
    c = c[n_zero:]
    d = c.size - 1
    roots = np.zeros(n_zero, dtype=complex)
    if d == 0:
        return roots
    comp = np.zeros((d, d))
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    balanced, _ = scipy.linalg.matrix_balance(comp, permute=False)
    found = scipy.linalg.eigvals(balanced)
    return np.concatenate([roots, found])


def match_roots(found: Sequence[complex], wanted: Sequence[complex]) -> float:
    """Greedy nearest-match pairing; returns the worst pair distance.

    Returns ``inf`` when the multisets differ in size.
    """
    found = list(np.asarray(found, dtype=complex))
    wanted = np.asarray(wanted, dtype=complex)
    if len(found) != wanted.size:
        return float("inf")
    worst = 0.0
    for w in sorted(wanted, key=lambda z: (z.real, z.imag)):
        dist = [abs(f - w) for f in found]
        j = int(np.argmin(dist))
        worst = max(worst, dist[j])
        found.pop(j)
    return worst


def signed_minor_vector(c) -> np.ndarray:
    """Vector ``w`` with ``det([x; c]) == x @ w`` for every row ``x``.

    ``c`` is ``(r-1) x r``; ``w_j = (-1)^j det(c with column j removed)``.
    """
    c = np.asarray(c, dtype=float)
    r = c.shape[1]
    if c.shape[0] != r - 1:
        raise DimensionMismatch(f"expected an (r-1) x r matrix, got {c.shape}")
    w = np.empty(r)
    for j in range(r):
        sub = np.delete(c, j, axis=1)
        w[j] = (-1) ** j * (np.linalg.det(sub) if sub.size else 1.0)
    return w


def complement_to_minors(g, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """An ``(r-1) x r`` matrix whose signed minor vector equals ``g``.

    The rows span the orthogonal complement of ``g``; the minor vector of
    such a matrix is parallel to ``g``, and rescaling the first row fixes
    the factor.
    """
    g = np.asarray(g, dtype=float).ravel()
    r = g.size
    if r == 0 or np.linalg.norm(g) == 0:
        raise ZeroVector("complement_to_minors needs a nonzero vector")
    if r == 1:
        # only det([x]) = x is available, so g must already be (1,)
        if g[0] != 1.0:
            raise ValueError("for r = 1 the minor vector is always (1,)")
        return np.zeros((0, 1))
    c = scipy.linalg.null_space(g[None, :], rcond=tol.rank_tol).T
    w = signed_minor_vector(c)
    scale = (g @ g) / (w @ g)
    c[0] *= scale
    return c

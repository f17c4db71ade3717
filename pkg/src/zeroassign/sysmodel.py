"""State-space systems, descriptor triples and their structural analyses."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import numkit
from .errors import DegenerateSystem, DimensionMismatch, NotSquare, ParseError
from .numkit import DEFAULT_TOL, Polynomial, Tolerance, as_matrix


@dataclass(frozen=True, eq=False)
class StateSpaceSystem:
    """The triple ``(A, B, H)`` of ``x' = Ax + Bu, y = Hx``; ``H`` may be absent."""

    a: np.ndarray
    b: np.ndarray
    h: np.ndarray | None = None
    name: str | None = None

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_matrix(self.b, "B")
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"B must have {n} rows, got {b.shape[0]}")
        if b.shape[1] > n:
            raise DimensionMismatch(f"B has more columns ({b.shape[1]}) than states ({n})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.h is not None:
            h = as_matrix(self.h, "H")
            if h.shape[1] != n:
                raise DimensionMismatch(f"H must have {n} columns, got {h.shape[1]}")
            if h.shape[0] > n:
                raise DimensionMismatch(f"H has more rows ({h.shape[0]}) than states ({n})")
            object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def r(self) -> int:
        return self.b.shape[1]

    @property
    def l(self) -> int | None:
        return None if self.h is None else self.h.shape[0]

    def with_output(self, h) -> "StateSpaceSystem":
        return StateSpaceSystem(self.a, self.b, h, self.name)


@dataclass(frozen=True, eq=False)
class DescriptorTriple:
    """``E w' = F w + G v`` with ``E = diag(I, 0)``, ``F = [[A11, A12], [0, 0]]``
    and ``G = [0; -I]``.

    Closing the loop with ``v = K w`` gives the pencil ``sE - F - GK`` whose
    determinant is the zero polynomial of the output matrix ``K``.
    """

    e: np.ndarray
    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        e, f, g = as_matrix(self.e, "E"), as_matrix(self.f, "F"), as_matrix(self.g, "G")
        n, r = g.shape
        if e.shape != (n, n) or f.shape != (n, n):
            raise DimensionMismatch("E and F must be n x n with n = rows of G")
        m = n - r
        expected_e = np.zeros((n, n))
        expected_e[:m, :m] = np.eye(m)
        expected_g = np.vstack([np.zeros((m, r)), -np.eye(r)])
        if not np.array_equal(e, expected_e):
            raise ValueError("E must be block-diag(I, 0)")
        if not np.array_equal(g, expected_g):
            raise ValueError("G must be [0; -I]")
        if np.any(f[m:] != 0):
            raise ValueError("the bottom r rows of F must vanish")
        for name, v in (("e", e), ("f", f), ("g", g)):
            object.__setattr__(self, name, v)

    @classmethod
    def from_blocks(cls, a11, a12) -> "DescriptorTriple":
        a11, a12 = as_matrix(a11, "A11"), as_matrix(a12, "A12")
        m, r = a12.shape
        n = m + r
        e = np.zeros((n, n))
        e[:m, :m] = np.eye(m)
        f = np.zeros((n, n))
        f[:m, :m] = a11
        f[:m, m:] = a12
        g = np.vstack([np.zeros((m, r)), -np.eye(r)])
        return cls(e, f, g)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def r(self) -> int:
        return self.g.shape[1]

    def pencil(self, k) -> Callable[[complex], np.ndarray]:
        """``s -> sE - F - GK`` for the feedback gain ``K`` (r x n)."""
        k = as_matrix(k, "K")
        if k.shape != (self.r, self.n):
            raise DimensionMismatch(f"K must be {self.r} x {self.n}, got {k.shape}")
        base = self.f + self.g @ k
        return lambda s: s * self.e - base

    def closed_loop_poly(self, k, tol: Tolerance = DEFAULT_TOL) -> Polynomial:
        return numkit.polymat_det(self.pencil(k), self.n - self.r, tol)


@dataclass(frozen=True, eq=False)
class ZeroReport:
    finite_zeros: np.ndarray
    finite_count: int
    infinite_count: int
    zero_polynomial: Polynomial
    scalar_factor_note: str = (
        "det P(s) is defined up to the sign and scale carried by the input matrix; "
        "compare zero polynomials up to a nonzero factor"
    )

    def to_dict(self) -> dict:
        return {
            "finite_zeros": [[float(z.real), float(z.imag)] for z in self.finite_zeros],
            "finite_count": self.finite_count,
            "infinite_count": self.infinite_count,
            "zero_polynomial": self.zero_polynomial.tolist(),
            "scalar_factor_note": self.scalar_factor_note,
        }


# ---------------------------------------------------------------------------
# Analyses


def ctrb(a, b) -> np.ndarray:
    """Kalman controllability matrix ``[b, ab, ..., a^{n-1} b]``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def _krylov_rank(a: np.ndarray, b: np.ndarray, tol: Tolerance) -> int:
    # Rank of ctrb(a, b) from an orthonormalised Krylov sequence, so growth
    # of powers of a cannot swamp the threshold.  span{b, ab, ...} does not
    # change when a and b are scaled separately.
    n = a.shape[0]
    nb = np.linalg.norm(b, 2) if b.size else 0.0
    if nb == 0:
        return 0
    na = np.linalg.norm(a, 2)
    a = a / na if na > 0 else a
    basis = np.zeros((n, 0))
    block = b / nb
    while True:
        block = block - basis @ (basis.T @ block)
        block = block - basis @ (basis.T @ block)
        if block.size == 0:
            break
        u, sv, _ = np.linalg.svd(block, full_matrices=False)
        keep = sv > tol.rank_tol * max(1.0, sv[0] if sv.size else 0.0)
        if not np.any(keep):
            break
        new = u[:, keep]
        basis = np.hstack([basis, new])
        if basis.shape[1] >= n:
            break
        block = a @ new
    return basis.shape[1]


def controllable(a, b, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, int]:
    """Kalman test; returns the flag and the rank of the controllability matrix."""
    a, b = as_matrix(a, "A"), as_matrix(b, "B")
    if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    rk = _krylov_rank(a, b, tol)
    return rk == a.shape[0], rk


def observable(a, h, tol: Tolerance = DEFAULT_TOL) -> bool:
    a, h = as_matrix(a, "A"), as_matrix(h, "H")
    return controllable(a.T, h.T, tol)[0]


def pbh_controllable(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Hautus test ``rank[lam I - A, B] = n`` evaluated at every eigenvalue of ``A``."""
    a, b = as_matrix(a, "A"), as_matrix(b, "B")
    n = a.shape[0]
    for lam in eigenvalues(a):
        if numkit.rank(np.hstack([lam * np.eye(n) - a, b]), tol) < n:
            return False
    return True


def eigenvalues(a) -> np.ndarray:
    a = as_matrix(a, "A")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return np.linalg.eigvals(a).astype(complex)


def rosenbrock(a, b, h) -> Callable[[complex], np.ndarray]:
    """``s -> [[sI - A, -B], [H, 0]]``."""
    a, b, h = (np.asarray(x, dtype=float) for x in (a, b, h))
    n, r = b.shape
    l = h.shape[0]
    top = np.hstack([-a, -b])
    bottom = np.hstack([h, np.zeros((l, r))])
    base = np.vstack([top, bottom])
    e = np.zeros_like(base)
    e[:n, :n] = np.eye(n)
    return lambda s: s * e + base


def zero_polynomial(sys: StateSpaceSystem, tol: Tolerance = DEFAULT_TOL) -> Polynomial:
    """``det P(s)`` of a square system, flushed and trimmed."""
    if sys.h is None:
        raise ValueError("the system has no output matrix")
    if sys.l != sys.r:
        raise NotSquare(f"zero polynomial needs l == r, got l={sys.l}, r={sys.r}")
    return numkit.polymat_det(rosenbrock(sys.a, sys.b, sys.h), sys.n, tol)


def invariant_zeros(sys: StateSpaceSystem, tol: Tolerance = DEFAULT_TOL) -> ZeroReport:
    psi = zero_polynomial(sys, tol)
    if psi.is_zero():
        raise DegenerateSystem("det P(s) vanishes identically; the system matrix is not regular")
    zeros = numkit.poly_roots(psi)
    mu = psi.degree
    return ZeroReport(
        finite_zeros=zeros,
        finite_count=mu,
        infinite_count=sys.n - sys.r - mu,
        zero_polynomial=psi,
    )


# ---------------------------------------------------------------------------
# File I/O


def _parse_matrix(obj, key: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{key}: expected a non-empty array of rows")
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ParseError(f"{key}: row {i} is not an array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{key}: row {i} has {len(row)} entries, expected {width}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{key}: entry ({i}, {j}) is not a number: {v!r}")
            if not np.isfinite(v):
                raise ParseError(f"{key}: entry ({i}, {j}) is not finite")
    if width == 0:
        raise ParseError(f"{key}: rows are empty")
    return np.array(obj, dtype=float)


def load_system(text: str) -> StateSpaceSystem:
    """Parse the JSON system schema (keys ``A``, ``B``, optional ``H`` and ``name``)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("A", "B"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}")
    a = _parse_matrix(doc["A"], "A")
    b = _parse_matrix(doc["B"], "B")
    h = _parse_matrix(doc["H"], "H") if doc.get("H") is not None else None
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string")
    return StateSpaceSystem(a, b, h, name)


def _matrix_to_list(m: np.ndarray) -> list[list[float | int]]:
    # integral floats are written as ints; everything else via repr round trip
    return [[int(v) if float(v).is_integer() and abs(v) < 2**53 else float(v) for v in row] for row in m]


def system_to_dict(sys: StateSpaceSystem) -> dict:
    doc = {"A": _matrix_to_list(sys.a), "B": _matrix_to_list(sys.b)}
    if sys.h is not None:
        doc["H"] = _matrix_to_list(sys.h)
    if sys.name is not None:
        doc["name"] = sys.name
    return doc


def save_system(sys: StateSpaceSystem) -> str:
    return json.dumps(system_to_dict(sys), indent=2)

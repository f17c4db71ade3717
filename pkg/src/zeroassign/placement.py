"""Pole placement engines behind zero assignment.

Both engines solve for ``[H1bar, H2bar]`` such that

    det [[sI - A11, -A12], [H1bar, H2bar]] = psi(s)

where ``(A11, A12)`` is the compressed pair from :mod:`zeroassign.transform`.

* :func:`place_regular` handles ``deg psi == m`` (the size of ``A11``).  With
  ``H2bar`` nonsingular the determinant factors as
  ``det(H2bar) det(sI - A11 + A12 H2bar^-1 H1bar)``, an ordinary state
  feedback problem.
* :func:`place_deficient` handles ``deg psi < m``.  ``H2bar`` is singular and
  the determinant reduces, via a Laplace expansion, to the single-input
  transfer numerator ``f^T adj(sI - A11) A12 g``.

Multi-input pairs are reduced to a single input ``A12 g``.  When ``A11`` is
not cyclic no ``g`` works, and a random preliminary feedback ``K0`` (Heymann's
lemma) is applied first; the determinant is unchanged by the substitution
``A11 -> A11 - A12 K0``, ``H1bar -> H1bar + H2bar K0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import numkit
from .errors import AttemptsExhausted, DimensionMismatch, Uncontrollable, ZeroTargetPolynomial
from .numkit import DEFAULT_TOL, Polynomial, Tolerance, as_matrix
from .sysmodel import DescriptorTriple, controllable


class Path(str, enum.Enum):
    REGULAR = "regular"
    DEFICIENT = "deficient"


@dataclass(frozen=True)
class RandomPolicy:
    """Where to look for the single-input direction ``g``.

    Standard basis vectors come first when ``deterministic_first`` is set,
    then seeded random draws.  ``max_attempts`` bounds both the directions
    tried per round and the number of cyclicizing feedback rounds.
    """

    seed: int = 0
    max_attempts: int = 20
    deterministic_first: bool = True

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")


@dataclass(frozen=True, eq=False)
class PlacementResult:
    h1_bar: np.ndarray
    h2_bar: np.ndarray
    achieved_poly: Polynomial
    scalar_factor: float
    path: Path
    seed_used: int

    @property
    def k(self) -> np.ndarray:
        """The descriptor feedback gain ``[H1bar, H2bar]``."""
        return np.hstack([self.h1_bar, self.h2_bar])

    def to_dict(self) -> dict:
        return {
            "h1_bar": self.h1_bar.tolist(),
            "h2_bar": self.h2_bar.tolist(),
            "achieved_poly": self.achieved_poly.tolist(),
            "scalar_factor": self.scalar_factor,
            "path": self.path.value,
            "seed_used": self.seed_used,
        }


def coeff_map(a, b) -> np.ndarray:
    """Matrix ``T`` with ``T^T f`` = coefficients of ``f^T adj(sI - a) b``.

    Column ``k`` is ``B_k b`` where ``adj(sI - a) = sum_k s^k B_k``.
    """
    a = as_matrix(a, "a")
    b = np.asarray(b, dtype=float).ravel()
    _, adj = numkit.faddeev(a)
    if not adj:
        return np.zeros((0, 0))
    return np.column_stack([bk @ b for bk in adj])


def ackermann(a, b, psi: Polynomial, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Gain ``f`` with ``charpoly(a - b f^T) == psi`` (``psi`` monic, degree m)."""
    a = as_matrix(a, "a")
    b = np.asarray(b, dtype=float).ravel()
    m = a.shape[0]
    psi = psi.trimmed()
    if psi.degree != m:
        raise ValueError(f"target must have degree {m}, got {psi.degree}")
    psi = psi.monic()
    if not controllable(a, b[:, None], tol)[0]:
        raise Uncontrollable("single-input pair is not controllable")
    kalman = np.column_stack([np.linalg.matrix_power(a, k) @ b for k in range(m)])
    last_row = np.linalg.solve(kalman.T, np.eye(m)[-1])
    return psi.eval_matrix(a).T @ last_row


def _directions(r: int, policy: RandomPolicy, rng: np.random.Generator) -> Iterator[np.ndarray]:
    if r == 1:
        yield np.ones(1)
        return
    tried = 0
    if policy.deterministic_first:
        for i in range(r):
            yield np.eye(r)[i]
        tried = r
    while tried < max(policy.max_attempts, r):
        yield rng.standard_normal(r)
        tried += 1


def _feedbacks(a11: np.ndarray, a12: np.ndarray, policy: RandomPolicy, rng: np.random.Generator):
    m, r = a12.shape
    yield np.zeros((r, m))
    na, nb = np.linalg.norm(a11, 2), np.linalg.norm(a12, 2)
    scale = na / nb if na > 0 and nb > 0 else 1.0
    for _ in range(policy.max_attempts - 1):
        yield scale * rng.choice([-2.0, -1.0, 1.0, 2.0], size=(r, m))


def _check_blocks(a11, a12) -> tuple[np.ndarray, np.ndarray]:
    a11, a12 = as_matrix(a11, "A11"), as_matrix(a12, "A12")
    m = a11.shape[0]
    if a11.shape != (m, m) or a12.shape[0] != m:
        raise DimensionMismatch(f"incompatible blocks {a11.shape} and {a12.shape}")
    return a11, a12


def block_poly(a11, a12, h1_bar, h2_bar, tol: Tolerance = DEFAULT_TOL) -> Polynomial:
    """``det [[sI - A11, -A12], [H1bar, H2bar]]`` via the descriptor pencil."""
    triple = DescriptorTriple.from_blocks(a11, a12)
    return triple.closed_loop_poly(np.hstack([h1_bar, h2_bar]), tol)


def scalar_factor(achieved: Polynomial, target: Polynomial) -> float:
    """Least-squares ``c`` in ``achieved ~ c * target``."""
    n = max(achieved.coeffs.size, target.coeffs.size)
    x = np.concatenate([achieved.coeffs, np.zeros(n - achieved.coeffs.size)])
    y = np.concatenate([target.coeffs, np.zeros(n - target.coeffs.size)])
    return float(x @ y / (y @ y))


def _search(a11, a12, psi, policy, tol, path, solve_one):
    """Shared candidate loop; ``solve_one(a, g)`` returns ``(h1, h2)`` or ``None``."""
    rng = np.random.default_rng(policy.seed)
    best = None
    for k0 in _feedbacks(a11, a12, policy, rng):
        a = a11 - a12 @ k0
        for g in _directions(a12.shape[1], policy, rng):
            found = solve_one(a, g)
            if found is None:
                continue
            h1, h2 = found
            h1 = h1 + h2 @ k0
            achieved = block_poly(a11, a12, h1, h2, tol)
            err = numkit.coeff_distance(achieved, psi)
            if best is None or err < best[0]:
                best = (err, h1, h2, achieved)
            if err <= tol.det_tol:
                return PlacementResult(h1, h2, achieved, scalar_factor(achieved, psi), path, policy.seed)
    detail = "no admissible direction found" if best is None else f"best coefficient error {best[0]:.3e}"
    raise AttemptsExhausted(f"{path.value} placement failed: {detail}")


def place_regular(a11, a12, psi: Polynomial, policy: RandomPolicy = RandomPolicy(),
                  tol: Tolerance = DEFAULT_TOL) -> PlacementResult:
    """Assign all ``m`` zeros with ``H2bar = diag(c, 1, ..., 1)``, ``c`` the leading
    coefficient of ``psi``.
    """
    a11, a12 = _check_blocks(a11, a12)
    m, r = a12.shape
    psi = psi.normalized()
    if psi.degree != m:
        raise ValueError(f"regular placement needs degree {m}, got {psi.degree}")
    h2 = np.eye(r)
    h2[0, 0] = psi.leading
    if m == 0:
        h1 = np.zeros((r, 0))
        achieved = Polynomial([np.linalg.det(h2)])
        return PlacementResult(h1, h2, achieved, scalar_factor(achieved, psi), Path.REGULAR, policy.seed)
    if not controllable(a11, a12, tol)[0]:
        raise Uncontrollable("(A11, A12) is not controllable")
    target = psi.monic()

    def solve_one(a, g):
        b = a12 @ g
        if not controllable(a, b[:, None], tol)[0]:
            return None
        f = ackermann(a, b, target, tol)
        return h2 @ np.outer(g, f), h2

    return _search(a11, a12, psi, policy, tol, Path.REGULAR, solve_one)


def place_deficient(a11, a12, psi: Polynomial, policy: RandomPolicy = RandomPolicy(),
                    tol: Tolerance = DEFAULT_TOL) -> PlacementResult:
    """Assign ``mu < m`` finite zeros; the other ``m - mu`` go to infinity.

    Picks ``g`` with ``(A11, A12 g)`` controllable, solves the linear system
    ``coeff_map(A11, A12 g)^T f = psi`` and completes ``H2bar`` with a matrix
    whose signed maximal minors equal ``g``:

        H1bar = [f^T; 0],   H2bar = [0; C],   minors(C) = g.
    """
    a11, a12 = _check_blocks(a11, a12)
    m, r = a12.shape
    psi = psi.normalized()
    if psi.is_zero():
        raise ZeroTargetPolynomial("the target polynomial is identically zero")
    if psi.degree >= m:
        raise ValueError(f"deficient placement needs degree < {m}, got {psi.degree}")
    if not controllable(a11, a12, tol)[0]:
        raise Uncontrollable("(A11, A12) is not controllable")
    rhs = psi.padded(m)

    def solve_one(a, g):
        cmap = coeff_map(a, a12 @ g)
        if numkit.rank(cmap, tol) < m:
            return None
        f = np.linalg.solve(cmap.T, rhs)
        c = numkit.complement_to_minors(g, tol) if r > 1 else np.zeros((0, 1))
        h1 = np.vstack([f[None, :], np.zeros((r - 1, m))])
        h2 = np.vstack([np.zeros((1, r)), c])
        return h1, h2

    return _search(a11, a12, psi, policy, tol, Path.DEFICIENT, solve_one)

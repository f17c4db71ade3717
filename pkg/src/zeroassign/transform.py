"""Row permutation and the block transformation that compresses ``B``.

With ``M`` a permutation bringing ``r`` independent rows of ``B`` to the
bottom, ``MB = [B1; B2]``, and

    N = [[I, -B1 B2^-1], [0, I]],   Nbar = N M,

the transformed pair is ``Nbar A Nbar^-1`` and ``Nbar B = [0; B2]``.
Outputs transform as ``Hbar = H Nbar^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from . import numkit
from .errors import DimensionMismatch, RankDeficientB, SingularB2, SingularMatrix
from .numkit import DEFAULT_TOL, Tolerance, as_matrix


@dataclass(frozen=True, eq=False)
class TransformBundle:
    m_perm: np.ndarray
    n_mat: np.ndarray
    b1_tilde: np.ndarray
    b2_tilde: np.ndarray
    a11_bar: np.ndarray
    a12_bar: np.ndarray
    a21_bar: np.ndarray
    a22_bar: np.ndarray
    # B1 B2^-1, cached because both N and the recovery of H use it
    coupling: np.ndarray

    @property
    def n(self) -> int:
        return self.m_perm.shape[0]

    @property
    def r(self) -> int:
        return self.b2_tilde.shape[0]

    @property
    def n_bar(self) -> np.ndarray:
        return self.n_mat @ self.m_perm

    @property
    def n_bar_inv(self) -> np.ndarray:
        m = self.n - self.r
        n_inv = np.eye(self.n)
        n_inv[:m, m:] = self.coupling
        return self.m_perm.T @ n_inv

    @property
    def a_bar(self) -> np.ndarray:
        return np.block([[self.a11_bar, self.a12_bar], [self.a21_bar, self.a22_bar]])

    def to_dict(self) -> dict:
        fields = ("m_perm", "n_mat", "b1_tilde", "b2_tilde", "a11_bar", "a12_bar", "a21_bar", "a22_bar")
        return {f: getattr(self, f).tolist() for f in fields}


def is_permutation(m) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    ones = m == 1
    zeros = m == 0
    return bool(np.all(ones | zeros) and np.all(ones.sum(0) == 1) and np.all(ones.sum(1) == 1))


def select_permutation(b, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Permutation ``M`` moving ``r`` independent rows of ``b`` to the bottom.

    Rows are picked greedily by QR with column pivoting on ``b^T``.  The
    untouched rows keep their relative order on top, the picked ones are
    stacked below in their original order.
    """
    b = as_matrix(b, "B")
    n, r = b.shape
    if numkit.rank(b, tol) < r:
        raise RankDeficientB(f"rank B < {r}")
    _, _, piv = scipy.linalg.qr(b.T, pivoting=True, mode="economic")
    chosen = sorted(int(i) for i in piv[:r])
    rest = [i for i in range(n) if i not in chosen]
    order = rest + chosen
    return np.eye(n)[order]


def build_transform(a, b, m_perm, tol: Tolerance = DEFAULT_TOL) -> TransformBundle:
    a, b, m_perm = as_matrix(a, "A"), as_matrix(b, "B"), as_matrix(m_perm, "M")
    n, r = b.shape
    if a.shape != (n, n) or m_perm.shape != (n, n):
        raise DimensionMismatch("A, B and M have incompatible shapes")
    if not is_permutation(m_perm):
        raise ValueError("M is not a permutation matrix")
    m = n - r
    mb = m_perm @ b
    b1, b2 = mb[:m], mb[m:]
    try:
        b2_inv = numkit.inverse(b2, tol)
    except SingularMatrix as exc:
        raise SingularB2("the bottom r x r block of MB is singular") from exc
    coupling = b1 @ b2_inv
    n_mat = np.eye(n)
    n_mat[:m, m:] = -coupling
    n_inv = np.eye(n)
    n_inv[:m, m:] = coupling
    abar = n_mat @ (m_perm @ a @ m_perm.T) @ n_inv
    return TransformBundle(
        m_perm=m_perm,
        n_mat=n_mat,
        b1_tilde=b1,
        b2_tilde=b2,
        a11_bar=abar[:m, :m],
        a12_bar=abar[:m, m:],
        a21_bar=abar[m:, :m],
        a22_bar=abar[m:, m:],
        coupling=coupling,
    )


def recover_H(h1_bar, h2_bar, bundle: TransformBundle) -> np.ndarray:
    """``H = [H1bar, H2bar - H1bar B1 B2^-1] M``, the inverse of ``H -> H Nbar^-1``."""
    h1_bar, h2_bar = np.asarray(h1_bar, dtype=float), np.asarray(h2_bar, dtype=float)
    m, r = bundle.n - bundle.r, bundle.r
    if h1_bar.shape[1:] != (m,) or h2_bar.shape[1:] != (r,) or h1_bar.shape[0] != h2_bar.shape[0]:
        raise DimensionMismatch(f"expected l x {m} and l x {r} blocks, got {h1_bar.shape} and {h2_bar.shape}")
    return np.hstack([h1_bar, h2_bar - h1_bar @ bundle.coupling]) @ bundle.m_perm


def transformed_output(h, bundle: TransformBundle) -> tuple[np.ndarray, np.ndarray]:
    """``[H1bar, H2bar] = H Nbar^-1``."""
    hbar = np.asarray(h, dtype=float) @ bundle.n_bar_inv
    m = bundle.n - bundle.r
    return hbar[:, :m], hbar[:, m:]


def transformed_rosenbrock(bundle: TransformBundle, h) -> Callable[[complex], np.ndarray]:
    """``s -> [[sI - Abar, -[0; B2]], [H Nbar^-1, 0]]``."""
    n, r = bundle.n, bundle.r
    nb = np.vstack([np.zeros((n - r, r)), bundle.b2_tilde])
    hbar = np.asarray(h, dtype=float) @ bundle.n_bar_inv
    base = np.block([[-bundle.a_bar, -nb], [hbar, np.zeros((hbar.shape[0], r))]])
    e = np.zeros_like(base)
    e[:n, :n] = np.eye(n)
    return lambda s: s * e + base

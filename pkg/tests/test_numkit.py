import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from zeroassign import numkit
from zeroassign.errors import DegreeOverflow, SingularMatrix, ZeroPolynomial, ZeroVector
from zeroassign.numkit import Polynomial, Tolerance

from conftest import A_EX, B_EX, H_EX1

S = sympy.Symbol("s")


def leibniz_det(m):
    """Determinant by the permutation expansion; independent of LU."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = sympy.combinatorics.Permutation(list(perm)).signature()
        term = sign
        for i, j in enumerate(perm):
            term *= m[i][j]
        total += term
    return total


def sympy_coeffs(expr):
    """Ascending float coefficients of a polynomial expression in s."""
    poly = sympy.Poly(sympy.expand(expr), S)
    return np.array([float(c) for c in reversed(poly.all_coeffs())])


small_ints = arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                    elements=st.integers(-3, 3).map(float))


# --- rank / inverse ---------------------------------------------------------

def test_rank_examples():
    assert numkit.rank(np.eye(4)) == 4
    assert numkit.rank(B_EX) == 2
    assert numkit.rank(np.zeros((3, 3))) == 0


@given(small_ints, st.randoms(use_true_random=False))
def test_rank_invariant_under_permutation_and_conditioning(m, rnd):
    rows = list(range(m.shape[0]))
    cols = list(range(m.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    base = numkit.rank(m)
    assert numkit.rank(m[rows][:, cols]) == base
    # a well-conditioned transform: orthogonal times a mild diagonal
    q, _ = np.linalg.qr(np.random.default_rng(rnd.randint(0, 1000)).standard_normal((m.shape[0],) * 2))
    t = q @ np.diag(np.linspace(1.0, 2.0, m.shape[0]))
    assert numkit.rank(t @ m) == base


def test_inverse_examples():
    np.testing.assert_array_equal(numkit.inverse(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(numkit.inverse([[2, 0], [0, 4]]), [[0.5, 0], [0, 0.25]])
    with pytest.raises(SingularMatrix):
        numkit.inverse([[1, 1], [1, 1]])


# --- faddeev ------------------------------------------------------------------

def test_faddeev_scalar():
    p, adj = numkit.faddeev([[0.0]])
    np.testing.assert_array_equal(p.coeffs, [0, 1])
    np.testing.assert_array_equal(adj[0], [[1]])


def test_faddeev_two_by_two():
    # adj([[s, -1], [0, s - 1]]) = [[s - 1, 1], [0, s]]
    p, adj = numkit.faddeev([[0, 1], [0, 1]])
    np.testing.assert_array_equal(p.coeffs, [0, -1, 1])
    np.testing.assert_array_equal(adj[0], [[-1, 1], [0, 0]])
    np.testing.assert_array_equal(adj[1], np.eye(2))


def test_faddeev_diagonal():
    np.testing.assert_array_equal(numkit.charpoly(np.diag([1.0, 2.0])).coeffs, [2, -3, 1])


@pytest.mark.parametrize("seed", range(5))
def test_faddeev_against_symbolic_adjugate(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 5))
    a = rng.integers(-3, 4, size=(m, m))
    sym = S * sympy.eye(m) - sympy.Matrix(a.tolist())
    adj_sym = sym.adjugate()
    p, adj = numkit.faddeev(a)
    np.testing.assert_allclose(p.coeffs, sympy_coeffs(sym.det()), atol=1e-9)
    for i in range(m):
        for j in range(m):
            want = sympy_coeffs(adj_sym[i, j]) if adj_sym[i, j] != 0 else np.zeros(1)
            got = np.array([adj[k][i, j] for k in range(m)])
            got = np.concatenate([got, np.zeros(max(0, want.size - m))])
            want = np.concatenate([want, np.zeros(got.size - want.size)])
            np.testing.assert_allclose(got, want, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_faddeev_reassembles_charpoly(m, seed):
    a = np.random.default_rng(seed).standard_normal((m, m))
    p, adj = numkit.faddeev(a)
    # (sI - a) sum_k s^k B_k, coefficient of s^k is B_{k-1} - a B_k
    for k in range(m + 1):
        lhs = (adj[k - 1] if k >= 1 else 0) - (a @ adj[k] if k < m else 0)
        scale = max(1.0, np.max(np.abs(p.coeffs)))
        np.testing.assert_allclose(lhs, p.coeffs[k] * np.eye(m), atol=1e-9 * scale)


# --- polymat_det --------------------------------------------------------------

def test_polymat_det_char_pencil():
    a = np.array([[0, 1], [0, 1]], dtype=float)
    p = numkit.polymat_det(lambda s: s * np.eye(2) - a, 2)
    np.testing.assert_allclose(p.coeffs, [0, -1, 1], atol=1e-12)


def test_polymat_det_constant():
    p = numkit.polymat_det(lambda s: np.array([[3.0]]), 0)
    np.testing.assert_allclose(p.coeffs, [3.0])


def test_polymat_det_example_system_matrix():
    from zeroassign.sysmodel import rosenbrock

    p = numkit.polymat_det(rosenbrock(A_EX, B_EX, H_EX1), 2)
    c = p.coeffs[-1]
    assert p.degree == 2 and c != 0
    np.testing.assert_allclose(p.coeffs / c, [2, 3, 1], atol=1e-10)


def test_polymat_det_detects_low_bound():
    with pytest.raises(DegreeOverflow):
        numkit.polymat_det(lambda s: s * np.eye(3) - np.diag([1.0, 2.0, 3.0]), 1)


def test_polymat_det_zero_matrix():
    assert numkit.polymat_det(lambda s: np.array([[s, s], [s, s]]), 2).is_zero()


@pytest.mark.parametrize("seed", range(4))
def test_polymat_det_against_leibniz(seed):
    rng = np.random.default_rng(100 + seed)
    n = 3
    e = rng.integers(-2, 3, size=(n, n))
    f = rng.integers(-3, 4, size=(n, n))
    sym = sympy.Matrix(e.tolist()) * S + sympy.Matrix(f.tolist())
    want = sympy_coeffs(leibniz_det(sym.tolist()) + 0 * S)
    got = numkit.polymat_det(lambda s: s * e + f, n)
    width = max(want.size, got.coeffs.size)
    np.testing.assert_allclose(np.pad(got.coeffs, (0, width - got.coeffs.size)),
                               np.pad(want, (0, width - want.size)), atol=1e-9 * max(1, np.abs(want).max()))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_polymat_det_matches_faddeev(m, seed):
    a = np.random.default_rng(seed).standard_normal((m, m))
    p = numkit.polymat_det(lambda s: s * np.eye(m) - a, m)
    assert numkit.coeff_distance(p, numkit.charpoly(a)) < 1e-9


# --- roots --------------------------------------------------------------------

def test_roots_examples():
    np.testing.assert_allclose(sorted(numkit.poly_roots(Polynomial([2, 3, 1])).real), [-2, -1])
    np.testing.assert_array_equal(numkit.poly_roots(Polynomial([0, 1])), [0])
    np.testing.assert_allclose(numkit.poly_roots(Polynomial([1, -2, 1])).real, [1, 1], atol=1e-7)


def test_roots_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        numkit.poly_roots(Polynomial([0.0, 0.0]))


def test_roots_constant_has_none():
    assert numkit.poly_roots(Polynomial([5.0])).size == 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-8, 8), min_size=1, max_size=8, unique=True), st.floats(0.5, 4))
def test_roots_reconstruct(roots, lead):
    p = Polynomial.from_roots(roots, leading=lead)
    found = numkit.poly_roots(p)
    rebuilt = Polynomial.from_roots(found)
    np.testing.assert_allclose(rebuilt.coeffs, p.coeffs / lead, atol=1e-6 * np.abs(p.coeffs / lead).max())


# --- minors -------------------------------------------------------------------

def test_signed_minor_vector_examples():
    np.testing.assert_allclose(numkit.signed_minor_vector([[0, 1]]), [1, 0], atol=1e-15)
    np.testing.assert_allclose(numkit.signed_minor_vector([[3, 7]]), [7, -3], atol=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_signed_minor_vector_laplace_identity(seed):
    rng = np.random.default_rng(seed)
    c = rng.integers(-4, 5, size=(2, 3))
    x = rng.integers(-4, 5, size=3)
    w = numkit.signed_minor_vector(c)
    stacked = np.vstack([x, c]).tolist()
    assert x @ w == pytest.approx(float(leibniz_det(stacked)), abs=1e-9)


def test_complement_examples():
    np.testing.assert_allclose(numkit.complement_to_minors([1, 0]), [[0, 1]], atol=1e-15)
    np.testing.assert_allclose(numkit.complement_to_minors([0, 1]), [[-1, 0]], atol=1e-15)
    c = numkit.complement_to_minors([1, 2, 3])
    assert c.shape == (2, 3)
    np.testing.assert_allclose(numkit.signed_minor_vector(c), [1, 2, 3], atol=1e-12)


def test_complement_zero_vector():
    with pytest.raises(ZeroVector):
        numkit.complement_to_minors([0, 0, 0])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 5), elements=st.floats(-10, 10)))
def test_minor_round_trip(g):
    if np.linalg.norm(g) < 1e-3:
        return
    c = numkit.complement_to_minors(g)
    np.testing.assert_allclose(numkit.signed_minor_vector(c), g, atol=1e-9 * max(1, np.abs(g).max()))


# --- polynomial helpers ---------------------------------------------------------

def test_normalized_flushes_tiny_leading():
    p = Polynomial([1.0, 2.0, 1e-14]).normalized()
    assert p.degree == 1


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        Tolerance(rank_tol=0)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        numkit.as_matrix([[np.nan]])

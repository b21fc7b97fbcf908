from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxrep import numeric
from maxrep.numeric import NumericError, Signature

F = Fraction


def exact(rows):
    return numeric.to_exact(rows)


# signature -------------------------------------------------------------------


def test_signature_of_boundary_kashiwara_matrix():
    h = F(1, 2)
    s = exact([[0, h, -h], [h, 0, h], [-h, h, 0]])
    assert tuple(numeric.sym_signature(s)) == (2, 1, 0)
    # float route agrees with an independent LAPACK count
    w = np.linalg.eigvalsh(numeric.to_float(s))
    assert (int(np.sum(w > 0)), int(np.sum(w < 0))) == (2, 1)
    assert tuple(numeric.sym_signature(numeric.to_float(s))) == (2, 1, 0)


@pytest.mark.parametrize(
    "rows, sig",
    [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (3, 0, 0)),
        ([[1, 0, 0], [0, -1, 0], [0, 0, 0]], (1, 1, 1)),
        ([[0, 1], [1, 0]], (1, 1, 0)),  # zero diagonal needs the off-diagonal congruence
        ([[0, 0], [0, 0]], (0, 0, 2)),
    ],
)
def test_signature_examples(rows, sig):
    assert tuple(numeric.sym_signature(exact(rows))) == sig
    assert tuple(numeric.sym_signature(np.array(rows, dtype=float))) == sig


def test_signature_rejects_asymmetric():
    with pytest.raises(NumericError):
        numeric.sym_signature(exact([[0, 1], [2, 0]]))
    with pytest.raises(NumericError):
        numeric.sym_signature(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_signature_fields():
    s = Signature(2, 1, 1)
    assert s.index == 1 and s.dim == 4


small_rat = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def sym_and_congruence(draw, m=4):
    vals = [[draw(small_rat) for _ in range(m)] for _ in range(m)]
    s = exact(vals)
    s = s + s.T
    # rank-deficient S is allowed; C is unit upper-triangular hence invertible
    c = numeric.identity(m, exact=True)
    for i in range(m):
        for j in range(i + 1, m):
            c[i, j] = draw(small_rat)
    perm = draw(st.permutations(range(m)))
    c = c[list(perm)]
    return s, c


@settings(max_examples=150, deadline=None)
@given(sym_and_congruence())
def test_signature_congruence_invariant(data):
    s, c = data
    assert numeric.sym_signature(c.T.dot(s).dot(c)) == numeric.sym_signature(s)


@settings(max_examples=150, deadline=None)
@given(sym_and_congruence())
def test_signature_negation_swaps(data):
    s, _ = data
    p, m, z = numeric.sym_signature(s)
    assert tuple(numeric.sym_signature(-s)) == (m, p, z)


@settings(max_examples=100, deadline=None)
@given(sym_and_congruence())
def test_exact_signature_matches_lapack(data):
    s, _ = data
    sf = numeric.to_float(s)
    w = np.linalg.eigvalsh(sf)
    tol = 1e-9 * max(1.0, np.abs(w).max())
    ref = (int(np.sum(w > tol)), int(np.sum(w < -tol)))
    assert tuple(numeric.sym_signature(s))[:2] == ref


# eigen ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "s, expect",
    [([[3, 0], [0, 1]], [3, 1]), ([[0, 1], [1, 0]], [1, -1]), ([[2, 1], [1, 2]], [3, 1])],
)
def test_sym_eigen_examples(s, expect):
    w, v = numeric.sym_eigen(np.array(s, dtype=float))
    np.testing.assert_allclose(w, expect, atol=1e-12)
    np.testing.assert_allclose(v @ np.diag(w) @ v.T, s, atol=1e-12)


def test_sym_eigen_matches_lapack_on_stacks(rng):
    a = rng.normal(size=(200, 6, 6))
    a = a + np.swapaxes(a, -1, -2)
    w, v = numeric.sym_eigen(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[:, ::-1], atol=1e-10)
    np.testing.assert_allclose(np.swapaxes(v, -1, -2) @ v, np.broadcast_to(np.eye(6), a.shape), atol=1e-10)


def test_sym_eigen_budget_error():
    a = np.array([[1.0, 0.5, 0.2], [0.5, 2.0, 0.3], [0.2, 0.3, 3.0]])
    with pytest.raises(numeric.ConvergenceError):
        numeric.sym_eigen(a, eps=1e-30, max_sweeps=1)


# spd power and relative norms -------------------------------------------------


def test_spd_power_examples(rng):
    np.testing.assert_allclose(numeric.spd_power(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]), atol=1e-12)
    a = rng.normal(size=(4, 4))
    p = a @ a.T + np.eye(4)
    np.testing.assert_allclose(numeric.spd_power(p, 0), np.eye(4), atol=1e-12)
    np.testing.assert_allclose(numeric.spd_power(p, 1), p, atol=1e-10)


def test_spd_power_rejects_indefinite():
    with pytest.raises(NumericError):
        numeric.spd_power(np.diag([1.0, -1.0]), 0.5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(-2, 2), st.floats(-2, 2))
def test_spd_power_additive(seed, s, t):
    r = np.random.default_rng(seed)
    a = r.normal(size=(3, 3))
    p = a @ a.T + 0.5 * np.eye(3)
    lhs = numeric.spd_power(p, s) @ numeric.spd_power(p, t)
    rhs = numeric.spd_power(p, s + t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(rhs)))


@pytest.mark.parametrize(
    "g1, g2, value",
    [(np.eye(2), np.eye(2), 1.0), (np.eye(2), np.diag([4.0, 1.0]), 2.0), (np.diag([4.0, 1.0]), np.eye(2), 1.0)],
)
def test_rel_operator_norm_examples(g1, g2, value):
    assert numeric.rel_operator_norm(g1, g2) == pytest.approx(value, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_rel_operator_norm_product_at_least_one(seed):
    r = np.random.default_rng(seed)
    a, b = r.normal(size=(2, 4, 4))
    g1, g2 = a @ a.T + 0.1 * np.eye(4), b @ b.T + 0.1 * np.eye(4)
    prod = numeric.rel_operator_norm(g1, g2) * numeric.rel_operator_norm(g2, g1)
    assert prod >= 1 - 1e-12
    # independent oracle: generalized eigenvalues
    import scipy.linalg

    lam = scipy.linalg.eigh(g2, g1, eigvals_only=True)
    assert numeric.rel_operator_norm(g1, g2) == pytest.approx(np.sqrt(lam.max()), rel=1e-9)


# serialization and exact kernels -------------------------------------------------


def test_parse_and_format_round_trip():
    m = numeric.parse_matrix([["1/2", "3"], ["-4/6", "0"]])
    assert numeric.is_exact(m)
    assert m[1, 0] == F(-2, 3)
    assert numeric.format_matrix(m) == [["1/2", "3"], ["-2/3", "0"]]
    f = numeric.parse_matrix([["0.5", "1"], ["2", "1e-3"]])
    assert f.dtype == float and f[1, 1] == 1e-3


def test_exact_inverse_det_rank():
    a = exact([[2, 1], [1, 1]])
    assert numeric.det(a) == 1
    assert np.all(numeric.inverse(a).dot(a) == numeric.identity(2, exact=True))
    assert numeric.rank(exact([[1, 2], [2, 4]])) == 1
    with pytest.raises(NumericError):
        numeric.inverse(exact([[1, 2], [2, 4]]))


def test_set_tolerance():
    old = numeric.set_tolerance(1e-6)
    assert numeric.get_tolerance() == 1e-6
    numeric.set_tolerance(old)
    with pytest.raises(NumericError):
        numeric.set_tolerance(0)

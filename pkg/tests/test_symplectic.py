import math
from fractions import Fraction

import numpy as np
import pytest

from maxrep import numeric
from maxrep.numeric import NumericError
from maxrep.symplectic import (
    LagrangianFrame,
    TransversalityError,
    direct_sum,
    graph_map,
    is_symplectic,
    is_transverse,
    omega,
    q_form,
    random_lagrangian,
    random_rational_lagrangian,
    random_rational_symplectic,
    random_symplectic,
    symplectic_inverse,
    symplectic_polar,
    unitary_det,
    unitary_embed,
)


def line(x, y):
    return LagrangianFrame(numeric.to_exact([[x], [y]]))


E, F_, EF, EMF = line(1, 0), line(0, 1), line(1, 1), line(1, -1)


def rot(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


def test_omega_convention():
    om = omega(2)
    assert om[0, 2] == 1 and om[2, 0] == -1
    e1, f1 = np.eye(4)[0], np.eye(4)[2]
    assert e1 @ om @ f1 == 1


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4)) == 0
    assert is_symplectic(numeric.to_exact([[2, 0], [0, Fraction(1, 2)]])) == 0
    assert is_symplectic(np.diag([2.0, 2.0])) == pytest.approx(3.0)
    with pytest.raises(NumericError):
        is_symplectic(np.ones((3, 3)))


def test_symplectic_inverse(rng):
    g = random_symplectic(3, rng)
    np.testing.assert_allclose(symplectic_inverse(g) @ g, np.eye(6), atol=1e-9)
    ge = random_rational_symplectic(2, rng)
    assert is_symplectic(ge) == 0
    assert np.all(symplectic_inverse(ge).dot(ge) == numeric.identity(4, exact=True))


def test_frame_validation():
    # span(e1, f1) is not isotropic
    with pytest.raises(NumericError, match="isotropic"):
        LagrangianFrame(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NumericError):
        LagrangianFrame(np.array([[1.0, 2.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]))
    assert LagrangianFrame.coordinate(2, "e") == LagrangianFrame(np.array([[1.0, 1], [1, -1], [0, 0], [0, 0]]))


def test_symplectic_image_is_lagrangian(rng):
    for n in (1, 2, 3):
        for _ in range(20):
            l = random_lagrangian(n, rng)
            g = random_symplectic(n, rng)
            assert l.transform(g).orthonormal().isotropy_residual() < 1e-9
            le = random_rational_lagrangian(n, rng)
            assert le.exact and le.isotropy_residual() == 0


@pytest.mark.parametrize(
    "a, b, ok, gap",
    [(E, F_, True, 1.0), (E, E, False, 0.0), (E, EF, True, 1 / math.sqrt(2))],
)
def test_is_transverse_examples(a, b, ok, gap):
    res, g = is_transverse(a, b)
    assert res is ok or res == ok
    assert g == pytest.approx(gap)


@pytest.mark.parametrize("l, t", [(EF, 1), (E, 0), (EMF, -1)])
def test_graph_map_examples(l, t):
    gd = graph_map(E, F_, l)
    assert gd.T[0, 0] == t


def test_graph_map_errors():
    with pytest.raises(TransversalityError, match="L1 and L3"):
        graph_map(E, E, EF)
    with pytest.raises(TransversalityError, match="L and L3"):
        graph_map(E, F_, F_)


def test_graph_property(rng):
    for n in (1, 2, 3):
        l1, l3, l = (random_rational_lagrangian(n, rng) for _ in range(3))
        if not (is_transverse(l1, l3)[0] and is_transverse(l, l3)[0]):
            continue
        t = graph_map(l1, l3, l).T
        cols = l1.frame + l3.frame.dot(t)
        assert LagrangianFrame(cols) == l


@pytest.mark.parametrize("l, q", [(EF, 1), (E, 0), (EMF, -1)])
def test_q_form_examples(l, q):
    assert q_form(l, E, F_)[0, 0] == q


def test_graph_map_naturality(rng):
    for n in (1, 2, 3):
        l1, l3, l = (random_lagrangian(n, rng) for _ in range(3))
        g = random_symplectic(n, rng)
        t = graph_map(l1, l3, l).T
        # transported frames keep the same coordinates, so T is unchanged
        tg = graph_map(l1.transform(g), l3.transform(g), l.transform(g)).T
        np.testing.assert_allclose(tg, t, atol=1e-8 * max(1, np.abs(t).max()))


def test_q_form_change_of_frame(rng):
    for n in (2, 3):
        l1, l3, l = (random_rational_lagrangian(n, rng) for _ in range(3))
        if not (is_transverse(l1, l3)[0] and is_transverse(l, l3)[0]):
            continue
        q = q_form(l, l1, l3)
        c = random_rational_symplectic(n, rng)[:n, :n]
        if numeric.det(c) == 0:
            continue
        l1c = LagrangianFrame(l1.frame.dot(c))
        qc = q_form(l, l1c, l3)
        assert np.all(qc == c.T.dot(q).dot(c))
        assert numeric.sym_signature(qc) == numeric.sym_signature(q)


def test_polar_examples(rng):
    r = rot(0.7)
    u, p = symplectic_polar(r)
    np.testing.assert_allclose(u, r, atol=1e-12)
    np.testing.assert_allclose(p, np.eye(2), atol=1e-12)
    d = np.diag([2.0, 0.5])
    u, p = symplectic_polar(d)
    np.testing.assert_allclose(u, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(p, d, atol=1e-12)
    u, p = symplectic_polar(r @ d)
    np.testing.assert_allclose(u, r, atol=1e-12)
    np.testing.assert_allclose(p, d, atol=1e-12)


def test_polar_factors(rng):
    for n in (1, 2, 3):
        g = random_symplectic(n, rng)
        u, p = symplectic_polar(g)
        assert np.max(np.abs(u @ p - g)) < 1e-9 * np.abs(g).max()
        assert is_symplectic(u) < 1e-9 and is_symplectic(p) < 1e-9 * np.abs(p).max() ** 2
        np.testing.assert_allclose(u.T @ u, np.eye(2 * n), atol=1e-10)
        assert np.min(np.linalg.eigvalsh(p)) > 0


def test_unitary_det_examples():
    assert unitary_det(np.eye(4)) == pytest.approx(1)
    assert unitary_det(rot(0.9)) == pytest.approx(complex(math.cos(0.9), math.sin(0.9)))
    u1 = unitary_embed([[np.exp(0.3j)]])
    u2 = unitary_embed([[np.exp(-1.1j)]])
    block = np.zeros((4, 4))
    block[np.ix_([0, 2], [0, 2])] = u1
    block[np.ix_([1, 3], [1, 3])] = u2
    assert unitary_det(block) == pytest.approx(np.exp(0.3j) * np.exp(-1.1j))
    with pytest.raises(NumericError):
        unitary_det(np.diag([1.0, 2.0, 1.0, 0.5]) @ np.eye(4)[[1, 0, 2, 3]])


def test_unitary_det_unit_modulus(rng):
    for n in (1, 2, 3):
        u, _ = symplectic_polar(random_symplectic(n, rng))
        assert abs(abs(unitary_det(u)) - 1) < 1e-9


def test_direct_sum_frames():
    l = direct_sum(E, F_)
    assert l.n == 2
    assert l == LagrangianFrame(numeric.to_exact([[1, 0], [0, 0], [0, 0], [0, 1]]))

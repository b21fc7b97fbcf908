import math

import numpy as np
import pytest

from maxrep.numeric import NumericError
from maxrep.representations import (
    CentralizerElement,
    SurfaceRep,
    algebra_span,
    amalgam_z_rep,
    degenerate_rep,
    direct_sum,
    hyperbolization_rep,
    interleaved_to_global,
    irreducible_rep,
    irreducible_surface_rep,
    polydisk_rep,
    tau_polydisk,
    trivial_rep,
)
from maxrep.surface import Presentation, default_hyperbolization
from maxrep.symplectic import is_symplectic, omega, random_symplectic


def swap_blocks():
    # exchanges the two R^2 factors: e1 <-> e2, f1 <-> f2
    return np.eye(4)[[1, 0, 3, 2]]


def test_tau_polydisk_layout():
    a = np.array([[1.0, 2.0], [3.0, 7.0]])
    g = tau_polydisk(a, np.eye(2))
    assert g[0, 0] == 1 and g[0, 2] == 2 and g[2, 0] == 3 and g[2, 2] == 7
    np.testing.assert_allclose(interleaved_to_global(np.kron(np.eye(2), a)), tau_polydisk(a, a))


def test_polydisk_rep(h):
    r1 = polydisk_rep(h)
    for m, g in zip(r1.matrices, h.matrices):
        np.testing.assert_allclose(m, g)
    r2 = polydisk_rep(h, h)
    s = swap_blocks()
    for m in r2.matrices:
        np.testing.assert_allclose(s @ m @ s.T, m, atol=1e-14)
        assert is_symplectic(m) < 1e-9
    assert r2.relator_residual <= 2 * h.relator_residual() * 10 + 1e-12
    assert r2.relator_sign == 1


def test_irreducible_examples(rng):
    np.testing.assert_allclose(irreducible_rep(np.eye(2), 2), np.eye(4), atol=1e-14)
    lam = 1.7
    w = np.sort(np.linalg.eigvals(irreducible_rep(np.diag([lam, 1 / lam]), 2)).real)
    np.testing.assert_allclose(w, np.sort([lam**3, lam, 1 / lam, lam**-3]), rtol=1e-12)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(irreducible_rep(np.diag([2.0, 0.5]), 2)).real),
                               [1 / 8, 1 / 2, 2, 8], atol=1e-9)
    with pytest.raises(NumericError):
        irreducible_rep(np.diag([2.0, 2.0]), 2)


def test_irreducible_is_multiplicative_and_symplectic(rng):
    for n in (1, 2, 3):
        for _ in range(10):
            m, k = random_symplectic(1, rng), random_symplectic(1, rng)
            rm, rk, rmk = irreducible_rep(m, n), irreducible_rep(k, n), irreducible_rep(m @ k, n)
            assert np.max(np.abs(rm @ rk - rmk)) < 1e-9 * max(1, np.abs(rmk).max())
            assert is_symplectic(rm) < 1e-9 * max(1, np.abs(rm).max()) ** 2
    # n = 1 is the defining representation up to conjugation
    m = np.array([[1.0, 2.0], [0.5, 2.0]])
    assert np.trace(irreducible_rep(m, 1)) == pytest.approx(np.trace(m))


def test_centralizer_element():
    z = CentralizerElement.rotation(0.4)
    zm = z.matrix()
    assert is_symplectic(zm) < 1e-12
    d = tau_polydisk(np.array([[2.0, 1.0], [1.0, 1.0]]), np.array([[2.0, 1.0], [1.0, 1.0]]))
    np.testing.assert_allclose(zm @ d, d @ zm, atol=1e-12)
    assert z.in_identity_component
    assert not CentralizerElement(1, 0, 0, -1).in_identity_component
    with pytest.raises(NumericError, match="orthogonal"):
        CentralizerElement(1, 1, 0, 1)


def test_amalgam_z(pair):
    h1, h2 = pair
    r = amalgam_z_rep(h1, h2, CentralizerElement.rotation(math.pi / 4))
    assert r.relator_residual < 1e-6 and r.relator_sign == 1
    ident = amalgam_z_rep(h1, h2, CentralizerElement(1, 0, 0, 1))
    for m, p in zip(ident.matrices, polydisk_rep(h1, h2).matrices):
        np.testing.assert_allclose(m, p)
    with pytest.raises(NumericError, match="separating curve"):
        amalgam_z_rep(h1, default_hyperbolization(twist=0.5, lam=3.5), CentralizerElement(1, 0, 0, 1))


def test_amalgam_continuous_in_z(pair):
    h1, h2 = pair
    phis = np.linspace(0, 2 * math.pi, 9)
    mats = [np.stack(amalgam_z_rep(h1, h2, CentralizerElement.rotation(p)).matrices) for p in phis]
    step = [np.max(np.abs(a - b)) for a, b in zip(mats, mats[1:])]
    fine = amalgam_z_rep(h1, h2, CentralizerElement.rotation(1e-6)).matrices
    assert np.max(np.abs(np.stack(fine) - mats[0])) < 1e-4
    assert max(step) < 50


def test_degenerate_and_trivial(h):
    d = degenerate_rep(h)
    # the images commute, so only rounding remains
    assert d.relator_residual < 1e-12
    t = trivial_rep(2)
    assert t.relator_residual == 0 and t.genus == 2


def test_surface_rep_validation(h):
    with pytest.raises(NumericError, match="symplectic"):
        SurfaceRep(1, tuple(np.diag([2.0, 2.0]) for _ in range(4)))
    with pytest.raises(NumericError, match="relator"):
        SurfaceRep(1, (h.matrices[0], h.matrices[1], h.matrices[0], h.matrices[1]))
    with pytest.raises(NumericError, match="kind"):
        SurfaceRep(1, h.matrices, "nonsense")
    rel = hyperbolization_rep(h)(Presentation(2).relator)
    assert np.max(np.abs(rel - np.eye(2))) < 1e-9


def test_relator_sign_minus_one():
    # quaternion units i, j act symplectically on R^4 and [i, j] = -Id
    i4 = np.array([[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]])
    j4 = np.array([[0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]])
    om = omega(2)
    assert np.max(np.abs(i4.T @ om @ i4 - om)) < 1e-12
    assert np.max(np.abs(j4.T @ om @ j4 - om)) < 1e-12
    r = SurfaceRep(2, (i4, j4, np.eye(4), np.eye(4)))
    assert r.relator_sign == -1


def test_direct_sum_and_conjugate(h, rng):
    s = direct_sum(hyperbolization_rep(h), hyperbolization_rep(h))
    for m, p in zip(s.matrices, polydisk_rep(h, h).matrices):
        np.testing.assert_allclose(m, p)
    g = random_symplectic(2, rng, scale=0.3)
    c = polydisk_rep(h, h).conjugate(g)
    assert c.relator_residual < 1e-6


def test_algebra_span(h, pair, reps, rng):
    h1, h2 = pair
    assert algebra_span(trivial_rep(2), 3) == 1
    assert algebra_span(reps["rho_z"], 4) == 16
    ident = amalgam_z_rep(h1, h2, CentralizerElement(1, 0, 0, 1))
    assert algebra_span(ident, 4) <= 8
    assert algebra_span(polydisk_rep(h, h), 4) == 4
    assert algebra_span(reps["irreducible"], 4) == 16
    g = random_symplectic(2, rng, scale=0.3)
    assert algebra_span(ident.conjugate(g), 4) == algebra_span(ident, 4)
    with pytest.raises(ValueError):
        algebra_span(ident, 0)

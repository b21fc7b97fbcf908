"""Siegel space as compatible complex structures; bounded domains and Cayley transform.

Points of the symmetric space are complex structures J on R^{2n} with
q_J(x) = <x, Jx> positive definite.  Bounded-domain points are plain complex
numpy arrays.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from . import numeric
from .numeric import NumericError
from .symplectic import is_symplectic, omega, symplectic_inverse


class ComplexStructureJ:
    """A positive compatible complex structure; ``gram`` is the matrix of q_J."""

    __slots__ = ("J", "gram")

    def __init__(self, j, tol: float | None = None):
        j = numeric.to_float(j)
        tol = 1e3 * numeric.EPS if tol is None else tol
        m = j.shape[0]
        if j.shape != (m, m) or m % 2:
            raise NumericError(f"J must be 2n x 2n, got {j.shape}")
        scale = max(1.0, float(np.max(np.abs(j)))) ** 2
        sq = float(np.max(np.abs(j @ j + np.eye(m)))) / scale
        if sq > tol:
            raise NumericError(f"J^2 != -Id (residual {sq:.3g})")
        sympl = is_symplectic(j) / scale
        if sympl > tol:
            raise NumericError(f"J is not symplectic (residual {sympl:.3g})")
        g = omega(m // 2) @ j
        if numeric.symmetry_residual(g) > tol * scale:
            raise NumericError("<x, Jy> is not symmetric")
        g = 0.5 * (g + g.T)
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise NumericError("q_J is not positive definite")
        object.__setattr__(self, "J", j)
        object.__setattr__(self, "gram", g)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexStructureJ is immutable")

    @property
    def n(self) -> int:
        return self.J.shape[0] // 2

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.sqrt(v @ self.gram @ v))

    def __repr__(self):
        return f"ComplexStructureJ({self.J.tolist()})"


def standard_j(n: int) -> ComplexStructureJ:
    """J_0 = [[0, -I], [I, 0]], whose form q_{J_0} is the Euclidean one."""
    return ComplexStructureJ(-omega(n))


def act(g, j: ComplexStructureJ) -> ComplexStructureJ:
    g = numeric.to_float(g)
    return ComplexStructureJ(g @ j.J @ symplectic_inverse(g))


def siegel_distance(j1: ComplexStructureJ, j2: ComplexStructureJ) -> float:
    """|ln ||Id||_{J1,J2}| + |ln ||Id||_{J2,J1}|."""
    if j1.n != j2.n:
        raise NumericError("complex structures on different spaces")
    a = float(numeric.rel_operator_norm(j1.gram, j2.gram))
    b = float(numeric.rel_operator_norm(j2.gram, j1.gram))
    return abs(np.log(a)) + abs(np.log(b))


def orbit_distances(gs, j0: ComplexStructureJ) -> np.ndarray:
    """d(J0, g J0 g^{-1}) for a stack of symplectic matrices (N, 2n, 2n).

    The Gram matrix of g.J0 is g^{-T} G0 g^{-1}.
    """
    gs = np.asarray(gs, dtype=float)
    n = gs.shape[-1] // 2
    om = omega(n)
    ginv = -om @ np.swapaxes(gs, -1, -2) @ om
    g2 = np.swapaxes(ginv, -1, -2) @ j0.gram @ ginv
    g2 = 0.5 * (g2 + np.swapaxes(g2, -1, -2))
    g1 = np.broadcast_to(j0.gram, g2.shape)
    a = numeric.rel_operator_norm(g1, g2)
    b = numeric.rel_operator_norm(g2, g1)
    return np.abs(np.log(a)) + np.abs(np.log(b))


# ---------------------------------------------------------------------------
# bounded domains


class DomainClass(str, Enum):
    INTERIOR = "interior"
    SHILOV = "shilov"
    BOUNDARY = "boundary-non-shilov"
    OUTSIDE = "outside"


def in_bounded_domain(a, eps: float | None = None) -> DomainClass:
    """Classify A (q x p complex) by the spectrum of Id - A*A."""
    eps = numeric.EPS if eps is None else eps
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    h = np.eye(a.shape[1]) - a.conj().T @ a
    w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    if np.all(w > eps):
        return DomainClass.INTERIOR
    if np.all(np.abs(w) < eps):
        return DomainClass.SHILOV
    if np.min(w) < -eps:
        return DomainClass.OUTSIDE
    return DomainClass.BOUNDARY


def cayley(z, eps: float | None = None) -> np.ndarray:
    """W = i (Id + Z)(Id - Z)^{-1}."""
    eps = numeric.EPS if eps is None else eps
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    eye = np.eye(z.shape[0])
    m = eye - z
    if abs(np.linalg.det(m)) <= eps:
        raise NumericError("Cayley transform undefined: det(Id - Z) = 0")
    return 1j * (eye + z) @ np.linalg.inv(m)


def inverse_cayley(w, eps: float | None = None) -> np.ndarray:
    """Z = (W - i Id)(W + i Id)^{-1}."""
    eps = numeric.EPS if eps is None else eps
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    eye = np.eye(w.shape[0])
    m = w + 1j * eye
    if abs(np.linalg.det(m)) <= eps:
        raise NumericError("inverse Cayley transform undefined: det(W + i Id) = 0")
    return (w - 1j * eye) @ np.linalg.inv(m)


def e_map(frame, p: int, eps: float | None = None) -> np.ndarray:
    """E(L) = pr_- o (pr_+|_L)^{-1} for a p-dimensional subspace of C^{p+q}.

    W_+ is spanned by the first ``p`` coordinates and W_- by the rest; the
    result is the q x p matrix whose graph over W_+ is L.
    """
    eps = numeric.EPS if eps is None else eps
    f = np.asarray(frame, dtype=complex)
    if f.ndim == 1:
        f = f.reshape(-1, 1)
    top, bottom = f[:p], f[p:]
    if top.shape[0] != top.shape[1] or abs(np.linalg.det(top)) <= eps * max(1.0, np.linalg.norm(top)) ** p:
        raise NumericError("projection of L onto W_+ is not invertible")
    return bottom @ np.linalg.inv(top)

"""Kashiwara's Maslov index, maximal tuples, and the circle's orientation cocycle.

Sign convention: with <e_1, f_1> = 1 the boundary triple
(span e_1, span(e_1 + f_1), span f_1) has index +1, and the circle chart
theta -> span(cos(theta/2) e_1 + sin(theta/2) f_1) turns positively
(counterclockwise) ordered angles into index +1 triples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import numeric
from .numeric import NumericError
from .siegel import ComplexStructureJ
from .symplectic import (
    LagrangianFrame,
    TransversalityError,
    graph_map,
    is_transverse,
    omega,
    q_form,
)

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


def _frames(*ls: LagrangianFrame):
    n = ls[0].n
    if any(l.n != n for l in ls):
        raise NumericError("Lagrangians live in different spaces")
    exact = all(l.exact for l in ls)
    conv = (lambda a: a) if exact else numeric.to_float
    return n, exact, [conv(l.frame) for l in ls]


def kashiwara_matrix(l1: LagrangianFrame, l2: LagrangianFrame, l3: LagrangianFrame) -> np.ndarray:
    """Symmetric Gram matrix of <x1,x2> + <x2,x3> + <x3,x1> on L1 + L2 + L3."""
    n, exact, (f1, f2, f3) = _frames(l1, l2, l3)
    om = omega(n, exact)
    half = Fraction(1, 2) if exact else 0.5
    a12 = f1.T.dot(om).dot(f2) * half
    a23 = f2.T.dot(om).dot(f3) * half
    a31 = f3.T.dot(om).dot(f1) * half
    z = a12 * 0
    return np.block([[z, a12, a31.T], [a12.T, z, a23], [a31, a23.T, z]])


def _integer_kashiwara(l1: LagrangianFrame, l2: LagrangianFrame, l3: LagrangianFrame) -> list[list[int]]:
    """A positive multiple of the Kashiwara matrix with integer entries (rational frames only).

    Frame columns are rescaled to integers (a positive diagonal congruence)
    and the factor 1/2 is dropped, so the inertia is unchanged.
    """
    n = l1.n
    fs = [np.array(numeric.integer_rows(np.asarray(l.frame, dtype=object).T), dtype=object).T for l in (l1, l2, l3)]
    # Omega f = [f_bottom; -f_top]
    om = [np.concatenate([f[n:], -f[:n]], axis=0) for f in fs]
    a12 = fs[0].T.dot(om[1])
    a23 = fs[1].T.dot(om[2])
    a31 = fs[2].T.dot(om[0])
    z = a12 * 0
    k = np.block([[z, a12, a31.T], [a12.T, z, a23], [a31, a23.T, z]])
    return [[int(x) for x in row] for row in k]


def maslov_index(l1: LagrangianFrame, l2: LagrangianFrame, l3: LagrangianFrame) -> int:
    n, exact, _ = _frames(l1, l2, l3)
    if exact:
        return numeric._integer_signature(_integer_kashiwara(l1, l2, l3)).index
    return numeric.sym_signature(kashiwara_matrix(l1, l2, l3)).index


def batch_maslov(f1, f2, f3, eps: float | None = None) -> np.ndarray:
    """Float Maslov indices for stacks of frames of shape (N, 2n, n)."""
    f1, f2, f3 = (np.asarray(f, dtype=float) for f in (f1, f2, f3))
    n = f1.shape[-1]
    om = omega(n)
    t = lambda a: np.swapaxes(a, -1, -2)  # noqa: E731
    a12 = 0.5 * t(f1) @ om @ f2
    a23 = 0.5 * t(f2) @ om @ f3
    a31 = 0.5 * t(f3) @ om @ f1
    z = np.zeros_like(a12)
    k = np.concatenate(
        [
            np.concatenate([z, a12, t(a31)], axis=-1),
            np.concatenate([t(a12), z, a23], axis=-1),
            np.concatenate([a31, t(a23), z], axis=-1),
        ],
        axis=-2,
    )
    sig = numeric.batch_signature(k, eps=eps)
    return sig[:, 0] - sig[:, 1]


def maslov_via_sign(l1: LagrangianFrame, l: LagrangianFrame, l3: LagrangianFrame) -> int:
    """Index of (L1, L, L3) as the signature of the graph form Q_L^{L1,L3}."""
    return numeric.sym_signature(q_form(l, l1, l3)).index


def is_maximal_triple(l1: LagrangianFrame, l2: LagrangianFrame, l3: LagrangianFrame) -> bool:
    if maslov_index(l1, l2, l3) != l1.n:
        return False
    for a, b in ((l1, l2), (l2, l3), (l1, l3)):
        if not is_transverse(a, b)[0]:
            raise NumericError("index n on a non-transverse triple: inconsistent input")
    return True


def is_maximal_quadruple(l0, l1, l2, l3) -> bool:
    quad = (l0, l1, l2, l3)
    return all(
        is_maximal_triple(*(quad[i] for i in idx))
        for idx in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
    )


def complex_structure_from_triple(l1, l2, l3) -> ComplexStructureJ:
    """J(tau) = [[0, -T31], [T13, 0]] on V = L1 + L3, for a maximal triple."""
    if not is_maximal_triple(l1, l2, l3):
        raise NumericError("J(tau) requires a maximal triple")
    f1, f2, f3 = (l.as_float() for l in (l1, l2, l3))
    t13 = graph_map(f1, f3, f2).T
    t31 = graph_map(f3, f1, f2).T
    n = l1.n
    z = np.zeros((n, n))
    block = np.block([[z, -t31], [t13, z]])
    basis = np.concatenate([f1.frame, f3.frame], axis=1)
    j = basis @ block @ np.linalg.inv(basis)
    js = ComplexStructureJ(j)
    # q_J restricted to L1 and L3 must be Q_{L2}^{L1,L3} and -Q_{L2}^{L3,L1}
    g = js.gram
    scale = max(1.0, float(np.max(np.abs(g))))
    r1 = f1.frame.T @ g @ f1.frame - q_form(f2, f1, f3)
    r3 = f3.frame.T @ g @ f3.frame + q_form(f2, f3, f1)
    r13 = f1.frame.T @ g @ f3.frame
    res = max(np.max(np.abs(r1)), np.max(np.abs(r3)), np.max(np.abs(r13))) / scale
    if res > 1e3 * numeric.EPS:
        raise NumericError(f"J(tau) form decomposition failed (residual {res:.3g})")
    return js


def monotonicity_check(l0, l1, l2, linf, eps: float | None = None) -> bool:
    """0 < Q_{L1}^{L0,Linf} < Q_{L2}^{L0,Linf} (both strict, as forms)."""
    eps = numeric.EPS if eps is None else eps
    names = ("L0", "L1", "L2", "Linf")
    quad = (l0, l1, l2, linf)
    for i in range(4):
        for j in range(i + 1, 4):
            if not is_transverse(quad[i], quad[j])[0]:
                raise TransversalityError(f"{names[i]} and {names[j]} are not transverse")
    q1 = q_form(l1, l0, linf)
    q2 = q_form(l2, l0, linf)
    return _positive_definite(q1, eps) and _positive_definite(q2 - q1, eps)


def _positive_definite(q, eps) -> bool:
    if numeric.is_exact(q):
        sig = numeric.sym_signature(q)
        return sig.n_plus == sig.dim
    sig = numeric.sym_signature(q, eps=eps)
    return sig.n_plus == sig.dim


# ---------------------------------------------------------------------------
# the circle


@dataclass(frozen=True)
class CirclePoint:
    """A point of S^1 = RP^1 via the double-angle chart: direction angle a -> 2a."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @classmethod
    def from_direction(cls, v) -> "CirclePoint":
        x, y = float(v[0]), float(v[1])
        if x == 0 and y == 0:
            raise NumericError("zero vector has no direction")
        alpha = math.atan2(y, x) % math.pi
        return cls(2.0 * alpha)

    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta / 2), math.sin(self.theta / 2)])

    def lagrangian(self) -> LagrangianFrame:
        return LagrangianFrame(self.direction().reshape(2, 1), check=False)

    def act(self, m) -> "CirclePoint":
        return CirclePoint.from_direction(np.asarray(m, dtype=float) @ self.direction())


def _angle(x) -> float:
    return x.theta if isinstance(x, CirclePoint) else float(x) % TWO_PI


def _same(a: float, b: float) -> bool:
    d = abs(a - b)
    return min(d, TWO_PI - d) <= ANGLE_TOL


def orientation_cocycle(x, y, z) -> int:
    a, b, c = _angle(x), _angle(y), _angle(z)
    if _same(a, b) or _same(b, c) or _same(a, c):
        return 0
    return 1 if (b - a) % TWO_PI < (c - a) % TWO_PI else -1


def permutation_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


ALL_PERMUTATIONS_3 = [(p, permutation_sign(p)) for p in permutations(range(3))]

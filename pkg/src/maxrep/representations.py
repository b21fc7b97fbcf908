"""Representations of surface groups into Sp(2n, R).

Block convention.  Formulas for the polydisk and for the centralizer
elements are usually written on R^2 + ... + R^2 with coordinates
(x_1, y_1, x_2, y_2, ...), each plane carrying <x, y> = x_1 y_2 - x_2 y_1.
We translate to the global ordering (e_1..e_n, f_1..f_n) by the permutation
x_k -> e_k, y_k -> f_k; :func:`interleaved_to_global` is that conjugation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from . import numeric
from .numeric import NumericError
from .surface import (
    Hyperbolization,
    Presentation,
    evaluate_word,
    words_with_matrices,
)
from .symplectic import is_symplectic, symplectic_inverse

RELATOR_TOL = 1e-6
KINDS = ("polydisk", "irreducible", "amalgam_z", "degenerate", "custom")


def interleaved_permutation(n: int) -> np.ndarray:
    """P with global = P @ interleaved: (x_1, y_1, ..., x_n, y_n) -> (e_1..e_n, f_1..f_n)."""
    p = np.zeros((2 * n, 2 * n))
    for k in range(n):
        p[k, 2 * k] = 1.0
        p[n + k, 2 * k + 1] = 1.0
    return p


def interleaved_to_global(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    p = interleaved_permutation(g.shape[0] // 2)
    return p @ g @ p.T


def tau_polydisk(*blocks) -> np.ndarray:
    """Block-diagonal embedding Sp(2, R)^r -> Sp(2r, R) in the global ordering."""
    r = len(blocks)
    g = np.zeros((2 * r, 2 * r))
    for k, b in enumerate(blocks):
        b = np.asarray(b, dtype=float)
        g[k, k], g[k, r + k] = b[0, 0], b[0, 1]
        g[r + k, k], g[r + k, r + k] = b[1, 0], b[1, 1]
    return g


@dataclass(frozen=True)
class SurfaceRep:
    n: int
    matrices: tuple[np.ndarray, ...]
    kind: str = "custom"
    reference: Hyperbolization | None = None
    relator_sign: int = field(init=False, default=1)
    relator_residual: float = field(init=False, default=0.0)

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if self.kind not in KINDS:
            raise NumericError(f"unknown representation kind {self.kind!r}")
        if len(mats) % 2 or not mats:
            raise NumericError("need 2g generator matrices")
        for i, m in enumerate(mats):
            if m.shape != (2 * self.n, 2 * self.n):
                raise NumericError(f"generator {i + 1} has shape {m.shape}, expected {(2 * self.n,) * 2}")
            res = is_symplectic(m) / max(1.0, float(np.max(np.abs(m)))) ** 2
            if res > 1e3 * numeric.EPS:
                raise NumericError(f"generator {i + 1} is not symplectic (residual {res:.3g})")
        rel = evaluate_word(mats, self.presentation.relator)
        eye = np.eye(2 * self.n)
        plus = float(np.max(np.abs(rel - eye)))
        minus = float(np.max(np.abs(rel + eye)))
        sign, res = (1, plus) if plus <= minus else (-1, minus)
        if res > RELATOR_TOL:
            raise NumericError(f"relator residual {res:.3g} exceeds {RELATOR_TOL:g}")
        object.__setattr__(self, "relator_sign", sign)
        object.__setattr__(self, "relator_residual", res)

    @property
    def genus(self) -> int:
        return len(self.matrices) // 2

    @property
    def presentation(self) -> Presentation:
        return Presentation(self.genus)

    def __call__(self, w: Sequence[int]) -> np.ndarray:
        return evaluate_word(self.matrices, w)

    def conjugate(self, g) -> "SurfaceRep":
        g = np.asarray(g, dtype=float)
        gi = symplectic_inverse(g)
        return SurfaceRep(self.n, tuple(g @ m @ gi for m in self.matrices), self.kind, self.reference)


def direct_sum(*reps: SurfaceRep) -> SurfaceRep:
    """Block sum in the global ordering (e-blocks then f-blocks)."""
    genus = reps[0].genus
    if any(r.genus != genus for r in reps):
        raise NumericError("mismatched presentations")
    n = sum(r.n for r in reps)
    mats = []
    for i in range(2 * genus):
        g = np.zeros((2 * n, 2 * n))
        off = 0
        for r in reps:
            k = r.n
            m = r.matrices[i]
            idx = np.r_[off:off + k, n + off:n + off + k]
            g[np.ix_(idx, idx)] = m
            off += k
        mats.append(g)
    return SurfaceRep(n, tuple(mats), "custom", reps[0].reference)


def hyperbolization_rep(h: Hyperbolization) -> SurfaceRep:
    return SurfaceRep(1, h.matrices, "polydisk", h)


def polydisk_rep(*hs: Hyperbolization) -> SurfaceRep:
    """tau_P o (h_1, ..., h_r)."""
    if not hs:
        raise NumericError("need at least one hyperbolization")
    genus = hs[0].genus
    if any(h.genus != genus for h in hs):
        raise NumericError("hyperbolizations have mismatched presentations")
    mats = tuple(tau_polydisk(*(h.matrices[i] for h in hs)) for i in range(2 * genus))
    return SurfaceRep(len(hs), mats, "polydisk", hs[0])


# ---------------------------------------------------------------------------
# the 2n-dimensional irreducible representation


def _binary_form_action(m, d: int) -> np.ndarray:
    """Matrix of p(X, Y) -> p(aX + cY, bX + dY) on the basis X^i Y^{d-i}."""
    (a, b), (c, dd) = np.asarray(m, dtype=float)
    out = np.zeros((d + 1, d + 1))
    for j in range(d + 1):
        p = np.array([1.0])
        for _ in range(j):
            p = np.convolve(p, [c, a])
        for _ in range(d - j):
            p = np.convolve(p, [dd, b])
        out[:, j] = p
    return out


def _symplectic_basis(n: int) -> np.ndarray:
    """Columns e_1..e_n, f_1..f_n in the monomial basis.

    The invariant pairing is <X^i Y^{d-i}, X^j Y^{d-j}> = delta_{i+j,d} (-1)^i i! (d-i)!;
    e_k = X^{k-1} Y^{d-k+1} and f_k is the dual monomial rescaled so <e_k, f_k> = 1.
    """
    d = 2 * n - 1
    b = np.zeros((d + 1, d + 1))
    for k in range(n):
        b[k, k] = 1.0
        b[d - k, n + k] = 1.0 / ((-1) ** k * factorial(k) * factorial(d - k))
    return b


def irreducible_rep(m, n: int) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if abs(np.linalg.det(m) - 1.0) > 1e3 * numeric.EPS:
        raise NumericError("irreducible_rep needs det M = 1")
    basis = _symplectic_basis(n)
    g = np.linalg.solve(basis, _binary_form_action(m, 2 * n - 1) @ basis)
    res = is_symplectic(g) / max(1.0, float(np.max(np.abs(g)))) ** 2
    if res > 1e3 * numeric.EPS:
        raise NumericError(f"irreducible image is not symplectic (residual {res:.3g})")
    return g


def irreducible_surface_rep(h: Hyperbolization, n: int) -> SurfaceRep:
    return SurfaceRep(n, tuple(irreducible_rep(m, n) for m in h.matrices), "irreducible", h)


# ---------------------------------------------------------------------------
# the twisted amalgam


@dataclass(frozen=True)
class CentralizerElement:
    """z = [[a Id_2, b Id_2], [c Id_2, d Id_2]] with [[a, b], [c, d]] in O(2)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        o = np.array([[self.a, self.b], [self.c, self.d]], dtype=float)
        res = float(np.max(np.abs(o.T @ o - np.eye(2))))
        if res > 1e3 * numeric.EPS:
            raise NumericError(f"centralizer parameters are not orthogonal (residual {res:.3g})")

    @classmethod
    def rotation(cls, phi: float) -> "CentralizerElement":
        return cls(math.cos(phi), -math.sin(phi), math.sin(phi), math.cos(phi))

    @property
    def in_identity_component(self) -> bool:
        return self.a * self.d - self.b * self.c > 0

    def matrix(self) -> np.ndarray:
        o = np.array([[self.a, self.b], [self.c, self.d]])
        return interleaved_to_global(np.kron(o, np.eye(2)))


def amalgam_z_rep(h1: Hyperbolization, h2: Hyperbolization, z: CentralizerElement,
                  tol: float = 1e-9) -> SurfaceRep:
    """rho_z: tau_P o (h1, h2) on <a1, b1> and Int(z) o tau_P o (h1, h2) on <a2, b2>.

    h1 and h2 must agree on the separating curve [a1, b1], so that its image
    lies on the diagonal, which z centralizes.
    """
    if h1.genus != 2 or h2.genus != 2:
        raise NumericError("amalgam_z_rep is built for genus 2")
    gap = float(np.max(np.abs(h1.separating_curve() - h2.separating_curve())))
    if gap > tol:
        raise NumericError(f"h1 and h2 differ on the separating curve by {gap:.3g}")
    zm = z.matrix()
    zi = symplectic_inverse(zm)
    mats = []
    for i in range(4):
        t = tau_polydisk(h1.matrices[i], h2.matrices[i])
        mats.append(t if i < 2 else zm @ t @ zi)
    return SurfaceRep(2, tuple(mats), "amalgam_z", h1)


def degenerate_rep(h: Hyperbolization, n: int = 2) -> SurfaceRep:
    """a1 -> tau_P(h(a1), ...), b1 -> its square, a2, b2 -> Id."""
    base = tau_polydisk(*([h.matrices[0]] * n))
    eye = np.eye(2 * n)
    return SurfaceRep(n, (base, base @ base, eye, eye), "degenerate", h)


def trivial_rep(n: int, genus: int = 2) -> SurfaceRep:
    return SurfaceRep(n, tuple(np.eye(2 * n) for _ in range(2 * genus)), "custom")


def algebra_span(rho: SurfaceRep, max_len: int, rtol: float = 1e-9) -> int:
    """Dimension of span{rho(w) : |w| <= max_len} inside the (2n)^2 matrices."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    vecs = []
    for _, _, mats in words_with_matrices(rho.matrices, max_len):
        scale = np.max(np.abs(mats), axis=(1, 2), keepdims=True)
        vecs.append((mats / scale).reshape(len(mats), -1))
    stack = np.concatenate(vecs, axis=0)
    sv = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


"""The standard symplectic space, Lagrangian frames and graph quadratic forms.

Basis ordering is fixed globally as (e_1..e_n, f_1..f_n) with
<e_i, f_j> = delta_ij, so the form matrix is ``[[0, I], [-I, 0]]`` and
``<x, y> = x^T Omega y``.  Unitary matrices A + iB embed as
``[[A, -B], [B, A]]`` in this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numeric
from .numeric import NumericError


class TransversalityError(NumericError):
    """Two Lagrangians that must be transverse are not."""


def omega(n: int, exact: bool = False) -> np.ndarray:
    if exact:
        z = numeric.identity(2 * n, exact=True) * 0
        for i in range(n):
            z[i, n + i] = Fraction(1)
            z[n + i, i] = Fraction(-1)
        return z
    return np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])


@dataclass(frozen=True)
class SymplecticSpace:
    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    def form(self, exact: bool = False) -> np.ndarray:
        return omega(self.n, exact)

    def pairing(self, x, y):
        exact = numeric.is_exact(x) and numeric.is_exact(y)
        return np.asarray(x).T.dot(omega(self.n, exact)).dot(np.asarray(y))


def _coerce(a):
    return numeric.to_exact(a) if numeric.is_exact(a) else np.asarray(a, dtype=float)


def _half_dim(m: int) -> int:
    if m % 2:
        raise NumericError(f"ambient dimension must be even, got {m}")
    return m // 2


def is_symplectic(g) -> float:
    """Max-abs entry of g^T Omega g - Omega (0 for an exact symplectic matrix)."""
    g = _coerce(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise NumericError(f"expected a square matrix, got shape {g.shape}")
    n = _half_dim(g.shape[0])
    exact = numeric.is_exact(g)
    om = omega(n, exact)
    r = g.T.dot(om).dot(g) - om
    return float(np.max(np.abs(r.astype(float))))


def symplectic_inverse(g) -> np.ndarray:
    """g^{-1} = -Omega g^T Omega (exact on rational input)."""
    g = _coerce(g)
    n = _half_dim(g.shape[0])
    om = omega(n, numeric.is_exact(g))
    return -om.dot(g.T).dot(om)


class LagrangianFrame:
    """An n-dimensional isotropic subspace of R^{2n}, stored as a 2n x n frame.

    Equality is subspace equality, not frame equality.
    """

    __slots__ = ("frame",)

    def __init__(self, frame, check: bool = True):
        f = _coerce(frame)
        if f.ndim == 1:
            f = f.reshape(-1, 1)
        object.__setattr__(self, "frame", f)
        if check:
            self.validate()

    def __setattr__(self, name, value):
        raise AttributeError("LagrangianFrame is immutable")

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    @property
    def exact(self) -> bool:
        return numeric.is_exact(self.frame)

    def isotropy_residual(self) -> float:
        f = self.frame
        r = f.T.dot(omega(self.n, self.exact)).dot(f)
        scale = 1.0 if self.exact else max(1.0, float(np.max(np.abs(f.astype(float)))) ** 2)
        return float(np.max(np.abs(r.astype(float)))) / scale

    def validate(self) -> None:
        f = self.frame
        if f.shape[0] != 2 * f.shape[1]:
            raise NumericError(f"Lagrangian frame must be 2n x n, got {f.shape}")
        if numeric.rank(f) != self.n:
            raise NumericError("Lagrangian frame columns are linearly dependent")
        res = self.isotropy_residual()
        if (self.exact and res != 0) or res > numeric.EPS:
            raise NumericError(f"frame is not isotropic (residual {res:.3g})")

    def as_float(self) -> "LagrangianFrame":
        return LagrangianFrame(numeric.to_float(self.frame), check=False)

    def orthonormal(self) -> "LagrangianFrame":
        q, _ = np.linalg.qr(numeric.to_float(self.frame))
        return LagrangianFrame(q, check=False)

    def transform(self, g) -> "LagrangianFrame":
        g = _coerce(g)
        if numeric.is_exact(g) != self.exact:
            g, f = numeric.to_float(g), numeric.to_float(self.frame)
        else:
            f = self.frame
        return LagrangianFrame(g.dot(f), check=False)

    def same_subspace(self, other: "LagrangianFrame") -> bool:
        cat = np.concatenate([self.frame, other.frame], axis=1)
        if not (self.exact and other.exact):
            cat = numeric.to_float(cat)
        return numeric.rank(cat) == self.n

    def __eq__(self, other):
        if not isinstance(other, LagrangianFrame):
            return NotImplemented
        return self.n == other.n and self.same_subspace(other)

    __hash__ = None

    def __repr__(self):
        return f"LagrangianFrame({numeric.format_matrix(self.frame)})"

    @classmethod
    def graph(cls, sym) -> "LagrangianFrame":
        """Span of the columns of [I; S] for symmetric S."""
        s = _coerce(sym)
        n = s.shape[0]
        top = numeric.identity(n, exact=numeric.is_exact(s))
        return cls(np.concatenate([top, s], axis=0))

    @classmethod
    def coordinate(cls, n: int, which: str = "e", exact: bool = True) -> "LagrangianFrame":
        """span(e_1..e_n) or span(f_1..f_n)."""
        eye = numeric.identity(n, exact=exact)
        zero = eye * 0
        parts = [eye, zero] if which == "e" else [zero, eye]
        return cls(np.concatenate(parts, axis=0))


def direct_sum(*frames: LagrangianFrame) -> LagrangianFrame:
    """Block direct sum of Lagrangians of R^{2n_1}, ..., R^{2n_k} in the global ordering."""
    ns = [f.n for f in frames]
    n = sum(ns)
    exact = all(f.exact for f in frames)
    out = np.zeros((2 * n, n), dtype=object if exact else float)
    if exact:
        out[...] = Fraction(0)
    off = 0
    for f, k in zip(frames, ns):
        fr = f.frame if exact else numeric.to_float(f.frame)
        out[off:off + k, off:off + k] = fr[:k]
        out[n + off:n + off + k, off:off + k] = fr[k:]
        off += k
    return LagrangianFrame(out)


def is_transverse(l1: LagrangianFrame, l2: LagrangianFrame) -> tuple[bool, float]:
    """(transverse?, gap) where gap is |det[L1 | L2]| over the product of column norms."""
    if l1.n != l2.n:
        raise NumericError("Lagrangians live in different spaces")
    cat = np.concatenate([l1.frame, l2.frame], axis=1)
    if l1.exact and l2.exact:
        d = numeric.det(cat)
        norms = np.prod([float(np.linalg.norm(c)) for c in numeric.to_float(cat).T])
        return d != 0, abs(float(d)) / norms
    cat = numeric.to_float(cat)
    norms = np.prod(np.linalg.norm(cat, axis=0))
    gap = abs(float(np.linalg.det(cat))) / norms
    return gap > numeric.EPS, gap


@dataclass(frozen=True)
class GraphData:
    source: LagrangianFrame
    reference: LagrangianFrame
    T: np.ndarray  # L1-frame coordinates -> L3-frame coordinates


def _require_transverse(a, b, names):
    ok, gap = is_transverse(a, b)
    if not ok:
        raise TransversalityError(f"{names[0]} and {names[1]} are not transverse (gap {gap:.3g})")


def graph_map(l1: LagrangianFrame, l3: LagrangianFrame, l: LagrangianFrame) -> GraphData:
    """The linear map T13: L1 -> L3 whose graph is L."""
    _require_transverse(l1, l3, ("L1", "L3"))
    _require_transverse(l, l3, ("L", "L3"))
    exact = l1.exact and l3.exact and l.exact
    conv = (lambda a: a) if exact else numeric.to_float
    basis = np.concatenate([conv(l1.frame), conv(l3.frame)], axis=1)
    coef = numeric.solve(basis, conv(l.frame))
    n = l1.n
    x, y = coef[:n], coef[n:]
    t = y.dot(numeric.inverse(x))
    return GraphData(l1, l3, t)


def q_form(l: LagrangianFrame, l1: LagrangianFrame, l3: LagrangianFrame) -> np.ndarray:
    """Gram matrix of x -> <x, T13 x> on L1 (in L1's frame basis)."""
    gd = graph_map(l1, l3, l)
    exact = numeric.is_exact(gd.T)
    conv = (lambda a: a) if exact else numeric.to_float
    om = omega(l1.n, exact)
    q = conv(l1.frame).T.dot(om).dot(conv(l3.frame)).dot(gd.T)
    if exact:
        if np.any(q != q.T):
            raise NumericError("graph form is not symmetric")
        return q
    scale = max(1.0, float(np.max(np.abs(q))))
    if numeric.symmetry_residual(q) > 1e3 * numeric.EPS * scale:
        raise NumericError(f"graph form is not symmetric (residual {numeric.symmetry_residual(q):.3g})")
    return 0.5 * (q + q.T)


def symplectic_polar(g):
    """g = U P with P = (g^T g)^{1/2} SPD symplectic and U orthogonal symplectic.

    Computed from the SVD, which stays accurate when g is badly conditioned.
    """
    g = numeric.to_float(g)
    w, s, vt = np.linalg.svd(g)
    p = (vt.T * s) @ vt
    return w @ vt, 0.5 * (p + p.T)


def batch_unitary_part(gs):
    """Orthogonal polar factor for a stack of matrices (N, m, m)."""
    gs = np.asarray(gs, dtype=float)
    w, s, vt = np.linalg.svd(gs)
    if np.any(s <= 0):
        raise NumericError("singular matrix in polar decomposition")
    return w @ vt


def unitary_det(u, tol: float | None = None) -> complex:
    """det(A + iB) for U = [[A, -B], [B, A]] in Sp(2n) cap O(2n)."""
    u = numeric.to_float(u)
    n = _half_dim(u.shape[0])
    a, b = u[:n, :n], u[n:, :n]
    tol = 1e3 * numeric.EPS if tol is None else tol
    res = max(np.max(np.abs(u[:n, n:] + b)), np.max(np.abs(u[n:, n:] - a)))
    if res > tol:
        raise NumericError(f"matrix is not in block-unitary form (residual {res:.3g})")
    return complex(np.linalg.det(a + 1j * b))


def batch_unitary_det(us) -> np.ndarray:
    us = np.asarray(us, dtype=float)
    n = us.shape[-1] // 2
    return np.linalg.det(us[..., :n, :n] + 1j * us[..., n:, :n])


def unitary_embed(c) -> np.ndarray:
    """Complex n x n matrix -> real [[Re, -Im], [Im, Re]]."""
    c = np.asarray(c, dtype=complex)
    return np.block([[c.real, -c.imag], [c.imag, c.real]])


# ---------------------------------------------------------------------------
# random generators (tests and scans)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Product of random shears and a GL(n) block: a generic float symplectic matrix."""
    def sym():
        s = rng.normal(scale=scale, size=(n, n))
        return 0.5 * (s + s.T)

    eye, zero = np.eye(n), np.zeros((n, n))
    up = np.block([[eye, sym()], [zero, eye]])
    lo = np.block([[eye, zero], [sym(), eye]])
    a = np.eye(n) + 0.3 * scale * rng.normal(size=(n, n))
    d = np.block([[a, zero], [zero, np.linalg.inv(a).T]])
    return up @ lo @ d @ up.T @ np.block([[eye, zero], [sym(), eye]])


def random_rational_symplectic(n: int, rng: np.random.Generator, size: int = 3) -> np.ndarray:
    """Exact symplectic matrix from rational shears and a unimodular-ish GL(n) block."""
    def rat():
        return Fraction(int(rng.integers(-size, size + 1)), int(rng.integers(1, size + 1)))

    def sym():
        s = numeric.identity(n, exact=True) * 0
        for i in range(n):
            for j in range(i, n):
                s[i, j] = s[j, i] = rat()
        return s

    eye = numeric.identity(n, exact=True)
    zero = eye * 0
    g = numeric.identity(2 * n, exact=True)
    for _ in range(2):
        up = np.block([[eye, sym()], [zero, eye]])
        lo = np.block([[eye, zero], [sym(), eye]])
        g = g.dot(up).dot(lo)
    a = eye.copy()
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = rat()
    d = np.block([[a, zero], [zero, numeric.inverse(a).T]])
    return g.dot(d)


def random_rational_lagrangian(n: int, rng: np.random.Generator, size: int = 3) -> LagrangianFrame:
    """Graph [I; S] of a random rational symmetric S over a random coordinate Lagrangian.

    Every Lagrangian is such a graph for some choice of coordinates (e_i -> f_i,
    f_i -> -e_i on a subset), so all of the Grassmannian is reached; small
    entries make non-transverse configurations reasonably common.
    """
    sym = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            sym[i, j] = sym[j, i] = Fraction(int(rng.integers(-size, size + 1)), int(rng.integers(1, size + 1)))
    top = numeric.identity(n, exact=True)
    frame = np.concatenate([top, sym], axis=0)
    for i in np.nonzero(rng.random(n) < 0.5)[0]:
        frame[[i, n + i]] = np.stack([-frame[n + i], frame[i]])
    return LagrangianFrame(frame, check=False)


def random_lagrangian(n: int, rng: np.random.Generator) -> LagrangianFrame:
    return LagrangianFrame.coordinate(n, "e", exact=False).transform(random_symplectic(n, rng)).orthonormal()

"""Scalar backends and small dense symmetric-matrix kernels.

Two backends share one set of entry points:

* exact: numpy object arrays (or nested lists) of ``fractions.Fraction``/int.
  Signatures are computed by congruence diagonalization with no rounding.
* float: ordinary float64 arrays.  Every sign decision uses the module
  tolerance ``EPS`` (see :func:`set_tolerance`).

The eigensolver is a cyclic Jacobi iteration that also works on stacks of
matrices (shape ``(..., m, m)``), which is how the scans in
:mod:`maxrep.boundary` evaluate thousands of tiny forms at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational

import numpy as np

EPS = 1e-9
MAX_SWEEPS = 60


class NumericError(ValueError):
    """Raised when an input violates a kernel's precondition."""


class ConvergenceError(NumericError):
    pass


def set_tolerance(eps: float) -> float:
    """Set the global float tolerance; returns the previous value."""
    global EPS
    if not eps > 0:
        raise NumericError(f"tolerance must be positive, got {eps!r}")
    old, EPS = EPS, float(eps)
    return old


def get_tolerance() -> float:
    return EPS


@dataclass(frozen=True)
class Signature:
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def index(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero

    def __iter__(self):
        return iter((self.n_plus, self.n_minus, self.n_zero))


# ---------------------------------------------------------------------------
# backend helpers


def is_exact(a) -> bool:
    """True if every entry of ``a`` is an int/Fraction (not bool, not float)."""
    arr = np.asarray(a, dtype=object)
    if arr.size == 0:
        return False
    return all(isinstance(x, Rational) and not isinstance(x, bool) for x in arr.flat)


def to_exact(a) -> np.ndarray:
    """Convert to an object array of Fractions.

    Strings like ``"3/4"`` and ints are accepted; floats are converted exactly
    (their binary value), so pass strings when a decimal is meant.
    """
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = Fraction(x)
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(np.asarray(a, dtype=object).astype(float), dtype=float)


def parse_scalar(s) -> Fraction | float:
    """Parse a serialized scalar: ``"p/q"`` or integer strings are exact, decimals float."""
    if isinstance(s, (int, Fraction)) and not isinstance(s, bool):
        return Fraction(s)
    if isinstance(s, float):
        return s
    s = str(s).strip()
    if any(c in s for c in ".eE") or s.lower() in ("nan", "inf", "-inf"):
        return float(s)
    return Fraction(s)


def format_scalar(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_matrix(rows) -> np.ndarray:
    """Row-major array of serialized scalars -> exact or float ndarray."""
    vals = [[parse_scalar(v) for v in row] for row in rows]
    if all(isinstance(v, Fraction) for row in vals for v in row):
        return to_exact(vals)
    return np.array([[float(v) for v in row] for row in vals], dtype=float)


def format_matrix(a) -> list[list[str]]:
    arr = np.asarray(a, dtype=object)
    return [[format_scalar(x) for x in row] for row in arr]


def identity(m: int, exact: bool = False) -> np.ndarray:
    if exact:
        out = np.full((m, m), Fraction(0), dtype=object)
        for i in range(m):
            out[i, i] = Fraction(1)
        return out
    return np.eye(m)


def _check_square(a: np.ndarray) -> None:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise NumericError(f"expected square matrix, got shape {a.shape}")


def symmetry_residual(s) -> float:
    a = np.asarray(s, dtype=object) if is_exact(s) else np.asarray(s, dtype=float)
    _check_square(a)
    d = a - np.swapaxes(a, -1, -2)
    return float(np.max(np.abs(d.astype(float)))) if d.size else 0.0


# ---------------------------------------------------------------------------
# inversion / determinant


def inverse(a) -> np.ndarray:
    """Matrix inverse; exact Gauss-Jordan on rationals, LAPACK otherwise."""
    if not is_exact(a):
        return np.linalg.inv(np.asarray(a, dtype=float))
    m = to_exact(a)
    _check_square(m)
    n = m.shape[0]
    aug = np.concatenate([m, identity(n, exact=True)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if piv is None:
            raise NumericError("singular matrix")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] / aug[col, col]
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[col]
    return aug[:, n:]


def solve(a, b) -> np.ndarray:
    if is_exact(a) and is_exact(b):
        return inverse(a).dot(to_exact(b))
    return np.linalg.solve(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def det(a):
    """Determinant; exact Fraction for rational input."""
    if not is_exact(a):
        return float(np.linalg.det(np.asarray(a, dtype=float)))
    m = to_exact(a).copy()
    _check_square(m)
    n = m.shape[0]
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            result = -result
        result *= m[col, col]
        for r in range(col + 1, n):
            if m[r, col] != 0:
                m[r] = m[r] - (m[r, col] / m[col, col]) * m[col]
    return result


def rank(a, tol: float | None = None) -> int:
    if is_exact(a):
        m = to_exact(a).copy()
        rows, cols = m.shape
        r = 0
        for col in range(cols):
            piv = next((i for i in range(r, rows) if m[i, col] != 0), None)
            if piv is None:
                continue
            m[[r, piv]] = m[[piv, r]]
            for i in range(r + 1, rows):
                if m[i, col] != 0:
                    m[i] = m[i] - (m[i, col] / m[r, col]) * m[r]
            r += 1
            if r == rows:
                break
        return r
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if tol is None:
        tol = EPS * max(1.0, sv[0])
    return int(np.sum(sv > tol))


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def sym_eigen(s, eps: float | None = None, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix (or a stack of them).

    Cyclic Jacobi rotations are applied until every off-diagonal entry is
    below ``eps * ||S||_F``; one extra sweep is then run to polish the
    eigenvectors.  Returns ``(w, V)`` with eigenvalues sorted descending and
    ``S = V diag(w) V^T``.
    """
    eps = EPS if eps is None else eps
    a = np.array(s, dtype=float)
    _check_square(a)
    if symmetry_residual(a) > eps * max(1.0, float(np.max(np.abs(a), initial=0.0))):
        raise NumericError("sym_eigen: input is not symmetric")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    batch = a.shape[:-2]
    m = a.shape[-1]
    a = a.reshape((-1, m, m))
    v = np.broadcast_to(np.eye(m), a.shape).copy()
    scale = np.linalg.norm(a, axis=(-1, -2))
    thresh = (eps * np.where(scale > 0, scale, 1.0))[:, None, None]
    off_mask = ~np.eye(m, dtype=bool)

    polish = 1
    for _ in range(max_sweeps):
        if not np.any(np.abs(a[:, off_mask]) >= thresh[:, :, 0]):
            if polish == 0:
                break
            polish -= 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[:, p, q]
                live = apq != 0.0
                if not np.any(live):
                    continue
                app = a[:, p, p]
                aqq = a[:, q, q]
                with np.errstate(all="ignore"):
                    theta = np.where(live, (aqq - app) / (2.0 * apq), 0.0)
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                c_ = c[:, None]
                s_ = sn[:, None]
                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = c_ * colp - s_ * colq
                a[:, :, q] = s_ * colp + c_ * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = c_ * rowp - s_ * rowq
                a[:, q, :] = s_ * rowp + c_ * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = c_ * vp - s_ * vq
                v[:, :, q] = s_ * vp + c_ * vq
    else:
        worst = float(np.max(np.abs(a[:, off_mask]) / thresh[:, :, 0])) if m > 1 else 0.0
        raise ConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps "
            f"(off-diagonal / threshold = {worst:.3g})"
        )

    w = np.diagonal(a, axis1=-2, axis2=-1).copy()
    order = np.argsort(-w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(batch + (m,)), v.reshape(batch + (m, m))


# ---------------------------------------------------------------------------
# signature


def integer_rows(s) -> list[list[int]]:
    """Rows of a rational matrix scaled by the positive lcm of its denominators."""
    vals = [[Fraction(x) for x in row] for row in np.asarray(s, dtype=object)]
    den = 1
    for row in vals:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in vals]


def _integer_signature(a: list[list[int]]) -> Signature:
    """Inertia of an integer symmetric matrix by fraction-free symmetric elimination.

    With pivot p the Schur complement S' = A22 - a a^T / p is replaced by
    |p| S' = sign(p) (p A22 - a a^T), which is integral and has the same
    inertia; rows are divided by the common gcd to keep entries small.
    """
    m0 = len(a)
    a = [row[:] for row in a]
    n_plus = n_minus = 0
    while a:
        m = len(a)
        piv = next((i for i in range(m) if a[i][i] != 0), None)
        if piv is None:
            nz = next(((i, j) for i in range(m) for j in range(i + 1, m) if a[i][j] != 0), None)
            if nz is None:
                break
            i, j = nz
            # congruence x_i <- x_i + x_j exposes a pivot: new s_ii = 2 s_ij
            for c in range(m):
                a[i][c] += a[j][c]
            for r in range(m):
                a[r][i] += a[r][j]
            continue
        p = a[piv][piv]
        sgn = 1 if p > 0 else -1
        if sgn > 0:
            n_plus += 1
        else:
            n_minus += 1
        rest = [r for r in range(m) if r != piv]
        prow = a[piv]
        a = [[sgn * (p * a[r][c] - a[r][piv] * prow[c]) for c in rest] for r in rest]
        g = 0
        for row in a:
            for x in row:
                g = gcd(g, x)
        if g > 1:
            a = [[x // g for x in row] for row in a]
    return Signature(n_plus, n_minus, m0 - n_plus - n_minus)


def _exact_signature(s: np.ndarray) -> Signature:
    return _integer_signature(integer_rows(s))


def sym_signature(s, eps: float | None = None) -> Signature:
    """Inertia (n+, n-, n0) of the quadratic form x -> x^T S x."""
    if is_exact(s):
        a = to_exact(s)
        _check_square(a)
        if np.any(a != a.T):
            raise NumericError("sym_signature: input is not symmetric")
        if a.shape[0] == 0:
            return Signature(0, 0, 0)
        return _exact_signature(a)
    eps = EPS if eps is None else eps
    a = np.asarray(s, dtype=float)
    _check_square(a)
    if a.shape[0] == 0:
        return Signature(0, 0, 0)
    w, _ = sym_eigen(a, eps=eps)
    plus = int(np.sum(w > eps))
    minus = int(np.sum(w < -eps))
    return Signature(plus, minus, a.shape[0] - plus - minus)


def batch_signature(stack, eps: float | None = None) -> np.ndarray:
    """Float signatures of a stack (N, m, m); returns an (N, 3) int array."""
    eps = EPS if eps is None else eps
    w, _ = sym_eigen(np.asarray(stack, dtype=float), eps=eps)
    plus = np.sum(w > eps, axis=-1)
    minus = np.sum(w < -eps, axis=-1)
    return np.stack([plus, minus, w.shape[-1] - plus - minus], axis=-1)


# ---------------------------------------------------------------------------
# SPD functions and norms


def _require_spd(w, what: str, eps: float) -> None:
    if np.any(w <= eps):
        raise NumericError(f"{what}: matrix is not positive definite (min eigenvalue {np.min(w):.3g})")


def spd_power(p, t: float, eps: float | None = None) -> np.ndarray:
    """P**t for symmetric positive definite P."""
    eps = EPS if eps is None else eps
    w, v = sym_eigen(p, eps=eps)
    _require_spd(w, "spd_power", eps)
    return (v * w[..., None, :] ** t) @ np.swapaxes(v, -1, -2)


def rel_operator_norm(g1, g2, eps: float | None = None):
    """Norm of the identity map (R^m, G1) -> (R^m, G2).

    Equals ``sup sqrt(x^T G2 x / x^T G1 x) = sqrt(lambda_max(G1^{-1} G2))``.
    Accepts stacks; the eigenproblem is symmetrized through the Cholesky
    factor of G1.
    """
    eps = EPS if eps is None else eps
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    try:
        c = np.linalg.cholesky(g1)
    except np.linalg.LinAlgError:
        raise NumericError("rel_operator_norm: first Gram matrix is not positive definite") from None
    ci = np.linalg.inv(c)
    m = ci @ g2 @ np.swapaxes(ci, -1, -2)
    w, _ = sym_eigen(m, eps=eps)
    _require_spd(w, "rel_operator_norm", 0.0)
    return np.sqrt(w[..., 0])

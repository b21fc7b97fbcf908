"""Toledo invariant from the lifted surface relator.

Each generator image g gets a path Id -> g inside Sp(2n, R) (unitary
eigenphases rotated linearly times the SPD path P^t).  Concatenating the
left-translated paths along the relator gives a closed loop; its class in
pi_1(Sp(2n, R)) = Z is the winding number of det_C of the unitary polar
factor.

Normalization: a genus-g hyperbolization into SL(2, R) has det-winding
g - 1, and the invariant is reported as twice the winding so that it equals
2g - 2 there and maximal representations into Sp(2n, R) reach n(2g - 2).
The sign is fixed so that :func:`maxrep.surface.default_hyperbolization`
is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numeric
from .numeric import NumericError
from .representations import SurfaceRep
from .symplectic import batch_unitary_det, batch_unitary_part, symplectic_inverse, symplectic_polar, unitary_embed

WINDING_SCALE = 2.0
# sign convention: the doubled-torus hyperbolization winds positively in
# det_C with the (e, f) ordering; kept as a knob for the opposite orientation
ORIENTATION = 1
MAX_STEP = math.pi / 2
INTEGER_TOL = 1e-3


class ToledoError(NumericError):
    pass


@dataclass(frozen=True)
class ToledoResult:
    T: int
    winding: float
    relator_residual: float
    n: int
    genus: int
    samples: int

    @property
    def bound(self) -> int:
        return self.n * (2 * self.genus - 2)

    @property
    def maximal(self) -> bool:
        return abs(self.T) == self.bound

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "winding": self.winding,
            "relator_residual": self.relator_residual,
            "maximal": self.maximal,
            "bound": self.bound,
            "samples": self.samples,
        }


class GeneratorPath:
    """t -> u(t) p(t) from Id to g; ``extra_turns`` adds full turns to the first eigenphase."""

    def __init__(self, g, extra_turns: int = 0):
        g = numeric.to_float(g)
        self.g = g
        n = g.shape[0] // 2
        u, p = symplectic_polar(g)
        c = u[:n, :n] + 1j * u[n:, :n]
        tri, z = scipy.linalg.schur(c, output="complex")
        phases = np.angle(np.diag(tri))
        if extra_turns:
            phases = phases.copy()
            phases[0] += 2.0 * math.pi * extra_turns
        self.phases = phases
        self._z = z
        self._w, self._v = numeric.sym_eigen(p)
        self.n = n

    def __call__(self, t):
        """Path value(s): scalar t gives one matrix, an array gives a stack."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        rot = np.exp(1j * ts[:, None] * self.phases[None, :])
        cu = (self._z[None] * rot[:, None, :]) @ self._z.conj().T
        n = self.n
        u = np.empty((len(ts), 2 * n, 2 * n))
        u[:, :n, :n] = cu.real
        u[:, :n, n:] = -cu.imag
        u[:, n:, :n] = cu.imag
        u[:, n:, n:] = cu.real
        p = (self._v[None] * self._w[None, None, :] ** ts[:, None, None]) @ self._v.T
        out = u @ p
        return out[0] if np.ndim(t) == 0 else out

    def inverse(self, t):
        out = self(t)
        n = self.n
        om = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        return -om @ np.swapaxes(out, -1, -2) @ om


def generator_path(g, t):
    return GeneratorPath(g)(t)


def _phase(mats) -> np.ndarray:
    return np.angle(batch_unitary_det(batch_unitary_part(mats)))


def _wrap(d):
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def _segment_change(seg, start: np.ndarray, initial: int = 16, budget: int = 1 << 16) -> tuple[float, int]:
    """Continuous change of arg det_C along t -> start @ seg(t), t in [0, 1]."""
    ts = np.linspace(0.0, 1.0, initial + 1)
    ph = _phase(start @ seg(ts))
    while True:
        d = _wrap(np.diff(ph))
        bad = np.nonzero(np.abs(d) >= MAX_STEP)[0]
        if bad.size == 0:
            return float(np.sum(d)), len(ts)
        if len(ts) + bad.size > budget:
            raise ToledoError("refinement budget exceeded while tracking the relator loop")
        mids = 0.5 * (ts[bad] + ts[bad + 1])
        mph = _phase(start @ seg(mids))
        ts = np.insert(ts, bad + 1, mids)
        ph = np.insert(ph, bad + 1, mph)


def relator_winding(rho: SurfaceRep, paths: dict[int, GeneratorPath] | None = None) -> ToledoResult:
    if rho.relator_residual >= 1e-6:
        raise ToledoError(f"relator residual {rho.relator_residual:.3g} too large")
    if rho.relator_sign != 1:
        raise ToledoError("relator evaluates to -Id; the lift to the universal cover does not close")
    if paths is None:
        paths = {}
    for k in range(1, len(rho.matrices) + 1):
        paths.setdefault(k, GeneratorPath(rho.matrices[k - 1]))
    total = 0.0
    samples = 0
    prefix = np.eye(2 * rho.n)
    for x in rho.presentation.relator:
        path = paths[abs(x)]
        seg = path if x > 0 else path.inverse
        change, count = _segment_change(seg, prefix)
        total += change
        samples += count
        m = rho.matrices[x - 1] if x > 0 else symplectic_inverse(rho.matrices[-x - 1])
        prefix = prefix @ m
    winding = ORIENTATION * WINDING_SCALE * total / (2.0 * math.pi)
    t = int(round(winding))
    if abs(winding - t) >= INTEGER_TOL:
        raise ToledoError(f"winding did not converge to an integer: {winding:.6f}")
    return ToledoResult(t, winding, rho.relator_residual, rho.n, rho.genus, samples)


def toledo(rho: SurfaceRep, paths: dict[int, GeneratorPath] | None = None) -> ToledoResult:
    """Relator winding plus the Milnor-Wood check |T| <= n(2g - 2)."""
    res = relator_winding(rho, paths)
    if abs(res.T) > res.bound:
        raise ToledoError(f"|T| = {abs(res.T)} exceeds the Milnor-Wood bound {res.bound}: this is a bug")
    return res


__all__ = ["GeneratorPath", "ToledoError", "ToledoResult", "generator_path", "relator_winding",
           "toledo", "unitary_embed"]

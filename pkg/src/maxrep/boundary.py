"""Sampled boundary maps of Anosov representations and the checks built on them.

The boundary map phi: S^1 -> L(V) is only ever evaluated at attracting fixed
points: for a word w, the attracting fixed point of h(w) on the circle is sent
to the attracting Lagrangian of rho(w).  Everything downstream (maximality of
triples, transversality, monotonicity, length of the curve in a chart) is
computed from that finite skeleton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Sequence

import numpy as np
import scipy.linalg

from . import numeric
from .maslov import CirclePoint, batch_maslov, complex_structure_from_triple
from .numeric import NumericError
from .representations import SurfaceRep
from .siegel import ComplexStructureJ, standard_j
from .surface import (
    Hyperbolization,
    Word,
    evaluate_word,
    inverse_word,
    is_proper_power,
    translation_length,
    word_batches,
    words_with_matrices,
)
from .symplectic import LagrangianFrame, TransversalityError, omega, symplectic_inverse

DEFAULT_GAP = 0.05
DEDUPE_TOL = 1e-10
MIN_SAMPLES = 12
DEFAULT_MAX_SAMPLES = 600
# sampled frames are accurate to ~1e-14, so the suites resolve tighter than
# the global default; this matters near the diagonal, where transversality
# of a curve with high contact order degrades like a power of the spacing
SAMPLE_TOL = 1e-12
# stack size for batched form evaluations
CHUNK = 50000
TWO_PI = 2.0 * math.pi


class ProximalityError(NumericError):
    pass


# ---------------------------------------------------------------------------
# attracting Lagrangians


def spectral_gap(g, n: int) -> tuple[float, float]:
    """(|lambda_n|, |lambda_{n+1}|) with moduli sorted decreasingly."""
    mods = np.sort(np.abs(np.linalg.eigvals(np.asarray(g, dtype=float))))[::-1]
    return float(mods[n - 1]), float(mods[n])


def attracting_lagrangian(g, delta: float = DEFAULT_GAP, tol: float | None = None,
                          max_iter: int = 500) -> LagrangianFrame:
    """Orthonormal frame of the expanding invariant subspace of g.

    Seeded with the ordered real Schur basis (eigenvalues outside the unit
    circle first), then refined by subspace iteration with QR
    re-orthonormalization until the subspace stops moving.
    """
    g = numeric.to_float(g)
    n = g.shape[0] // 2
    tol = 1e3 * numeric.EPS if tol is None else tol
    big, small = spectral_gap(g, n)
    if not (big > 1.0 + delta and small < 1.0 - delta and big / small > 1.0 + delta):
        raise ProximalityError(f"not proximal enough: |lambda_n| = {big:.6g}, |lambda_n+1| = {small:.6g}")
    _, z, sdim = scipy.linalg.schur(g, output="real", sort="ouc")
    if sdim != n:
        raise ProximalityError(f"{sdim} eigenvalues outside the unit circle, expected {n}")
    q = z[:, :n]
    # rounding in g @ q limits how still the subspace can get
    floor = max(numeric.EPS * 1e-2, 1e3 * np.finfo(float).eps * float(np.linalg.norm(g, 2)) / big)
    for _ in range(max_iter):
        q_new = np.linalg.qr(g @ q)[0]
        change = float(np.linalg.norm(q_new - q @ (q.T @ q_new), 2))
        q = q_new
        if change < floor:
            break
    else:
        raise numeric.ConvergenceError("subspace iteration did not converge")
    res = float(np.max(np.abs(q.T @ omega(n) @ q)))
    if res > tol:
        raise NumericError(f"expanding subspace is not Lagrangian (isotropy residual {res:.3g})")
    return LagrangianFrame(q, check=False)


def repelling_lagrangian(g, delta: float = DEFAULT_GAP) -> LagrangianFrame:
    return attracting_lagrangian(symplectic_inverse(numeric.to_float(g)), delta)


def circle_fixed_points(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Attracting fixed-point angles of a stack of SL(2, R) matrices, plus a hyperbolic mask."""
    mats = np.asarray(mats, dtype=float)
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    tr = a + d
    hyper = np.abs(tr) > 2.0 + 1e-12
    disc = np.sqrt(np.maximum(tr * tr - 4.0, 0.0))
    lam = 0.5 * (tr + np.sign(tr) * disc)
    # eigenvector (b, lam - a) or (lam - d, c), whichever is larger
    v1 = np.stack([b, lam - a], axis=-1)
    v2 = np.stack([lam - d, c], axis=-1)
    use1 = np.linalg.norm(v1, axis=-1) >= np.linalg.norm(v2, axis=-1)
    v = np.where(use1[:, None], v1, v2)
    alpha = np.mod(np.arctan2(v[:, 1], v[:, 0]), math.pi)
    return 2.0 * alpha, hyper


# ---------------------------------------------------------------------------
# limit curve samples


@dataclass(frozen=True)
class SampleEntry:
    point: CirclePoint
    frame: LagrangianFrame
    word: Word
    gap: float


@dataclass
class LimitCurveSample:
    entries: list[SampleEntry]
    n: int
    skipped: int = 0
    max_len: int = 0

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: e.point.theta)
        ang = self.angles
        if len(ang) > 1 and np.any(np.diff(ang) <= 0):
            raise NumericError("sample angles must be strictly increasing")

    def __len__(self):
        return len(self.entries)

    @property
    def angles(self) -> np.ndarray:
        return np.array([e.point.theta for e in self.entries])

    @property
    def frames(self) -> np.ndarray:
        return np.stack([e.frame.frame.astype(float) for e in self.entries])

    @property
    def words(self) -> list[Word]:
        return [e.word for e in self.entries]

    def index_of(self, word: Sequence[int]) -> int:
        word = tuple(word)
        for i, e in enumerate(self.entries):
            if e.word == word:
                return i
        raise KeyError(word)

    def find_angle(self, theta: float, tol: float = 1e-8) -> int | None:
        ang = self.angles
        d = np.abs(np.angle(np.exp(1j * (ang - theta))))
        i = int(np.argmin(d))
        return i if d[i] <= tol else None


def _candidate_words(h: Hyperbolization, max_len: int):
    """(angle, word) for every non-power word with hyperbolic image, shortest first."""
    out_angles, out_words = [], []
    for length, words, mats in words_with_matrices(h.matrices, max_len):
        if length == 0:
            continue
        ang, hyper = circle_fixed_points(mats)
        for i in np.nonzero(hyper)[0]:
            w = words[i]
            if not is_proper_power(w):
                out_angles.append(ang[i])
                out_words.append(w)
    return np.array(out_angles), out_words


def sample_limit_curve(rho: SurfaceRep, h: Hyperbolization, max_len: int, delta: float = DEFAULT_GAP,
                       max_samples: int | None = DEFAULT_MAX_SAMPLES, pin_len: int = 1) -> LimitCurveSample:
    """Pairs (attracting point of h(w), attracting Lagrangian of rho(w)) for words of length <= max_len.

    Angles closer than 1e-10 are merged (the shortest word wins).  With
    ``max_samples`` the circle is cut into that many equal bins and only the
    shortest word landing in the middle half of each bin is kept, so samples
    are at least half a bin apart.  The rule only depends on which words are
    present, so raising ``max_len`` yields a superset of samples.  Words of
    length <= ``pin_len`` are always kept (they anchor the charts).
    """
    if rho.genus != h.genus:
        raise NumericError("representation and hyperbolization have different presentations")
    angles, words = _candidate_words(h, max_len)
    if len(words) == 0:
        raise NumericError("insufficient resolution: no hyperbolic words")
    # words are generated shortest first, and lexicographically within a length
    order = np.argsort(angles, kind="stable")
    keep: list[int] = []
    for i in order:
        if keep and abs(angles[i] - angles[keep[-1]]) <= DEDUPE_TOL:
            if len(words[i]) < len(words[keep[-1]]):
                keep[-1] = i
            continue
        keep.append(i)
    if len(keep) > 1 and abs(angles[keep[0]] + TWO_PI - angles[keep[-1]]) <= DEDUPE_TOL:
        first, last = keep[0], keep.pop()
        if len(words[last]) < len(words[first]):
            keep[0] = last
    if max_samples:
        best: dict[int, int] = {}
        pinned = [i for i in keep if len(words[i]) <= pin_len]
        for i in keep:
            pos = angles[i] / TWO_PI * max_samples
            b = int(pos) % max_samples
            if not 0.25 <= pos - math.floor(pos) < 0.75:
                continue
            if b not in best or i < best[b]:
                best[b] = i
        # keep the half-bin spacing around pinned points too
        half = 0.5 * TWO_PI / max_samples
        pinned_angles = angles[pinned] if pinned else np.zeros(0)
        spaced = [i for i in best.values()
                  if not np.any(np.abs(np.angle(np.exp(1j * (pinned_angles - angles[i])))) < half)]
        keep = sorted(set(spaced) | set(pinned), key=lambda i: angles[i])
    entries, skipped = [], 0
    for i in keep:
        w = words[i]
        g = rho(w)
        try:
            frame = attracting_lagrangian(g, delta)
        except ProximalityError:
            skipped += 1
            continue
        big, small = spectral_gap(g, rho.n)
        entries.append(SampleEntry(CirclePoint(angles[i]), frame, w, big / small))
    if len(entries) < MIN_SAMPLES:
        raise NumericError(f"insufficient resolution: only {len(entries)} samples survived the gap check")
    return LimitCurveSample(entries, rho.n, skipped, max_len)


def equivariance_residual(sample: LimitCurveSample, rho: SurfaceRep, h: Hyperbolization, gen: int) -> tuple[int, float]:
    """(matches, worst subspace distance) between rho(gen) L_x and the sample at h(gen) x."""
    g_rho = rho((gen,))
    g_h = h((gen,))
    worst, matches = 0.0, 0
    for e in sample.entries:
        j = sample.find_angle(e.point.act(g_h).theta)
        if j is None:
            continue
        moved = np.linalg.qr(g_rho @ e.frame.frame.astype(float))[0]
        target = sample.entries[j].frame.frame.astype(float)
        worst = max(worst, subspace_distance(moved, target))
        matches += 1
    return matches, worst


def subspace_distance(a, b) -> float:
    """Spectral norm of the difference of orthogonal projections."""
    qa = np.linalg.qr(np.asarray(a, dtype=float))[0]
    qb = np.linalg.qr(np.asarray(b, dtype=float))[0]
    return float(np.linalg.norm(qa @ qa.T - qb @ qb.T, 2))


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class VerificationReport:
    name: str
    checked: int = 0
    violations: int = 0
    skipped: int = 0
    witnesses: list = field(default_factory=list)
    seed: int | None = None

    MAX_WITNESSES = 10

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def add(self, witness) -> None:
        self.violations += 1
        if len(self.witnesses) < self.MAX_WITNESSES:
            self.witnesses.append(witness)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        out = VerificationReport(self.name, self.checked + other.checked, self.violations + other.violations,
                                 self.skipped + other.skipped, self.witnesses + other.witnesses, self.seed)
        out.witnesses = out.witnesses[:self.MAX_WITNESSES]
        return out

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "checked": self.checked,
            "violations": self.violations,
            "skipped": self.skipped,
            "seed": self.seed,
            "witnesses": self.witnesses,
        }


def _index_tuples(count: int, k: int, trials: int | None, rng: np.random.Generator) -> np.ndarray:
    """All k-subsets (sorted) if there are at most ``trials`` of them, else ``trials`` random ones."""
    total = math.comb(count, k)
    if trials is None or total <= trials:
        flat = chain.from_iterable(combinations(range(count), k))
        return np.fromiter(flat, dtype=np.int64, count=total * k).reshape(-1, k)
    out = np.empty((trials, k), dtype=np.int64)
    filled = 0
    while filled < trials:
        cand = rng.integers(0, count, size=(2 * (trials - filled), k))
        cand.sort(axis=1)
        distinct = np.all(np.diff(cand, axis=1) > 0, axis=1)
        cand = cand[distinct][: trials - filled]
        out[filled:filled + len(cand)] = cand
        filled += len(cand)
    return out


def cyclic_orientation(a, b, c) -> np.ndarray:
    """Vectorized orientation cocycle on angles: +1 if a, b, c are positively cyclically ordered."""
    db = np.mod(b - a, TWO_PI)
    dc = np.mod(c - a, TWO_PI)
    out = np.where(db < dc, 1, -1)
    same = (np.abs(np.angle(np.exp(1j * (a - b)))) <= 1e-12) | (np.abs(np.angle(np.exp(1j * (b - c)))) <= 1e-12) \
        | (np.abs(np.angle(np.exp(1j * (a - c)))) <= 1e-12)
    return np.where(same, 0, out)


def verify_maximality(sample: LimitCurveSample, trials: int | None = 20000, seed: int = 0,
                      shuffle: bool = True, tol: float = SAMPLE_TOL) -> VerificationReport:
    """beta_n(phi(x), phi(y), phi(z)) = n beta_1(x, y, z) on sampled triples.

    Triples are drawn as index subsets; with ``shuffle`` each one is put in a
    random order so both orientations are exercised.
    """
    rng = np.random.default_rng(seed)
    rep = VerificationReport("maximality", seed=seed)
    if len(sample) < 3:
        raise NumericError("need at least 3 samples")
    idx = _index_tuples(len(sample), 3, trials, rng)
    if shuffle:
        idx = np.take_along_axis(idx, np.argsort(rng.random(idx.shape), axis=1), axis=1)
    ang, frames = sample.angles, sample.frames
    beta1 = cyclic_orientation(ang[idx[:, 0]], ang[idx[:, 1]], ang[idx[:, 2]])
    betan = np.empty(len(idx), dtype=np.int64)
    for s in range(0, len(idx), CHUNK):
        part = idx[s:s + CHUNK]
        betan[s:s + CHUNK] = batch_maslov(frames[part[:, 0]], frames[part[:, 1]], frames[part[:, 2]], eps=tol)
    rep.checked = len(idx)
    for t in np.nonzero(betan != sample.n * beta1)[0]:
        i, j, k = (int(x) for x in idx[t])
        rep.add({"indices": [i, j, k], "angles": [float(ang[i]), float(ang[j]), float(ang[k])],
                 "beta_n": int(betan[t]), "beta_1": int(beta1[t])})
    return rep


def verify_transversality(sample: LimitCurveSample, tol: float = SAMPLE_TOL) -> VerificationReport:
    rep = VerificationReport("transversality")
    if len(sample) < 2:
        raise NumericError("need at least 2 samples")
    frames = sample.frames
    i, j = np.triu_indices(len(sample), k=1)
    gaps = np.empty(len(i))
    step = 50000
    for s in range(0, len(i), step):
        cat = np.concatenate([frames[i[s:s + step]], frames[j[s:s + step]]], axis=2)
        gaps[s:s + step] = np.abs(np.linalg.det(cat))
    rep.checked = len(i)
    for t in np.nonzero(gaps <= tol)[0]:
        rep.add({"indices": [int(i[t]), int(j[t])], "gap": float(gaps[t])})
    return rep


def batch_q_form(f, f1, f3) -> np.ndarray:
    """Q_L^{L1,L3} for stacks of frames, in the L1-frame coordinates.

    Solves [L1 | L3][X; Y] = L, sets T = Y X^{-1} and returns L1^T Omega L3 T.
    """
    n = f.shape[-1]
    basis = np.concatenate([f1, f3], axis=-1)
    xy = np.linalg.solve(basis, f)
    x, y = xy[..., :n, :], xy[..., n:, :]
    t = np.swapaxes(np.linalg.solve(np.swapaxes(x, -1, -2), np.swapaxes(y, -1, -2)), -1, -2)
    q = np.swapaxes(f1, -1, -2) @ omega(n) @ f3 @ t
    return 0.5 * (q + np.swapaxes(q, -1, -2))


def _min_eig(q: np.ndarray) -> np.ndarray:
    w, _ = numeric.sym_eigen(q)
    return w[..., -1]


def _monotone_margins(frames: np.ndarray, idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Relative smallest eigenvalues of Q1 and Q2 - Q1 for index quadruples; -inf where undefined."""
    f0, f1, f2, finf = (frames[idx[:, k]] for k in range(4))
    with np.errstate(all="ignore"):
        try:
            q1 = batch_q_form(f1, f0, finf)
            q2 = batch_q_form(f2, f0, finf)
        except np.linalg.LinAlgError:
            q1 = q2 = None
    if q1 is None or not (np.all(np.isfinite(q1)) and np.all(np.isfinite(q2))):
        # fall back one by one so the offending quadruple is reported
        q1 = np.full((len(idx), n, n), np.nan)
        q2 = q1.copy()
        for t in range(len(idx)):
            try:
                q1[t] = batch_q_form(f1[t], f0[t], finf[t])
                q2[t] = batch_q_form(f2[t], f0[t], finf[t])
            except np.linalg.LinAlgError:
                pass
    finite = np.all(np.isfinite(q1), axis=(1, 2)) & np.all(np.isfinite(q2), axis=(1, 2))
    low = np.full(len(idx), -np.inf)
    gap = np.full(len(idx), -np.inf)
    if np.any(finite):
        # each form is judged against its own size
        d = q2[finite] - q1[finite]
        with np.errstate(all="ignore"):
            low[finite] = _min_eig(q1[finite]) / np.max(np.abs(q1[finite]), axis=(1, 2))
            gap[finite] = _min_eig(d) / np.max(np.abs(d), axis=(1, 2))
    return low, gap


def verify_monotonicity(sample: LimitCurveSample, trials: int | None = 20000, seed: int = 0,
                        tol: float = SAMPLE_TOL) -> VerificationReport:
    """0 < Q_{L1}^{L0,Linf} < Q_{L2}^{L0,Linf} for positively ordered quadruples (L0, L1, L2, Linf)."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("monotonicity", seed=seed)
    if len(sample) < 4:
        raise NumericError("need at least 4 samples")
    idx = _index_tuples(len(sample), 4, trials, rng)
    frames = sample.frames
    low = np.empty(len(idx))
    gap = np.empty(len(idx))
    for s in range(0, len(idx), CHUNK):
        low[s:s + CHUNK], gap[s:s + CHUNK] = _monotone_margins(frames, idx[s:s + CHUNK], sample.n)
    rep.checked = len(idx)
    for t in np.nonzero(~((low > tol) & (gap > tol)))[0]:
        rep.add({"indices": [int(x) for x in idx[t]], "min_eig_q1": float(low[t]), "min_eig_q2_minus_q1": float(gap[t])})
    return rep


# ---------------------------------------------------------------------------
# length in a chart


@dataclass(frozen=True)
class ChartLength:
    length: float
    bound: float
    samples: int
    forms: np.ndarray

    @property
    def within_bound(self) -> bool:
        return self.length <= self.bound * (1.0 + 1e-12) + 1e-12


class ConeViolation(NumericError):
    pass


def chart_indices(sample: LimitCurveSample, a: int, b: int) -> np.ndarray:
    """Indices of samples strictly inside the positive arc from sample a to sample b."""
    ang = sample.angles
    span = (ang[b] - ang[a]) % TWO_PI
    rel = (ang - ang[a]) % TWO_PI
    inside = (rel > 0) & (rel < span)
    idx = np.nonzero(inside)[0]
    return idx[np.argsort(rel[idx])]


def chart_forms(sample: LimitCurveSample, a: int, b: int) -> np.ndarray:
    inner = chart_indices(sample, a, b)
    frames = sample.frames
    m = len(inner)
    fa = np.broadcast_to(frames[a], (m,) + frames[a].shape)
    fb = np.broadcast_to(frames[b], (m,) + frames[b].shape)
    try:
        return batch_q_form(frames[inner], fa, fb)
    except np.linalg.LinAlgError:
        raise TransversalityError("a sample inside the chart is not transverse to its endpoints") from None


def rectifiable_length(sample: LimitCurveSample, chart: tuple[int, int], min_inner: int = 4,
                       clip: tuple[int, int] | None = None) -> ChartLength:
    """Polygonal Frobenius length of t -> Q_{phi(t)}^{L_a, L_b} and the bound tr(Q_last - Q_first).

    Consecutive differences must be positive definite: the curve runs inside
    the cone of positive forms, where tr X >= ||X||_F bounds every polygon.
    ``clip`` = (c, d) restricts to the samples on the closed arc from c to d
    (both inside the chart), so the bound stays fixed under refinement.
    """
    a, b = chart
    inner = chart_indices(sample, a, b)
    qs = chart_forms(sample, a, b)
    if clip is not None:
        pos = {int(i): k for k, i in enumerate(inner)}
        if clip[0] not in pos or clip[1] not in pos:
            raise NumericError("clip samples must lie inside the chart")
        lo, hi = sorted((pos[clip[0]], pos[clip[1]]))
        inner, qs = inner[lo:hi + 1], qs[lo:hi + 1]
    if len(qs) < min_inner:
        raise NumericError(f"need at least {min_inner} samples inside the chart, found {len(qs)}")
    diffs = np.diff(qs, axis=0)
    if len(diffs):
        low = _min_eig(diffs)
        bad = np.nonzero(low <= 0)[0]
        if bad.size:
            k = int(bad[0])
            raise ConeViolation(f"cone violation between samples {int(inner[k])} and {int(inner[k + 1])} "
                                f"(min eigenvalue {low[k]:.3g})")
    length = float(np.sum(np.linalg.norm(diffs, axis=(1, 2))))
    bound = float(np.trace(qs[-1] - qs[0]))
    return ChartLength(length, bound, len(qs), qs)


def fixed_point_chart(sample: LimitCurveSample, word: Sequence[int]) -> tuple[int, int]:
    """Chart from the repelling to the attracting fixed point of ``word``."""
    word = tuple(word)
    return sample.index_of(inverse_word(word)), sample.index_of(word)


# ---------------------------------------------------------------------------
# orbit growth


def _j_conjugator(j0: ComplexStructureJ) -> tuple[np.ndarray, np.ndarray]:
    """(S, S^{-1}) with S = G^{1/2}, so that d(J0, g J0) = 2 ln sigma_max(S g S^{-1})."""
    w, v = np.linalg.eigh(j0.gram)
    s = (v * np.sqrt(w)) @ v.T
    si = (v / np.sqrt(w)) @ v.T
    return s, si


def fast_orbit_distances(gs: np.ndarray, j0: ComplexStructureJ | None = None) -> np.ndarray:
    """d(J0, g J0) for a stack of symplectic g, via the top singular value.

    For J0 with Gram matrix G, G^{1/2} is symplectic and carries J0 to the
    standard structure, where the distance is 2 ln sigma_max.  This uses the
    LAPACK symmetric solver and is cross-checked against
    :func:`maxrep.siegel.orbit_distances` in the tests.
    """
    gs = np.asarray(gs, dtype=float)
    if j0 is not None and not np.allclose(j0.gram, np.eye(gs.shape[-1]), atol=1e-14):
        s, si = _j_conjugator(j0)
        gs = s @ gs @ si
    top = np.linalg.eigvalsh(np.swapaxes(gs, -1, -2) @ gs)[..., -1]
    return np.log(np.maximum(top, 1.0))


@dataclass
class QiScanReport:
    max_len: int
    minima: np.ndarray
    maxima: np.ndarray
    counts: np.ndarray
    slope: float
    intercept: float
    argmin_words: list

    @property
    def lengths(self) -> np.ndarray:
        return np.arange(1, self.max_len + 1)

    def minima_nondecreasing(self, start: int = 3, slack: float = 1e-9) -> bool:
        m = self.minima[start - 1:]
        return bool(np.all(np.diff(m) >= -slack))

    def as_dict(self) -> dict:
        return {
            "max_len": self.max_len,
            "lengths": self.lengths.tolist(),
            "min": self.minima.tolist(),
            "max": self.maxima.tolist(),
            "count": self.counts.tolist(),
            "A": self.slope,
            "B": self.intercept,
        }


class _ShorterElements:
    """Membership test 'this SL(2, R) matrix equals some word of length <= max_len'.

    Matrices come from a faithful hyperbolization; they are indexed by a
    random linear fingerprint and confirmed entrywise.
    """

    def __init__(self, gens, max_len: int, rtol: float = 1e-9):
        self.rtol = rtol
        rng = np.random.default_rng(12345)
        self.x, self.y = rng.standard_normal(2), rng.standard_normal(2)
        mats, lengths = [np.eye(2)[None]], [np.zeros(1, dtype=np.int64)]
        if max_len > 0:
            for length, _, m in word_batches(gens, max_len, dehn=True):
                mats.append(m)
                lengths.append(np.full(len(m), length))
        mats = np.concatenate(mats)
        lengths = np.concatenate(lengths)
        fp = self._fingerprint(mats)
        order = np.argsort(fp)
        self.fp, self.mats, self.lengths = fp[order], mats[order], lengths[order]

    def _fingerprint(self, mats):
        return np.einsum("i,nij,j->n", self.x, mats, self.y)

    def contains(self, mats: np.ndarray, max_len: int) -> np.ndarray:
        """Which matrices equal an element of word length <= max_len."""
        scale = np.max(np.abs(mats), axis=(1, 2))
        tol = self.rtol * scale * (np.abs(self.x).sum() * np.abs(self.y).sum())
        fp = self._fingerprint(mats)
        lo = np.searchsorted(self.fp, fp - tol)
        hi = np.searchsorted(self.fp, fp + tol)
        out = np.zeros(len(mats), dtype=bool)
        for t in np.nonzero(hi > lo)[0]:
            short = self.lengths[lo[t]:hi[t]] <= max_len
            cand = self.mats[lo[t]:hi[t]][short]
            out[t] = bool(np.any(np.max(np.abs(cand - mats[t]), axis=(1, 2)) <= self.rtol * scale[t]))
        return out


def qi_scan(rho: SurfaceRep, max_len: int, j0: ComplexStructureJ | None = None,
            reference: Hyperbolization | None = None, geodesic: bool = True) -> QiScanReport:
    """Per-length min/max of d(J0, rho(w) J0) over words of each length, and a linear fit of the minima.

    Words are Dehn-reduced (they never represent the identity and include a
    geodesic for every element).  With ``geodesic`` the words whose element
    has a shorter representative are dropped as well, using a faithful
    ``reference`` hyperbolization (default: the one rho was built from) to
    identify elements, so the length of each word is its length in the group.
    Since the relator has even length, a length-l word is non-geodesic exactly
    when its element is represented by a word of length <= l - 2.
    The fit is min_l ~ A l - B.
    """
    if max_len < 3:
        raise ValueError("qi_scan needs max_len >= 3")
    j0 = standard_j(rho.n) if j0 is None else j0
    ref = reference if reference is not None else rho.reference
    if geodesic and ref is None:
        raise NumericError("geodesic scan needs a reference hyperbolization")
    lo = np.full(max_len, np.inf)
    hi = np.zeros(max_len)
    counts = np.zeros(max_len, dtype=np.int64)
    argmin: list = [None] * max_len
    batches = word_batches(rho.matrices, max_len, dehn=True)
    if geodesic:
        shorter = _ShorterElements(ref.matrices, max_len - 2)
        # both enumerations visit words in the same order
        batches = ((l, w, m, hm) for (l, w, m), (_, _, hm) in zip(batches, word_batches(ref.matrices, max_len)))
    else:
        batches = ((l, w, m, None) for l, w, m in batches)
    for length, words, mats, hmats in batches:
        if hmats is not None and length >= 3:
            keep = ~shorter.contains(hmats, length - 2)
            words, mats = words[keep], mats[keep]
        if len(mats) == 0:
            continue
        d = fast_orbit_distances(mats, j0)
        k = length - 1
        i = int(np.argmin(d))
        if d[i] < lo[k]:
            lo[k] = d[i]
            argmin[k] = tuple(int(x) for x in words[i])
        hi[k] = max(hi[k], float(np.max(d)))
        counts[k] += len(d)
    ls = np.arange(1, max_len + 1, dtype=float)
    slope, icpt = np.polyfit(ls, lo, 1)
    return QiScanReport(max_len, lo, hi, counts, float(slope), float(-icpt), argmin)


def generator_distances(rho: SurfaceRep, j0: ComplexStructureJ | None = None) -> np.ndarray:
    j0 = standard_j(rho.n) if j0 is None else j0
    return fast_orbit_distances(np.stack(rho.matrices), j0)


# ---------------------------------------------------------------------------
# contraction along axes


@dataclass(frozen=True)
class ContractionResult:
    word: Word
    measured: float
    predicted: float
    growth: float
    monotone: bool
    norms: np.ndarray

    @property
    def meets_prediction(self) -> bool:
        return self.measured >= self.predicted - 0.05


def _positive_interval_frame(sample: LimitCurveSample, lo: float, hi: float, n: int,
                             lminus: LagrangianFrame, lplus: LagrangianFrame) -> LagrangianFrame:
    """A sampled Lagrangian over the positive arc from angle lo to angle hi, as central as possible."""
    ang = sample.angles
    span = (hi - lo) % TWO_PI
    rel = (ang - lo) % TWO_PI
    cand = np.nonzero((rel > 1e-9) & (rel < span - 1e-9))[0]
    if cand.size == 0:
        raise NumericError("no sampled point between the fixed points")
    cand = cand[np.argsort(np.abs(rel[cand] - span / 2))]
    for i in cand:
        f = sample.entries[i].frame
        try:
            complex_structure_from_triple(lminus, f, lplus)
            return f
        except NumericError:
            continue
    raise NumericError("no sampled point forms a maximal triple with the fixed points")


def contraction_exponent(rho: SurfaceRep, h: Hyperbolization, word: Sequence[int], k_max: int = 30,
                         sample: LimitCurveSample | None = None, delta: float = DEFAULT_GAP,
                         n_random: int = 4, seed: int = 0) -> ContractionResult:
    """Decay rate of rho(w)^k on the repelling Lagrangian, per unit translation length of h(w).

    Norms are taken in q_J for J = J(phi(w-), phi(m), phi(w+)).  The measured
    exponent is -ln ||rho(w)^k|_{L-}||_J / (k ell) at k = k_max (operator norm
    of the restriction), the prediction ln|lambda_n| / ell.
    """
    word = tuple(word)
    g = rho(word)
    n = rho.n
    lplus = attracting_lagrangian(g, delta)
    lminus = repelling_lagrangian(g, delta)
    if sample is None:
        sample = sample_limit_curve(rho, h, 3, delta)
    hw = h(word)
    ell = translation_length(hw)
    ang, _ = circle_fixed_points(np.stack([hw, np.linalg.inv(hw)]))
    plus_angle, minus_angle = ang
    mid = _positive_interval_frame(sample, minus_angle, plus_angle, n, lminus, lplus)
    j = complex_structure_from_triple(lminus, mid, lplus)
    big, _ = spectral_gap(g, n)
    predicted = math.log(big) / ell

    def restricted(frame):
        f = frame.frame.astype(float)
        r = np.linalg.lstsq(f, g @ f, rcond=None)[0]
        gram = f.T @ j.gram @ f
        return r, 0.5 * (gram + gram.T)

    def op_norm(m, gram):
        c = np.linalg.cholesky(gram)
        ci = np.linalg.inv(c)
        return float(np.linalg.norm(c.T @ m @ ci.T, 2))

    r_minus, gram_minus = restricted(lminus)
    rng = np.random.default_rng(seed)
    xis = np.concatenate([np.eye(n), rng.standard_normal((n, n_random))], axis=1)
    base = np.sqrt(np.einsum("ij,ik,kj->j", xis, gram_minus, xis))
    norms = np.empty((k_max + 1, xis.shape[1]))
    norms[0] = base
    ops = np.empty(k_max + 1)
    ops[0] = 1.0
    pk = np.eye(n)
    for k in range(1, k_max + 1):
        pk = r_minus @ pk
        v = pk @ xis
        norms[k] = np.sqrt(np.einsum("ij,ik,kj->j", v, gram_minus, v))
        ops[k] = op_norm(pk, gram_minus)
    monotone = bool(np.all(np.diff(norms, axis=0) < 0) and np.all(np.diff(ops) < 0))
    measured = -math.log(ops[-1]) / (k_max * ell)

    r_plus, gram_plus = restricted(lplus)
    grow = np.linalg.matrix_power(r_plus, k_max)
    c = np.linalg.cholesky(gram_plus)
    # smallest stretch of the restriction to L+
    smin = float(np.linalg.svd(c.T @ grow @ np.linalg.inv(c.T), compute_uv=False)[-1])
    growth = math.log(smin) / (k_max * ell)
    return ContractionResult(word, measured, predicted, growth, monotone, norms / base)


def maximal_sample_suite(sample: LimitCurveSample, trials: int = 20000, seed: int = 0) -> list[VerificationReport]:
    return [
        verify_maximality(sample, trials, seed),
        verify_transversality(sample),
        verify_monotonicity(sample, trials, seed),
    ]


def word_image(rho: SurfaceRep, word: Sequence[int]) -> np.ndarray:
    return evaluate_word(rho.matrices, word)

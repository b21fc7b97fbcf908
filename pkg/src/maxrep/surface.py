"""Surface group presentations, words, and genus-2 Fuchsian groups built by doubling.

Words are tuples of nonzero ints: generator ``k`` (1-based) is ``k`` and its
inverse is ``-k``.  For genus g the generators are ordered
a_1, b_1, ..., a_g, b_g, i.e. a_i = 2i - 1 and b_i = 2i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np
import scipy.optimize

from .maslov import CirclePoint
from .numeric import NumericError

Word = tuple[int, ...]


class WordError(ValueError):
    pass


def check_reduced(w: Sequence[int]) -> Word:
    w = tuple(int(x) for x in w)
    if any(x == 0 for x in w):
        raise WordError("letter 0 is not a generator")
    for x, y in zip(w, w[1:]):
        if x == -y:
            raise WordError(f"word {w} is not freely reduced")
    return w


def free_reduce(w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def inverse_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def commutator(x: int, y: int) -> Word:
    return (x, y, -x, -y)


@dataclass(frozen=True)
class Presentation:
    genus: int
    names: tuple[str, ...] = field(init=False)
    relator: Word = field(init=False)

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be >= 1")
        names = []
        rel: list[int] = []
        for i in range(1, self.genus + 1):
            names += [f"a{i}", f"b{i}"]
            rel += commutator(2 * i - 1, 2 * i)
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "relator", tuple(rel))

    @property
    def n_generators(self) -> int:
        return 2 * self.genus

    def parse(self, text: str) -> Word:
        """Parse ``"a1 b1 A1"`` style words (capital letter = inverse)."""
        out = []
        for tok in text.replace("*", " ").split():
            inv = tok[0].isupper()
            name = tok[0].lower() + tok[1:]
            if name not in self.names:
                raise WordError(f"unknown generator {tok!r}")
            k = self.names.index(name) + 1
            out.append(-k if inv else k)
        return check_reduced(out)

    def format(self, w: Sequence[int]) -> str:
        parts = []
        for x in w:
            name = self.names[abs(x) - 1]
            parts.append(name if x > 0 else name[0].upper() + name[1:])
        return " ".join(parts) if parts else "e"


def enumerate_reduced_words(k: int, max_len: int) -> Iterator[Word]:
    """Every freely reduced word over k generators of length <= max_len, by length."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    letters = [x for g in range(1, k + 1) for x in (g, -g)]
    level: list[Word] = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nw = w + (x,)
                nxt.append(nw)
                yield nw
        level = nxt


def count_reduced_words(k: int, length: int) -> int:
    return 1 if length == 0 else 2 * k * (2 * k - 1) ** (length - 1)


def is_proper_power(w: Word) -> bool:
    n = len(w)
    return any(n % d == 0 and w == w[:d] * (n // d) for d in range(1, n))


def evaluate_word(assignment: Mapping[int, np.ndarray] | Sequence[np.ndarray], w: Sequence[int],
                  inverses: Mapping[int, np.ndarray] | None = None) -> np.ndarray:
    """Left-to-right product of generator images; ``assignment`` is indexed from 1 if a mapping."""
    w = check_reduced(w)
    get = (lambda k: assignment[k]) if isinstance(assignment, Mapping) else (lambda k: assignment[k - 1])
    first = np.asarray(get(1))
    out = np.eye(first.shape[0], dtype=first.dtype)
    for x in w:
        if x > 0:
            m = get(x)
        elif inverses is not None:
            m = inverses[-x]
        else:
            m = np.linalg.inv(get(-x))
        out = out @ m
    return out


def words_with_matrices(gens: Sequence[np.ndarray], max_len: int):
    """Yield (length, words, stacked images) level by level, extending products by one letter."""
    gens = [np.asarray(g, dtype=float) for g in gens]
    k = len(gens)
    inv = [np.linalg.inv(g) for g in gens]
    table = {}
    for i in range(k):
        table[i + 1] = gens[i]
        table[-(i + 1)] = inv[i]
    letters = [x for g in range(1, k + 1) for x in (g, -g)]
    m = gens[0].shape[0]
    words: list[Word] = [()]
    mats = np.eye(m)[None]
    yield 0, words, mats
    for length in range(1, max_len + 1):
        nw, blocks = [], []
        for x in letters:
            keep = [i for i, w in enumerate(words) if not (w and w[-1] == -x)]
            nw += [words[i] + (x,) for i in keep]
            blocks.append(mats[keep] @ table[x])
        words, mats = nw, np.concatenate(blocks, axis=0)
        yield length, words, mats


def relator_subwords(genus: int, length: int) -> set[Word]:
    """Subwords of the given length of the cyclic conjugates of r and r^{-1}."""
    rel = Presentation(genus).relator
    out = set()
    for r in (rel, inverse_word(rel)):
        doubled = r + r
        out.update(doubled[i:i + length] for i in range(len(r)))
    return out


def is_dehn_reduced(w: Sequence[int], genus: int) -> bool:
    """Freely reduced and free of any subword longer than half a relator conjugate."""
    w = tuple(w)
    if any(w[i] == -w[i + 1] for i in range(len(w) - 1)):
        return False
    half = 2 * genus + 1
    bad = relator_subwords(genus, half)
    return not any(w[i:i + half] in bad for i in range(len(w) - half + 1))


class _LetterCodes:
    """Letters as codes 0..2k-1 (x -> 2(|x|-1) + [x < 0]) plus a table of forbidden windows."""

    def __init__(self, genus: int, dehn: bool):
        k = 2 * genus
        self.base = 2 * k
        self.letters = np.array([x for g in range(1, k + 1) for x in (g, -g)])
        self.inverse_code = np.arange(self.base) ^ 1
        self.window = 2 * genus + 1 if dehn else 0
        self.forbidden = None
        if dehn:
            table = np.zeros(self.base ** self.window, dtype=bool)
            for w in relator_subwords(genus, self.window):
                table[self.key(np.array([[self.code(x) for x in w]]))[0]] = True
            self.forbidden = table

    def code(self, x: int) -> int:
        return 2 * (abs(x) - 1) + (1 if x < 0 else 0)

    def key(self, codes: np.ndarray) -> np.ndarray:
        out = np.zeros(codes.shape[0], dtype=np.int64)
        for j in range(codes.shape[1]):
            out = out * self.base + codes[:, j]
        return out


def _extend(lc: _LetterCodes, codes: np.ndarray, mats: np.ndarray, table: np.ndarray):
    n, length = codes.shape
    child = np.broadcast_to(np.arange(lc.base), (n, lc.base))
    ok = np.ones((n, lc.base), dtype=bool)
    if length:
        ok &= child != lc.inverse_code[codes[:, -1]][:, None]
    if lc.forbidden is not None and length >= lc.window - 1:
        tail = lc.key(codes[:, length - lc.window + 1:])
        ok &= ~lc.forbidden[tail[:, None] * lc.base + child]
    parent, letter = np.nonzero(ok)
    new_codes = np.concatenate([codes[parent], letter[:, None]], axis=1)
    return new_codes, mats[parent] @ table[letter]


def word_batches(gens: Sequence[np.ndarray], max_len: int, dehn: bool = True, split: int = 4,
                 chunk: int = 64):
    """Yield (length, words, images) for reduced words of length 1..max_len.

    ``words`` is an int array of shape (N, length) in the signed-letter
    convention.  With ``dehn`` only Dehn-reduced words are produced (no
    subword longer than half of a cyclic conjugate of the relator or its
    inverse); these represent nontrivial elements.  Levels beyond ``split``
    are produced depth-first in chunks of ``chunk`` prefixes so memory stays
    bounded; a length may therefore be yielded several times.
    """
    gens = [np.asarray(g, dtype=float) for g in gens]
    if len(gens) % 2:
        raise WordError("need an even number of generators")
    lc = _LetterCodes(len(gens) // 2, dehn)
    table = np.stack([m for g in gens for m in (g, np.linalg.inv(g))])
    codes = np.zeros((1, 0), dtype=np.int64)
    mats = np.eye(gens[0].shape[0])[None]
    top = min(split, max_len)
    for length in range(1, top + 1):
        codes, mats = _extend(lc, codes, mats, table)
        yield length, lc.letters[codes], mats
    for start in range(0, codes.shape[0], chunk):
        c, m = codes[start:start + chunk], mats[start:start + chunk]
        for length in range(top + 1, max_len + 1):
            c, m = _extend(lc, c, m, table)
            yield length, lc.letters[c], m


def count_words_by_length(genus: int, max_len: int, dehn: bool = True) -> list[int]:
    counts = [0] * (max_len + 1)
    eye = [np.eye(2)] * (2 * genus)
    for length, words, _ in word_batches(eye, max_len, dehn):
        counts[length] += len(words)
    return counts[1:]


# ---------------------------------------------------------------------------
# SL(2, R)


def sl2_commutator(a, b) -> np.ndarray:
    return a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)


def _rotation_about_i(angle: float) -> np.ndarray:
    """Elliptic element of SL(2,R) rotating the upper half-plane about i by ``angle``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, s], [-s, c]])


def one_holed_torus(lam: float, mu: float, angle: float):
    """Generators of a one-holed torus group.

    A translates by multiplier lam^2 along the imaginary axis; B translates by
    mu^2 along the geodesic through i at ``angle`` to it.  Returns
    ``(A, B, K, trace K)`` with K = [A, B].
    """
    if lam <= 1 or mu <= 1:
        raise NumericError("multipliers must exceed 1")
    a = np.diag([lam, 1.0 / lam])
    r = _rotation_about_i(angle)
    b = r @ np.diag([mu, 1.0 / mu]) @ np.linalg.inv(r)
    k = sl2_commutator(a, b)
    tr = float(np.trace(k))
    if not tr < -2.0:
        raise NumericError(f"not a one-holed torus group: tr[A,B] = {tr:.12g} >= -2")
    return a, b, k, tr


def hyperbolic_axis(m) -> tuple[np.ndarray, np.ndarray]:
    """(attracting, repelling) eigenvectors of a hyperbolic SL(2,R) matrix."""
    m = np.asarray(m, dtype=float)
    tr = float(np.trace(m))
    if abs(tr) <= 2.0:
        raise NumericError(f"not hyperbolic: |trace| = {abs(tr):.12g} <= 2")
    w, v = np.linalg.eig(m)
    w, v = w.real, v.real
    order = np.argsort(-np.abs(w))
    return v[:, order[0]], v[:, order[1]]


def translation_length(m) -> float:
    """Hyperbolic translation length 2 arccosh(|tr|/2) of an SL(2,R) element."""
    tr = abs(float(np.trace(np.asarray(m, dtype=float))))
    if tr <= 2.0:
        raise NumericError(f"not hyperbolic: |trace| = {tr:.12g} <= 2")
    return 2.0 * math.acosh(tr / 2.0)


def mobius_fixed_points(m) -> tuple[CirclePoint, CirclePoint]:
    att, rep = hyperbolic_axis(m)
    return CirclePoint.from_direction(att), CirclePoint.from_direction(rep)


def _axis_frame(k) -> tuple[np.ndarray, np.ndarray]:
    """Matrix C in SL(2,R) with C^{-1} K C = +-diag(t, 1/t), t > 1."""
    att, rep = hyperbolic_axis(k)
    c = np.column_stack([att, rep])
    d = np.linalg.det(c)
    if d < 0:
        c[:, 1] = -c[:, 1]
        d = -d
    return c / math.sqrt(d), np.linalg.inv(c / math.sqrt(d))


@dataclass(frozen=True)
class Hyperbolization:
    """SL(2,R) images of a_1, b_1, ..., a_g, b_g."""

    matrices: tuple[np.ndarray, ...]
    twist: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) % 2:
            raise NumericError("need an even number of generators")

    @property
    def genus(self) -> int:
        return len(self.matrices) // 2

    @property
    def presentation(self) -> Presentation:
        return Presentation(self.genus)

    def __call__(self, w: Sequence[int]) -> np.ndarray:
        return evaluate_word(self.matrices, w)

    def relator_value(self) -> np.ndarray:
        return self(self.presentation.relator)

    def relator_residual(self) -> float:
        return float(np.max(np.abs(self.relator_value() - np.eye(2))))

    def separating_curve(self) -> np.ndarray:
        return self(commutator(1, 2))

    def conjugate(self, g) -> "Hyperbolization":
        g = np.asarray(g, dtype=float)
        gi = np.linalg.inv(g)
        return Hyperbolization(tuple(g @ m @ gi for m in self.matrices), self.twist, dict(self.params))

    def balanced(self) -> "Hyperbolization":
        """Conjugate minimizing the summed squared Frobenius norms of the generators.

        Keeps words (and their images under higher-dimensional representations)
        well scaled; the group itself is unchanged up to conjugation.
        """
        def conj(x):
            s = math.exp(x[0] / 2)
            return np.array([[s, x[1] / s], [0.0, 1.0 / s]])

        def cost(x):
            g = conj(x)
            gi = np.linalg.inv(g)
            return sum(float(np.sum((g @ m @ gi) ** 2)) for m in self.matrices)

        best = scipy.optimize.minimize(cost, np.zeros(2), method="Nelder-Mead",
                                       options={"xatol": 1e-10, "fatol": 1e-12})
        return self.conjugate(conj(best.x))

    def handle_traces(self) -> list[float]:
        return [float(np.trace(sl2_commutator(self.matrices[2 * i], self.matrices[2 * i + 1])))
                for i in range(self.genus)]


def double_torus(a, b, twist: float = 0.0, tol: float = 1e-9) -> Hyperbolization:
    """Genus-2 group from a one-holed torus group <A, B> glued to a rotated copy.

    J_s is the half-turn about a point on the axis of K = [A, B] followed by a
    translation by ``twist`` along that axis; a_2 = J_s A J_s^{-1},
    b_2 = J_s B J_s^{-1}, so [a_2, b_2] = K^{-1}.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = sl2_commutator(a, b)
    c, ci = _axis_frame(k)
    # in axis coordinates K is diagonal; the half-turn about the axis point i
    # is [[0, 1], [-1, 0]] and translation along the axis is diagonal
    half_turn = np.array([[0.0, 1.0], [-1.0, 0.0]])
    shift = np.diag([math.exp(twist / 2), math.exp(-twist / 2)])
    j = c @ shift @ half_turn @ ci
    ji = np.linalg.inv(j)
    a2 = j @ a @ ji
    b2 = j @ b @ ji
    h = Hyperbolization((a, b, a2, b2), twist=twist)
    res = h.relator_residual()
    if res > tol:
        raise NumericError(f"doubled relator residual {res:.3g} exceeds {tol:g}")
    return h


DEFAULT_LAMBDA = 3.0


def default_hyperbolization(twist: float = 0.0, lam: float = DEFAULT_LAMBDA, mu: float = DEFAULT_LAMBDA,
                            angle: float = math.pi / 2) -> Hyperbolization:
    a, b, _, _ = one_holed_torus(lam, mu, angle)
    h = double_torus(a, b, twist).balanced()
    object.__setattr__(h, "params", {"lambda": lam, "mu": mu, "angle": angle, "twist": twist})
    return h


def commutator_trace(lam: float, mu: float, angle: float) -> float:
    """tr[A, B] for :func:`one_holed_torus` parameters (closed form)."""
    x = (lam - 1.0 / lam) * (mu - 1.0 / mu) * math.sin(angle)
    return 2.0 - x * x / 4.0


def matched_hyperbolization(h: Hyperbolization, lam: float, angle: float, twist: float = 0.0,
                            tol: float = 1e-9) -> Hyperbolization:
    """A second genus-2 hyperbolization with the same separating-curve image.

    A one-holed torus <A', B'> with multiplier ``lam`` and crossing ``angle`` is
    chosen with tr[A', B'] = tr[A, B] (solving for B's multiplier), conjugated
    so that [A', B'] equals h([a1, b1]) as a matrix, then doubled with ``twist``.
    Different (lam, angle) give a handle structure inequivalent to h's.
    """
    k = h.separating_curve()
    target = float(np.trace(k))
    x = math.sqrt(4.0 * (2.0 - target)) / ((lam - 1.0 / lam) * math.sin(angle))
    mu = (x + math.sqrt(x * x + 4.0)) / 2.0
    a2, b2, k2, _ = one_holed_torus(lam, mu, angle)
    c1, _ = _axis_frame(k)
    c2, c2i = _axis_frame(k2)
    conj = c1 @ c2i
    conj_i = np.linalg.inv(conj)
    a2, b2 = conj @ a2 @ conj_i, conj @ b2 @ conj_i
    res = float(np.max(np.abs(sl2_commutator(a2, b2) - k)))
    if res > tol:
        raise NumericError(f"matched separating curve residual {res:.3g} exceeds {tol:g}")
    out = double_torus(a2, b2, twist, tol)
    object.__setattr__(out, "params", {"lambda": lam, "mu": mu, "angle": angle, "twist": twist})
    return out


def default_pair() -> tuple[Hyperbolization, Hyperbolization]:
    """Two hyperbolizations agreeing on [a1, b1] but inequivalent on both handles."""
    h1 = default_hyperbolization()
    h2 = matched_hyperbolization(h1, DEFAULT_LAMBDA, math.pi / 3, twist=1.0)
    return h1, h2

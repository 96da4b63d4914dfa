"""Fuchsian group presentations and their word balls.

A ball of radius L holds every group element represented by a freely reduced
word of length at most L over the generators and their inverses.  Entries are
kept in arrays (one row per distinct element) in enumeration order: by word
length, then lexicographically on letter codes, where generator ``j`` has
code ``2j`` and its inverse code ``2j + 1``.  Distinct words evaluating to
the same matrix (surface-group relations) are merged, keeping the first.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BallTooLarge,
    EmptyBall,
    FormatError,
    NotSchottky,
    PreconditionError,
    RelatorCheckFailed,
    SpecMismatch,
    WrongSpecKind,
)
from .moebius import (
    IDENTITY,
    INF,
    PRODUCT_DET_RTOL,
    MoebiusTransform,
    classify,
    compose_rows,
    fixed_points,
    inverse_rows,
    is_infinite,
    normalize_rows,
    uhp_distance_arrays,
)

MAX_RADIUS = 12
MAX_BALL_ENTRIES = 50_000_000
FINGERPRINT_GRID = 1e-6
MERGE_RECHECK = 1e-9
RELATOR_TOL = 1e-9

# random-looking functional used to sort matrices so that near-equal ones are adjacent
_KEY_WEIGHTS = np.array([1.0, math.pi, math.e, math.sqrt(2.0)])
_KEY_WINDOW = FINGERPRINT_GRID * float(_KEY_WEIGHTS.sum())


# --- words -----------------------------------------------------------------

def letter_code(gen: int, exp: int) -> int:
    return 2 * gen + (0 if exp > 0 else 1)


@dataclass(frozen=True, order=True)
class Word:
    """Freely reduced word; ``letters`` holds ``(generator, +-1)`` pairs."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        out: list[tuple[int, int]] = []
        for g, e in self.letters:
            if e not in (1, -1) or g < 0:
                raise PreconditionError(f"bad letter {(g, e)!r}")
            if out and out[-1] == (g, -e):
                out.pop()
            else:
                out.append((int(g), int(e)))
        object.__setattr__(self, "letters", tuple(out))

    @classmethod
    def from_signed(cls, seq: Sequence[int]) -> "Word":
        """Build from 1-based signed indices: ``2`` is g1, ``-1`` is g0 inverse."""
        if any(s == 0 for s in seq):
            raise PreconditionError("signed letters are 1-based; 0 is not a letter")
        return cls(tuple((abs(s) - 1, 1 if s > 0 else -1) for s in seq))

    @classmethod
    def from_codes(cls, codes: Sequence[int]) -> "Word":
        return cls(tuple((int(c) // 2, -1 if c % 2 else 1) for c in codes if c >= 0))

    def signed(self) -> tuple[int, ...]:
        return tuple((g + 1) * e for g, e in self.letters)

    def codes(self) -> tuple[int, ...]:
        return tuple(letter_code(g, e) for g, e in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return " ".join(f"g{g}" if e > 0 else f"g{g}^-1" for g, e in self.letters)

    def weight(self, weights: Sequence[int] | None) -> int:
        if weights is None:
            return 0
        return sum(weights[g] * e for g, e in self.letters)

    def evaluate(self, generators: Sequence[MoebiusTransform]) -> MoebiusTransform:
        out = IDENTITY
        for g, e in self.letters:
            out = out @ (generators[g] if e > 0 else generators[g].inverse())
        return out


# --- group specs -----------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    """A finitely presented Fuchsian group, optionally with an integer weight.

    ``kind`` is ``"schottky"``, ``"octagon"`` or ``"kernel"``.  A kernel spec
    shares its base's generators and relators; the group it stands for is
    the kernel of the weight homomorphism.
    """

    label: str
    kind: str
    generators: tuple[MoebiusTransform, ...]
    relators: tuple[tuple[int, ...], ...] = ()
    weights: tuple[int, ...] | None = None
    base: "GroupSpec | None" = field(default=None, compare=False)

    def __post_init__(self):
        if " " in self.label or not self.label:
            raise PreconditionError("spec labels must be nonempty and contain no spaces")
        for k, g in enumerate(self.generators):
            if not classify(g).is_hyperbolic:
                raise PreconditionError(f"generator {k} is not hyperbolic")
        if self.weights is not None:
            if len(self.weights) != len(self.generators):
                raise PreconditionError("one weight per generator is required")
            for rel in self.relators:
                total = sum(self.weights[c // 2] * (-1 if c % 2 else 1) for c in rel)
                if total != 0:
                    raise PreconditionError(f"weights {self.weights} do not vanish on relator {rel}")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_kernel(self) -> bool:
        return self.kind == "kernel"

    def letter_matrices(self) -> np.ndarray:
        """(2n, 4) array: row ``2j`` is g_j, row ``2j+1`` its inverse."""
        rows = []
        for g in self.generators:
            rows.append(g.as_tuple())
            rows.append(g.inverse().as_tuple())
        return np.array(rows, dtype=float)

    def letter_weights(self) -> np.ndarray:
        w = self.weights or (0,) * self.rank
        return np.array([s * wj for wj in w for s in (1, -1)], dtype=np.int64)

    def evaluate(self, word: Word) -> MoebiusTransform:
        return word.evaluate(self.generators)

    def content_hash(self) -> int:
        text = ";".join(",".join(format(v, ".17g") for v in g.as_tuple()) for g in self.generators)
        return fnv1a_64(text.encode())


def fnv1a_64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


OCTAGON_LABEL = "octagon-g2"
# g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3
OCTAGON_RELATOR = (0, 3, 4, 7, 1, 2, 5, 6)


def _relator_candidates(rel: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    inv = tuple(c ^ 1 for c in reversed(rel))
    for base in (rel, inv):
        for k in range(len(base)):
            yield base[k:] + base[:k]


def _evaluate_codes(codes, generators) -> MoebiusTransform:
    return Word.from_codes(codes).evaluate(generators)


def build_octagon_genus2() -> GroupSpec:
    """Side pairings of the regular hyperbolic octagon with angles pi/4.

    Built in the disk model, conjugated to the half-plane by the Cayley map
    ``z -> (z - i) / (z + i)``.  Each generator has trace ``2 + 2 sqrt 2``.
    """
    s2 = math.sqrt(2.0)
    diag = 1.0 + s2
    mu = math.sqrt(2.0 + 2.0 * s2)
    cayley = np.array([[1.0, -1.0j], [1.0, 1.0j]])
    cayley_inv = np.linalg.inv(cayley)
    gens = []
    for k in range(4):
        zeta = cmath.exp(1j * math.pi * k / 4.0)
        disk = np.array([[diag, mu * zeta], [mu * zeta.conjugate(), diag]])
        half = cayley_inv @ disk @ cayley
        if np.max(np.abs(half.imag)) > 1e-10:
            raise RelatorCheckFailed("conjugated octagon generator is not real")
        gens.append(MoebiusTransform.from_array(half.real))
    gens = tuple(gens)

    for rel in _relator_candidates(OCTAGON_RELATOR):
        m = _evaluate_codes(rel, gens)
        if np.max(np.abs(m.as_array() - np.eye(2))) <= RELATOR_TOL:
            return GroupSpec(OCTAGON_LABEL, "octagon", gens, (rel,))
    raise RelatorCheckFailed("no rotation or inverse of the balanced relator closes up")


def _hyperbolic_with_axis(attracting: float, repelling: float, length: float) -> MoebiusTransform:
    if is_infinite(attracting):
        h = MoebiusTransform(1.0, repelling, 0.0, 1.0)
    elif is_infinite(repelling):
        h = MoebiusTransform(attracting, -1.0, 1.0, 0.0)
    elif attracting > repelling:
        h = MoebiusTransform(attracting, repelling, 1.0, 1.0)
    else:
        h = MoebiusTransform(attracting, -repelling, 1.0, -1.0)
    e = math.exp(length / 2.0)
    return h @ MoebiusTransform(e, 0.0, 0.0, 1.0 / e) @ h.inverse()


def disk_isometric_circles(m: MoebiusTransform) -> list[tuple[complex, float]]:
    """Isometric circles of ``m`` and ``m^-1`` in the disk model: (center, radius)."""
    alpha = complex(m.a + m.d, m.b - m.c) / 2.0
    beta = complex(m.a - m.d, -(m.b + m.c)) / 2.0
    if abs(beta) == 0.0:
        raise NotSchottky("generator fixes the disk center")
    r = 1.0 / abs(beta)
    return [(-alpha.conjugate() / beta.conjugate(), r), (alpha / beta.conjugate(), r)]


def build_schottky(pairs: Sequence[tuple[float, float, float]], label: str = "schottky") -> GroupSpec:
    """Schottky group from (attracting, repelling, translation length) triples."""
    if not pairs:
        raise PreconditionError("at least one generator is required")
    gens = []
    for att, rep, length in pairs:
        if not length > 0:
            raise NotSchottky(f"translation length must be positive, got {length}")
        if att == rep or (is_infinite(att) and is_infinite(rep)):
            raise NotSchottky(f"axis endpoints coincide: {att}, {rep}")
        gens.append(_hyperbolic_with_axis(att, rep, length))
    circles = [c for g in gens for c in disk_isometric_circles(g)]
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            (ci, ri), (cj, rj) = circles[i], circles[j]
            if abs(ci - cj) <= ri + rj:
                raise NotSchottky(f"isometric circles {i} and {j} overlap")
    return GroupSpec(label, "schottky", tuple(gens))


def kernel_of_weight(base: GroupSpec, weights: Sequence[int] | None = None) -> GroupSpec:
    """Kernel of the homomorphism to Z sending generator j to ``weights[j]``."""
    if weights is None:
        weights = (1,) + (0,) * (base.rank - 1)
    weights = tuple(int(w) for w in weights)
    if not any(weights):
        raise PreconditionError("the zero weight gives the whole group, not an infinite-index kernel")
    label = f"{base.label}/ker{','.join(str(w) for w in weights)}"
    return GroupSpec(label, "kernel", base.generators, base.relators, weights, base)


DEMO_SCHOTTKY_PAIRS = ((INF, 0.0, 2.0 * math.log(2.0)), (1.5, 2.0 / 3.0, 2.0 * math.log(8.0)))


def catalog(name: str, weights: Sequence[int] | None = None) -> GroupSpec:
    """Named groups: ``octagon``, ``tight`` (kernel of a weight on it), ``schottky``."""
    if name == "octagon":
        return build_octagon_genus2()
    if name == "tight":
        return kernel_of_weight(build_octagon_genus2(), weights)
    if name == "schottky":
        return build_schottky(DEMO_SCHOTTKY_PAIRS, label="schottky-demo")
    raise PreconditionError(f"unknown group {name!r}; choose octagon, tight or schottky")


def spec_from_label(label: str) -> GroupSpec:
    if label == OCTAGON_LABEL:
        return build_octagon_genus2()
    if label.startswith(OCTAGON_LABEL + "/ker"):
        w = label[len(OCTAGON_LABEL) + 4:]
        try:
            return kernel_of_weight(build_octagon_genus2(), [int(s) for s in w.split(",")])
        except ValueError as exc:
            raise FormatError(f"bad kernel label {label!r}") from exc
    if label == "schottky-demo":
        return catalog("schottky")
    raise FormatError(f"cannot rebuild spec for label {label!r}; pass the spec explicitly")


# --- enumeration -----------------------------------------------------------

def reduced_word_count(rank: int, radius: int) -> int:
    k = 2 * rank
    if k == 2:
        return 1 + 2 * radius
    return 1 + k * ((k - 1) ** radius - 1) // (k - 2)


def kernel_word_count(spec: GroupSpec, radius: int) -> int:
    """Number of reduced words of length <= radius with total weight 0."""
    lw = spec.letter_weights()
    k = len(lw)
    total = 1
    # state: (last letter, weight) -> count
    layer = {(c, int(lw[c])): 1 for c in range(k)}
    for length in range(1, radius + 1):
        total += sum(n for (c, w), n in layer.items() if w == 0)
        if length == radius:
            break
        nxt: dict[tuple[int, int], int] = {}
        for (c, w), n in layer.items():
            for c2 in range(k):
                if c2 != c ^ 1:
                    key = (c2, w + int(lw[c2]))
                    nxt[key] = nxt.get(key, 0) + n
        layer = nxt
    return total


def projected_entry_count(spec: GroupSpec, radius: int, kernel_only: bool = False) -> int:
    if not kernel_only:
        return reduced_word_count(spec.rank, radius)
    # the index still holds the full ball of radius - 1 while the last layer streams
    return max(reduced_word_count(spec.rank, max(radius - 1, 0)), kernel_word_count(spec, radius))


class _FingerprintIndex:
    """Sorted index of matrices for near-duplicate detection.

    Matrices are sorted by a fixed linear functional of their entries; a
    candidate pair must agree entrywise within ``FINGERPRINT_GRID`` and is
    merged only if it also agrees within ``MERGE_RECHECK`` relative to the
    entry size.
    """

    def __init__(self):
        self.keys = np.empty(0)
        self.mats = np.empty((0, 4))
        self.near_misses = 0

    def __len__(self):
        return len(self.keys)

    def _same(self, m1, m2):
        diff = np.abs(m1 - m2)
        close = np.all(diff <= FINGERPRINT_GRID, axis=1)
        scale = np.maximum(1.0, np.maximum(np.abs(m1).max(axis=1), np.abs(m2).max(axis=1)))
        exact = np.all(diff <= MERGE_RECHECK * scale[:, None], axis=1)
        self.near_misses += int(np.count_nonzero(close & ~exact))
        return close & exact

    def known(self, mats: np.ndarray) -> np.ndarray:
        """Mask of rows already present in the index."""
        keys = mats @ _KEY_WEIGHTS
        lo = np.searchsorted(self.keys, keys - _KEY_WINDOW, side="left")
        hi = np.searchsorted(self.keys, keys + _KEY_WINDOW, side="right")
        counts = hi - lo
        found = np.zeros(len(mats), dtype=bool)
        if counts.sum() == 0:
            return found
        rows = np.repeat(np.arange(len(mats)), counts)
        starts = np.repeat(lo - np.cumsum(counts) + counts, counts)
        cand = np.arange(len(rows)) + starts
        hit = self._same(mats[rows], self.mats[cand])
        found[rows[hit]] = True
        return found

    def first_occurrences(self, mats: np.ndarray) -> np.ndarray:
        """Mask keeping the first of each group of mutual duplicates within ``mats``."""
        keys = mats @ _KEY_WEIGHTS
        order = np.argsort(keys, kind="stable")
        sk = keys[order]
        keep = np.ones(len(mats), dtype=bool)
        k = 1
        while k < len(sk):
            near = np.nonzero(sk[k:] - sk[:-k] <= _KEY_WINDOW)[0]
            if len(near) == 0:
                break
            i, j = order[near], order[near + k]
            hit = self._same(mats[i], mats[j])
            keep[np.maximum(i, j)[hit]] = False
            k += 1
        return keep

    def add(self, mats: np.ndarray) -> None:
        keys = mats @ _KEY_WEIGHTS
        order = np.argsort(keys, kind="stable")
        keys, mats = keys[order], mats[order]
        pos = np.searchsorted(self.keys, keys)
        self.keys = np.insert(self.keys, pos, keys)
        self.mats = np.insert(self.mats, pos, mats, axis=0)


@dataclass
class GroupBall:
    """Deduplicated word ball, one row per distinct element.

    ``words`` is an ``(N, radius)`` int8 array of letter codes padded with -1.
    For kernel-only balls (``kernel_only=True``) only weight-0 elements were
    stored.
    """

    spec: GroupSpec
    radius: int
    matrices: np.ndarray
    words: np.ndarray
    weights: np.ndarray
    kernel_only: bool = False
    merges: int = 0
    near_misses: int = 0
    _index: _FingerprintIndex | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def label(self) -> str:
        return self.spec.label + (":kernel-only" if self.kernel_only else "")

    @property
    def lengths(self) -> np.ndarray:
        return np.count_nonzero(self.words >= 0, axis=1)

    def word(self, i: int) -> Word:
        return Word.from_codes(self.words[i])

    def matrix(self, i: int) -> MoebiusTransform:
        return MoebiusTransform.from_array(self.matrices[i])

    def entries(self) -> Iterator[tuple[Word, MoebiusTransform, int]]:
        for i in range(len(self)):
            yield self.word(i), self.matrix(i), int(self.weights[i])

    @property
    def in_kernel(self) -> np.ndarray:
        return self.weights == 0

    def active(self) -> np.ndarray:
        """Indices of the entries standing for the group itself (kernel slice for tight specs)."""
        if self.spec.is_kernel:
            return np.nonzero(self.in_kernel)[0]
        return np.arange(len(self))

    def index(self) -> _FingerprintIndex:
        if self._index is None:
            idx = _FingerprintIndex()
            idx.add(self.matrices)
            self._index = idx
        return self._index

    def contains(self, mats: np.ndarray) -> np.ndarray:
        mats = normalize_rows(np.atleast_2d(np.asarray(mats, dtype=float)))
        return self.index().known(mats)

    def find(self, word: Word) -> int | None:
        codes = word.codes()
        if len(codes) > self.radius:
            return None
        row = np.full(self.radius, -1, dtype=np.int8)
        row[: len(codes)] = codes
        hits = np.nonzero(np.all(self.words == row, axis=1))[0]
        return int(hits[0]) if len(hits) else None


def enumerate_ball(
    spec: GroupSpec,
    radius: int,
    kernel_only: bool = False,
    max_entries: int = MAX_BALL_ENTRIES,
    chunk: int = 1 << 21,
) -> GroupBall:
    """All elements of word length <= ``radius``, deduplicated.

    With ``kernel_only`` (kernel specs only) every layer is still enumerated
    in full, but only weight-0 elements are kept, and the last layer is
    streamed so the non-kernel part of it is never materialized.
    """
    if not 0 <= radius <= MAX_RADIUS:
        raise PreconditionError(f"radius must be in [0, {MAX_RADIUS}], got {radius}")
    if kernel_only and not spec.is_kernel:
        raise WrongSpecKind("kernel_only enumeration needs a kernel spec")
    projected = projected_entry_count(spec, radius, kernel_only)
    if projected > max_entries:
        raise BallTooLarge(f"radius {radius} projects {projected} entries (> {max_entries})")

    gens = spec.letter_matrices()
    lw = spec.letter_weights()
    k = len(gens)
    index = _FingerprintIndex()
    identity = np.array([[1.0, 0.0, 0.0, 1.0]])
    index.add(identity)

    kept_mats = [identity]
    kept_words = [np.full((1, radius), -1, dtype=np.int8)]
    kept_weights = [np.zeros(1, dtype=np.int16)]
    merges = 0

    f_mats, f_words, f_weights = identity, np.zeros((1, 0), dtype=np.int8), np.zeros(1, dtype=np.int16)
    for level in range(1, radius + 1):
        last_layer = level == radius
        if kernel_only and last_layer:
            # the weight is a homomorphism, so kernel elements can only collide with kernel elements
            index = _FingerprintIndex()
            index.add(np.concatenate(kept_mats))
        n_mats, n_words, n_weights = [], [], []
        step = max(1, chunk // k)
        for s in range(0, len(f_mats), step):
            pm, pw, pwt = f_mats[s:s + step], f_words[s:s + step], f_weights[s:s + step]
            last = pw[:, -1].astype(np.int64) if level > 1 else np.full(len(pm), -1)
            parent = np.repeat(np.arange(len(pm)), k)
            letter = np.tile(np.arange(k), len(pm))
            ok = letter != (last[parent] ^ 1)
            weight = pwt[parent] + lw[letter]
            if kernel_only and last_layer:
                ok &= weight == 0
            parent, letter, weight = parent[ok], letter[ok], weight[ok]
            mats = normalize_rows(compose_rows(pm[parent], gens[letter]), PRODUCT_DET_RTOL)
            keep = ~index.known(mats)
            keep[keep] = index.first_occurrences(mats[keep])
            merges += int(len(mats) - keep.sum())
            mats, parent, letter, weight = mats[keep], parent[keep], letter[keep], weight[keep]
            words = np.concatenate([pw[parent], letter[:, None].astype(np.int8)], axis=1)
            index.add(mats)
            n_mats.append(mats)
            n_words.append(words)
            n_weights.append(weight.astype(np.int16))
        f_mats = np.concatenate(n_mats) if n_mats else np.empty((0, 4))
        f_words = np.concatenate(n_words) if n_words else np.empty((0, level), dtype=np.int8)
        f_weights = np.concatenate(n_weights) if n_weights else np.empty(0, dtype=np.int16)
        store = f_weights == 0 if kernel_only else slice(None)
        padded = np.full((len(f_words), radius), -1, dtype=np.int8)
        padded[:, :level] = f_words
        kept_mats.append(f_mats[store])
        kept_words.append(padded[store])
        kept_weights.append(f_weights[store])

    return GroupBall(
        spec=spec,
        radius=radius,
        matrices=np.concatenate(kept_mats),
        words=np.concatenate(kept_words),
        weights=np.concatenate(kept_weights),
        kernel_only=kernel_only,
        merges=merges,
        near_misses=index.near_misses,
    )


def kernel_entries(ball: GroupBall) -> list[tuple[Word, MoebiusTransform, int]]:
    if not ball.spec.is_kernel:
        raise WrongSpecKind("kernel_entries needs a kernel-of-weight spec")
    return [(ball.word(i), ball.matrix(i), 0) for i in np.nonzero(ball.in_kernel)[0]]


def translation_lengths(mats: np.ndarray) -> np.ndarray:
    tr = np.abs(mats[:, 0] + mats[:, 3])
    return 2.0 * np.arccosh(np.maximum(tr / 2.0, 1.0))


def limit_set_sample(ball: GroupBall, n: int) -> list[float]:
    """Attracting fixed points of the ``n`` active entries with the longest translation.

    Ties are broken by enumeration order, and the points are returned in
    enumeration order of their elements.
    """
    if len(ball) == 0:
        raise EmptyBall("ball has no entries")
    rows = ball.active()
    mats = ball.matrices[rows]
    tr = np.abs(mats[:, 0] + mats[:, 3])
    hyp = tr > 2.0 + 1e-9
    rows, mats = rows[hyp], mats[hyp]
    order = np.argsort(-translation_lengths(mats), kind="stable")[:n]
    chosen = np.sort(rows[order])
    return [fixed_points(ball.matrix(i))[0] for i in chosen]


def apply_rows_to_point(mats: np.ndarray, w: complex) -> tuple[np.ndarray, np.ndarray]:
    a, b, c, d = mats[:, 0], mats[:, 1], mats[:, 2], mats[:, 3]
    den = c * w + d
    den2 = den.real ** 2 + den.imag ** 2
    num = (a * w + b) * np.conj(den)
    return num.real / den2, w.imag / den2


def quotient_distance(z: complex, w: complex, ball: GroupBall) -> float:
    """Upper bound for the distance between the projections of z and w."""
    if len(ball) == 0:
        raise EmptyBall("ball has no entries")
    mats = ball.matrices[ball.active()]
    x, y = apply_rows_to_point(mats, w)
    return float(np.min(uhp_distance_arrays(z.real, z.imag, x, y)))


# --- cache files -----------------------------------------------------------

MAGIC = "HOROLAB-BALL 1"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def ball_save(ball: GroupBall, path) -> None:
    path = Path(path)
    lines = [MAGIC, f"{ball.label} {ball.radius} {len(ball)} {ball.spec.content_hash():016x}"]
    for i in range(len(ball)):
        word = ",".join(str(s) for s in ball.word(i).signed())
        a, b, c, d = ball.matrices[i]
        lines.append(f"{word} {int(ball.weights[i])} {_fmt(a)} {_fmt(b)} {_fmt(c)} {_fmt(d)}")
    path.write_text("\n".join(lines) + "\n")


def ball_load(path, spec: GroupSpec | None = None) -> GroupBall:
    path = Path(path)
    text = path.read_text()
    lines = text.split("\n")
    if not text.endswith("\n") or len(lines) < 3 or lines[0] != MAGIC:
        raise FormatError(f"{path}: missing or bad header")
    lines.pop()
    head = lines[1].split(" ")
    if len(head) != 4:
        raise FormatError(f"{path}: bad second line")
    label, radius_s, count_s, hash_s = head
    try:
        radius, count, digest = int(radius_s), int(count_s), int(hash_s, 16)
    except ValueError as exc:
        raise FormatError(f"{path}: bad second line") from exc
    kernel_only = label.endswith(":kernel-only")
    base_label = label.removesuffix(":kernel-only")
    if spec is None:
        spec = spec_from_label(base_label)
    elif spec.label != base_label:
        raise SpecMismatch(f"{path}: file is for {base_label!r}, expected {spec.label!r}")
    if spec.content_hash() != digest:
        raise SpecMismatch(f"{path}: generator hash differs from spec {spec.label!r}")
    if len(lines) - 2 != count:
        raise FormatError(f"{path}: expected {count} entries, found {len(lines) - 2}")

    mats = np.empty((count, 4))
    words = np.full((count, radius), -1, dtype=np.int8)
    weights = np.empty(count, dtype=np.int16)
    try:
        for i, line in enumerate(lines[2:]):
            fields = line.split(" ")
            if len(fields) != 6:
                raise FormatError(f"{path}: entry {i} has {len(fields)} fields")
            if fields[0]:
                codes = Word.from_signed([int(s) for s in fields[0].split(",")]).codes()
                words[i, : len(codes)] = codes
            weights[i] = int(fields[1])
            mats[i] = [float(v) for v in fields[2:]]
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed entry") from exc
    return GroupBall(spec, radius, mats, words, weights, kernel_only=kernel_only)


def inverse_closed(ball: GroupBall) -> bool:
    return bool(np.all(ball.contains(inverse_rows(ball.matrices))))

"""The Kahn domain of finite and infinite strings with ``p(x, y) = 2**-lcp(x, y)``.

Finite words are plain strings.  Streams are prefix oracles that are never
materialized; whenever a distance cannot be decided from the symbols read,
a certified interval is returned instead of a rounded number.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Union

import numpy as np

from .errors import (
    BudgetExceededError,
    InvalidRadiusError,
    LimitNotComputableError,
    MalformedInputError,
    OracleViolationError,
)
from .space import PMetricSpace, as_rational

EMPTY_LABEL = "ε"
DEFAULT_TRUNCATION_BUDGET = 4096
DEFAULT_SCAN_LIMIT = 1 << 14

ALL_WORDS = "allWords"
WORDS_MINUS_EMPTY = "wordsMinusEmpty"
SUBSETS = (ALL_WORDS, WORDS_MINUS_EMPTY)


def power_of_half(k: int) -> Fraction:
    return Fraction(1, 1 << k)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise MalformedInputError("alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            raise MalformedInputError("alphabet symbols must be distinct")
        for s in symbols:
            if len(s) != 1 or s.isspace() or s == EMPTY_LABEL:
                raise MalformedInputError(f"bad alphabet symbol {s!r}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def of(cls, text: str) -> Alphabet:
        return cls(tuple(text.replace(",", "")))

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.symbols

    def words(self, max_length: int, min_length: int = 0) -> Iterator[str]:
        """All words with length in ``[min_length, max_length]``, shortlex order."""
        for length in range(min_length, max_length + 1):
            for letters in itertools.product(self.symbols, repeat=length):
                yield "".join(letters)

    def count_words(self, max_length: int, min_length: int = 0) -> int:
        k = len(self.symbols)
        return sum(k**i for i in range(min_length, max_length + 1))


@dataclass(frozen=True)
class Word:
    text: str

    @property
    def length(self) -> int:
        return len(self.text)

    @property
    def label(self) -> str:
        return self.text or EMPTY_LABEL

    def prefix(self, k: int) -> str:
        return self.text[:k]

    def __str__(self) -> str:
        return self.label


class Stream:
    """An infinite string given by a prefix oracle.

    Subclasses implement ``_compute(k)`` returning the length-``k`` prefix.
    Answers are checked for length and for agreement with the longest prefix
    seen so far, so an incoherent oracle raises :class:`OracleViolationError`.
    """

    def __init__(self):
        self._known = ""
        self._lock = threading.Lock()

    def _compute(self, k: int) -> str:
        raise NotImplementedError

    def prefix(self, k: int) -> str:
        if k < 0:
            raise MalformedInputError("prefix length must be nonnegative")
        with self._lock:
            if k <= len(self._known):
                return self._known[:k]
        got = self._compute(k)
        if not isinstance(got, str) or len(got) != k:
            raise OracleViolationError(f"{self}: prefix({k}) has wrong length")
        with self._lock:
            m = min(k, len(self._known))
            if got[:m] != self._known[:m]:
                raise OracleViolationError(f"{self}: prefix({k}) disagrees with an earlier answer")
            if k > len(self._known):
                self._known = got
        return got

    def periodic_form(self) -> tuple[str, str] | None:
        """``(lead, cycle)`` in canonical form when the stream is eventually periodic."""
        return None

    def identity(self):
        """A key such that equal keys imply equal streams; None if unknown."""
        form = self.periodic_form()
        return ("periodic",) + form if form is not None else None

    @property
    def label(self) -> str:
        return str(self)


def _primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


class PeriodicStream(Stream):
    """``lead`` followed by ``cycle`` repeated forever, kept in canonical form."""

    def __init__(self, cycle: str, lead: str = ""):
        super().__init__()
        if not cycle:
            raise MalformedInputError("cycle must be nonempty")
        cycle = _primitive_root(cycle)
        while lead and lead[-1] == cycle[-1]:
            lead = lead[:-1]
            cycle = cycle[-1] + cycle[:-1]
        self.lead = lead
        self.cycle = cycle

    def _compute(self, k: int) -> str:
        if k <= len(self.lead):
            return self.lead[:k]
        rest = k - len(self.lead)
        reps = -(-rest // len(self.cycle))
        return self.lead + (self.cycle * reps)[:rest]

    def periodic_form(self) -> tuple[str, str]:
        return self.lead, self.cycle

    def __eq__(self, other):
        return isinstance(other, PeriodicStream) and self.periodic_form() == other.periodic_form()

    def __hash__(self):
        return hash(self.periodic_form())

    def __str__(self) -> str:
        if self.lead:
            return f"{self.lead}+repeat:{self.cycle}"
        return f"repeat:{self.cycle}"


def _thue_morse(i: int) -> str:
    return "01"[bin(i).count("1") % 2]


def _fibonacci_word(k: int) -> str:
    a, b = "0", "01"
    while len(b) < k:
        a, b = b, b + a
    return b[:k]


def _champernowne(k: int) -> str:
    out = []
    total = 0
    i = 1
    while total < k:
        bits = bin(i)[2:]
        out.append(bits)
        total += len(bits)
        i += 1
    return "".join(out)[:k]


BUILTIN_PROGRAMS: dict[str, Callable[[int], str]] = {
    "thue-morse": lambda k: "".join(_thue_morse(i) for i in range(k)),
    "fibonacci": _fibonacci_word,
    "champernowne": _champernowne,
    "alternate-blocks": lambda k: "".join("01"[int(math.isqrt(i)) % 2] for i in range(k)),
}


class ProgramStream(Stream):
    """One of the named built-in (not eventually periodic) binary streams."""

    def __init__(self, name: str):
        super().__init__()
        if name not in BUILTIN_PROGRAMS:
            raise MalformedInputError(f"unknown stream program {name!r}; known: {sorted(BUILTIN_PROGRAMS)}")
        self.name = name

    def _compute(self, k: int) -> str:
        return BUILTIN_PROGRAMS[self.name](k)

    def identity(self):
        return ("program", self.name)

    def __eq__(self, other):
        return isinstance(other, ProgramStream) and other.name == self.name

    def __hash__(self):
        return hash(("program", self.name))

    def __str__(self) -> str:
        return f"program:{self.name}"


class OracleStream(Stream):
    """A stream backed by an arbitrary ``k -> prefix`` callable."""

    def __init__(self, oracle: Callable[[int], str], name: str = "oracle"):
        super().__init__()
        self._oracle = oracle
        self.name = name

    def _compute(self, k: int) -> str:
        return self._oracle(k)

    def __str__(self) -> str:
        return f"oracle:{self.name}"


KahnPoint = Union[Word, Stream]


def parse_point(text: str) -> KahnPoint:
    """``repeat:<word>``, ``<lead>+repeat:<word>``, ``program:<id>``, or a literal word.

    The empty word is written ``ε`` (or as the empty string).
    """
    text = text.strip()
    if text.startswith("program:"):
        return ProgramStream(text[len("program:"):])
    lead, sep, rest = text.partition("+repeat:")
    if sep:
        return PeriodicStream(rest, lead)
    if text.startswith("repeat:"):
        return PeriodicStream(text[len("repeat:"):])
    if text == EMPTY_LABEL:
        return Word("")
    return Word(text)


def self_distance(x: KahnPoint) -> Fraction:
    if isinstance(x, Word):
        return power_of_half(x.length)
    return Fraction(0)


def _common(a: str, b: str) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def lcp(x: KahnPoint, y: KahnPoint, scan_limit: int = DEFAULT_SCAN_LIMIT) -> int | None:
    """Longest common prefix length; None means the points are the same stream.

    Two different streams are scanned until they disagree.  Eventually
    periodic streams have an explicit bound on where they must disagree;
    other pairs give up after ``scan_limit`` symbols.
    """
    if isinstance(x, Word) and isinstance(y, Word):
        return _common(x.text, y.text)
    if isinstance(x, Word) or isinstance(y, Word):
        w, s = (x, y) if isinstance(x, Word) else (y, x)
        return _common(w.text, s.prefix(w.length))
    if x is y:
        return None
    ix, iy = x.identity(), y.identity()
    if ix is not None and ix == iy:
        return None
    fx, fy = x.periodic_form(), y.periodic_form()
    if fx is not None and fy is not None:
        bound = max(len(fx[0]), len(fy[0])) + math.lcm(len(fx[1]), len(fy[1]))
        k = _common(x.prefix(bound), y.prefix(bound))
        return None if k == bound else k
    k = 64
    while True:
        k = min(k, scan_limit)
        common = _common(x.prefix(k), y.prefix(k))
        if common < k:
            return common
        if k == scan_limit:
            raise LimitNotComputableError(f"{x} and {y} agree on the first {k} symbols")
        k *= 2


def kahn_distance(x: KahnPoint, y: KahnPoint, scan_limit: int = DEFAULT_SCAN_LIMIT) -> Fraction:
    """Exact ``2**-lcp(x, y)``, zero for a stream against itself."""
    k = lcp(x, y, scan_limit)
    return Fraction(0) if k is None else power_of_half(k)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` certified to contain a distance."""

    lo: Fraction
    hi: Fraction

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def within(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi


def kahn_pmetric(x: KahnPoint, y: KahnPoint, precision: int) -> Fraction | Interval:
    """Distance from at most ``precision`` symbols of each stream.

    Exact when a mismatch or the end of a word occurs within the first
    ``precision`` symbols (always, for two words); otherwise the interval
    ``[0, 2**-precision]``.
    """
    if precision < 0:
        raise MalformedInputError("precision must be nonnegative")
    if isinstance(x, Word) and isinstance(y, Word):
        return power_of_half(_common(x.text, y.text))
    if isinstance(x, Word) or isinstance(y, Word):
        w, s = (x, y) if isinstance(x, Word) else (y, x)
        if w.length <= precision:
            return power_of_half(_common(w.text, s.prefix(w.length)))
        k = _common(w.text[:precision], s.prefix(precision))
        if k < precision:
            return power_of_half(k)
        return Interval(Fraction(0), power_of_half(precision))
    k = _common(x.prefix(precision), y.prefix(precision))
    if k < precision:
        return power_of_half(k)
    return Interval(Fraction(0), power_of_half(precision))


def truncate(alphabet: Alphabet, depth: int, budget: int = DEFAULT_TRUNCATION_BUDGET) -> PMetricSpace:
    """The finite fragment of all words of length at most ``depth``."""
    if depth < 0:
        raise MalformedInputError("depth must be nonnegative")
    count = alphabet.count_words(depth)
    if count > budget:
        raise BudgetExceededError(count, budget)
    words = list(alphabet.words(depth))
    codes = {s: i for i, s in enumerate(alphabet.symbols)}
    padded = np.full((count, max(depth, 1)), -1, dtype=np.int64)
    for r, w in enumerate(words):
        padded[r, : len(w)] = [codes[c] for c in w]
    same = (padded[:, None, :] == padded[None, :, :]) & (padded[:, None, :] >= 0)
    common = np.cumprod(same, axis=2).sum(axis=2)
    table = [power_of_half(k) for k in range(depth + 1)]
    matrix = tuple(tuple(table[k] for k in row) for row in common.tolist())
    labels = tuple(w or EMPTY_LABEL for w in words)
    return PMetricSpace(labels, matrix)


def word_from_label(label: str) -> Word:
    return Word("" if label == EMPTY_LABEL else label)


@dataclass(frozen=True)
class AsymmetryCertificate:
    """Exact check that the empty word escapes every small ball around nonempty words.

    For every nonempty ``y`` up to ``max_length``: ``p(y, ε) = 1`` and
    ``1 >= p(y, y) + radius``.  For ``radius <= 1/2`` this holds at every
    length because ``p(y, y) <= 1/2``; ``global_bound`` records that.
    """

    radius: Fraction
    max_length: int
    words_checked: int
    failures: tuple[str, ...]
    global_bound: bool

    @property
    def holds(self) -> bool:
        return not self.failures


def asymmetry_certificate(alphabet: Alphabet, radius=Fraction(1, 2), max_length: int = 10) -> AsymmetryCertificate:
    r = as_rational(radius)
    if r <= 0:
        raise InvalidRadiusError("radius must be positive")
    empty = Word("")
    checked = 0
    failures = []
    for text in alphabet.words(max_length, min_length=1):
        y = Word(text)
        checked += 1
        d = kahn_distance(y, empty)
        if d != 1 or d < self_distance(y) + r:
            failures.append(text)
    return AsymmetryCertificate(r, max_length, checked, tuple(failures), r <= Fraction(1, 2))


@dataclass(frozen=True)
class DensityWitness:
    """Approximating words for ``point`` at radius ``epsilon``.

    ``dense_witness`` ``w`` satisfies ``p(x, w) < p(x, x) + eps``;
    ``symmetric_witness`` additionally satisfies ``p(w, x) < p(w, w) + eps``.
    When the symmetric side is impossible, ``asymmetry`` certifies it.
    """

    point: KahnPoint
    epsilon: Fraction
    dense_witness: Word | None
    symmetric_witness: Word | None
    asymmetry: AsymmetryCertificate | None = None


def _in_subset(word: Word, subset: str) -> bool:
    return subset == ALL_WORDS or word.length > 0


def density_witness(
    alphabet: Alphabet,
    subset: str,
    x: KahnPoint,
    epsilon,
    max_length: int = 10,
) -> DensityWitness:
    if subset not in SUBSETS:
        raise MalformedInputError(f"unknown subset {subset!r}")
    eps = as_rational(epsilon)
    if eps <= 0:
        raise InvalidRadiusError("radius must be positive")

    if isinstance(x, Word) and _in_subset(x, subset):
        return DensityWitness(x, eps, x, x)

    if isinstance(x, Word):
        # x is the empty word and the subset excludes it
        y = Word(alphabet.symbols[0])
        dense = y if kahn_distance(x, y) < self_distance(x) + eps else None
        if kahn_distance(y, x) < self_distance(y) + eps:
            return DensityWitness(x, eps, dense, y)
        return DensityWitness(x, eps, dense, None, asymmetry_certificate(alphabet, eps, max_length))

    length = 1 if subset == WORDS_MINUS_EMPTY else 0
    while power_of_half(length) >= eps:
        length += 1
    w = Word(x.prefix(length))
    forward = kahn_pmetric(x, w, length)
    backward = kahn_pmetric(w, x, length)
    ok_forward = forward < self_distance(x) + eps
    ok_backward = backward < self_distance(w) + eps
    return DensityWitness(x, eps, w if ok_forward else None, w if ok_forward and ok_backward else None)


@dataclass(frozen=True)
class PrefixSequence:
    """Words ``x_n = target[:scale*n + offset]`` (eventually constant for word targets)."""

    target: KahnPoint
    scale: int = 1
    offset: int = 1

    def __post_init__(self):
        if self.scale < 1 or self.offset < 0:
            raise MalformedInputError("prefix schedule must be strictly increasing and nonnegative")

    def length(self, n: int) -> int:
        k = self.scale * n + self.offset
        if isinstance(self.target, Word):
            return min(k, self.target.length)
        return k

    def term(self, n: int) -> Word:
        return Word(self.target.prefix(self.length(n)))

    def terms(self, count: int) -> list[Word]:
        return [self.term(n) for n in range(count)]

    def self_limit(self) -> Fraction:
        """``lim p(x_n, x_n)``; also the double limit, since the terms form a chain."""
        return self_distance(self.target)

    def cross_limit(self, other: PrefixSequence) -> Fraction:
        """``lim p(x_n, y_n)``: ``lcp(x_n, y_n) = min(len_n, len'_n, lcp(targets))``."""
        return kahn_distance(self.target, other.target)

    def __str__(self) -> str:
        return f"{self.target.label}@{self.scale}n+{self.offset}"


@dataclass(frozen=True)
class WordLimitCheck:
    word: str
    limit_to_word: Fraction
    word_self_distance: Fraction


@dataclass(frozen=True)
class IncompletenessWitness:
    """A 0-Cauchy sequence of words with no word as p-limit."""

    sequence: PrefixSequence
    self_distance_limit: Fraction
    checks: tuple[WordLimitCheck, ...]

    @property
    def no_word_limit(self) -> bool:
        # a word limit w needs p(w, w) = lim p(w, x_n) = lim p(x_n, x_n)
        return all(
            not (c.word_self_distance == c.limit_to_word == self.self_distance_limit)
            for c in self.checks
        ) and self.self_distance_limit == 0


def kahn_incompleteness_witness(alphabet: Alphabet, max_length: int = 6) -> IncompletenessWitness:
    """Prefixes of the constant stream on the first symbol, checked against every short word.

    Words longer than ``max_length`` are excluded by the global bound
    ``p(w, w) = 2**-|w| > 0``, which the limit would have to equal.
    """
    stream = PeriodicStream(alphabet.symbols[0])
    seq = PrefixSequence(stream)
    checks = tuple(
        WordLimitCheck(text, kahn_distance(Word(text), stream), self_distance(Word(text)))
        for text in alphabet.words(max_length)
    )
    return IncompletenessWitness(seq, seq.self_limit(), checks)

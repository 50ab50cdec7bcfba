"""Limits and convergence of eventually periodic sequences in finite spaces.

Every tail of an eventually periodic sequence visits each ordered pair of
its cycle's support set infinitely often, so each limit below exists exactly
when the relevant distance is constant over the support.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import MalformedInputError
from .space import PMetricSpace, PointSet


@dataclass(frozen=True)
class EventuallyPeriodicSeq:
    """``x_n = prefix[n]`` for ``n < len(prefix)``, then ``cycle`` repeated forever."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise MalformedInputError("cycle must be nonempty")

    @classmethod
    def constant(cls, point: int) -> EventuallyPeriodicSeq:
        return cls((), (point,))

    @classmethod
    def parse(cls, text: str, space: PMetricSpace) -> EventuallyPeriodicSeq:
        """Parse ``prefix;cycle`` with comma-separated labels, e.g. ``b;a``.

        A literal without ``;`` is read as a cycle with empty prefix.
        """
        head, sep, tail = text.partition(";")
        if not sep:
            head, tail = "", head

        def labels(part: str) -> tuple[int, ...]:
            return tuple(space.index(tok.strip()) for tok in part.split(",") if tok.strip())

        return cls(labels(head), labels(tail))

    def __getitem__(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def terms(self, count: int) -> list[int]:
        return [self[n] for n in range(count)]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.cycle)

    def check_in(self, space: PMetricSpace) -> None:
        for point in self.prefix + self.cycle:
            space.index(point)

    def format(self, space: PMetricSpace) -> str:
        return ",".join(space.labels[i] for i in self.prefix) + ";" + ",".join(space.labels[i] for i in self.cycle)


def _constant(values) -> Fraction | None:
    values = set(values)
    return values.pop() if len(values) == 1 else None


def double_limit(space: PMetricSpace, seq: EventuallyPeriodicSeq) -> Fraction | None:
    """``lim_{n,m} p(x_n, x_m)`` or None when it does not exist."""
    space.require_valid()
    seq.check_in(space)
    s = sorted(seq.support)
    return _constant(space.matrix[a][b] for a in s for b in s)


def point_limit(space: PMetricSpace, seq: EventuallyPeriodicSeq, x: int) -> Fraction | None:
    """``lim_n p(x, x_n)``."""
    return _constant(space.matrix[x][s] for s in seq.support)


def diagonal_limit(space: PMetricSpace, seq: EventuallyPeriodicSeq) -> Fraction | None:
    """``lim_n p(x_n, x_n)``."""
    return _constant(space.matrix[s][s] for s in seq.support)


@dataclass(frozen=True)
class SeqClassification:
    p_cauchy: bool
    p_cauchy_limit: Fraction | None
    zero_cauchy: bool
    p_limits: PointSet
    zero_limits: PointSet
    top_limits: PointSet

    @property
    def p_converges(self) -> bool:
        return bool(self.p_limits)

    @property
    def zero_converges(self) -> bool:
        return bool(self.zero_limits)

    @property
    def top_converges(self) -> bool:
        return bool(self.top_limits)


def classify(space: PMetricSpace, seq: EventuallyPeriodicSeq) -> SeqClassification:
    limit = double_limit(space, seq)
    p = space.matrix
    diag = diagonal_limit(space, seq)
    p_limits = []
    top_limits = []
    for x in range(space.n):
        if all(p[x][s] == p[x][x] for s in seq.support):
            top_limits.append(x)
            if diag is not None and diag == p[x][x]:
                p_limits.append(x)
    zero_limits = tuple(x for x in p_limits if p[x][x] == 0)
    return SeqClassification(
        p_cauchy=limit is not None,
        p_cauchy_limit=limit,
        zero_cauchy=limit == 0,
        p_limits=tuple(p_limits),
        zero_limits=zero_limits,
        top_limits=tuple(top_limits),
    )


def sample_double_limit(space: PMetricSpace, seq: EventuallyPeriodicSeq, start: int, stop: int) -> set[Fraction]:
    """Values of ``p(x_n, x_m)`` over ``start <= n, m < stop`` (brute-force oracle)."""
    p = space.matrix
    terms = seq.terms(stop)
    return {p[terms[n]][terms[m]] for n in range(start, stop) for m in range(start, stop)}


@dataclass(frozen=True)
class CompletenessCertificate:
    complete: bool
    counterexamples: tuple[EventuallyPeriodicSeq, ...]
    sequences_checked: int
    literal: bool
    note: str = ""

    def __bool__(self) -> bool:
        return self.complete


def _words(alphabet: Sequence[int], max_len: int, min_len: int = 0) -> Iterator[tuple[int, ...]]:
    for length in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def enumerate_sequences(n: int, max_prefix: int, max_cycle: int) -> Iterator[EventuallyPeriodicSeq]:
    points = range(n)
    for cycle in _words(points, max_cycle, min_len=1):
        for prefix in _words(points, max_prefix):
            yield EventuallyPeriodicSeq(prefix, cycle)


def is_p_cauchy_complete_finite(
    space: PMetricSpace,
    *,
    literal: bool = False,
    max_prefix: int | None = None,
    max_cycle: int | None = None,
) -> CompletenessCertificate:
    """Check that every p-Cauchy eventually periodic sequence p-converges.

    With ``literal=True`` every ``(prefix, cycle)`` pair within the bounds
    (default ``n`` each) is classified.  Otherwise one sequence per nonempty
    support set is classified; :func:`classify` reads the sequence only
    through its support, so the verdicts coincide.

    A ``False`` verdict on a valid space contradicts the P1 collapse (a
    p-Cauchy support set is a singleton) and is flagged as a bug in ``note``.
    """
    space.require_valid()
    n = space.n
    if literal:
        seqs: Iterator[EventuallyPeriodicSeq] = enumerate_sequences(
            n, n if max_prefix is None else max_prefix, n if max_cycle is None else max_cycle
        )
    else:
        seqs = (
            EventuallyPeriodicSeq((), subset)
            for size in range(1, n + 1)
            for subset in itertools.combinations(range(n), size)
        )
    counterexamples = []
    checked = 0
    cache: dict[frozenset[int], bool] = {}
    for seq in seqs:
        checked += 1
        bad = cache.get(seq.support)
        if bad is None:
            c = classify(space, seq)
            bad = c.p_cauchy and not c.p_converges
            cache[seq.support] = bad
        if bad:
            counterexamples.append(seq)
    note = ""
    if counterexamples:
        note = "implementation bug: finite valid spaces are always p-Cauchy complete"
    return CompletenessCertificate(not counterexamples, tuple(counterexamples), checked, literal, note)


@dataclass(frozen=True)
class Implication:
    name: str
    antecedent: bool
    consequent: bool

    @property
    def holds(self) -> bool:
        return not self.antecedent or self.consequent

    @property
    def vacuous(self) -> bool:
        return not self.antecedent


@dataclass(frozen=True)
class ImplicationReport:
    classification: SeqClassification
    implications: tuple[Implication, ...]

    @property
    def holds(self) -> bool:
        return all(i.holds for i in self.implications)


def check_implication_chain(space: PMetricSpace, seq: EventuallyPeriodicSeq) -> ImplicationReport:
    """Evaluate the convergence/Cauchy implication chain for one sequence.

    Pointwise forms are used (0-converging *to x* implies p-converging *to
    x*, ...), which imply the existential ones.
    """
    c = classify(space, seq)
    zero, plim, top = set(c.zero_limits), set(c.p_limits), set(c.top_limits)
    implications = (
        Implication("0-converge => p-converge", bool(zero), zero <= plim and bool(plim)),
        Implication("p-converge => topologically converge", bool(plim), plim <= top and bool(top)),
        Implication("0-Cauchy => p-Cauchy", c.zero_cauchy, c.p_cauchy),
        Implication(
            "0-Cauchy and p-converge => 0-converge",
            c.zero_cauchy and bool(plim),
            bool(plim) and plim == zero,
        ),
    )
    return ImplicationReport(c, implications)

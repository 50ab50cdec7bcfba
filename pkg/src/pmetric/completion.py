"""Completions as quotients of Cauchy sequence models.

A class of the completion is a p-Cauchy model up to the relation

    a ~ b  iff  lim p(a_n, a_n) = lim p(a_n, b_n) = lim p(b_n, b_n)

and the distance between classes is the limit of the cross distance.  Only
model families whose limits are exactly computable are admitted:
eventually periodic sequences in a finite space, and prefix sequences of a
word or stream in the Kahn domain.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import MalformedInputError, PreconditionError
from .kahn import (
    Alphabet,
    KahnPoint,
    PeriodicStream,
    PrefixSequence,
    Stream,
    Word,
    kahn_distance,
    power_of_half,
    self_distance as kahn_self_distance,
    truncate,
    word_from_label,
)
from .sequences import EventuallyPeriodicSeq, double_limit
from .space import IsometryWitness, PMetricSpace, as_rational, format_rational

FINITE = "finite"
KAHN_WORDS = "kahnFiniteWords"
KAHN_FULL = "kahnFull"
KINDS = (FINITE, KAHN_WORDS, KAHN_FULL)

CauchySeqModel = Union[EventuallyPeriodicSeq, PrefixSequence]

DEFAULT_EPSILONS = tuple(power_of_half(k) for k in range(11))


@dataclass(frozen=True)
class PresentedSpace:
    kind: str
    space: PMetricSpace | None = None
    alphabet: Alphabet | None = None
    exclude_empty: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedInputError(f"unsupported presentation kind {self.kind!r}")
        if self.kind == FINITE:
            if self.space is None:
                raise MalformedInputError("finite presentation needs a space")
            self.space.require_valid()
        elif self.alphabet is None:
            raise MalformedInputError("Kahn presentation needs an alphabet")

    @classmethod
    def finite(cls, space: PMetricSpace) -> PresentedSpace:
        return cls(FINITE, space=space)

    @classmethod
    def kahn_words(cls, alphabet: Alphabet, exclude_empty: bool = False) -> PresentedSpace:
        return cls(KAHN_WORDS, alphabet=alphabet, exclude_empty=exclude_empty)

    @classmethod
    def kahn_full(cls, alphabet: Alphabet, exclude_empty: bool = False) -> PresentedSpace:
        return cls(KAHN_FULL, alphabet=alphabet, exclude_empty=exclude_empty)

    @property
    def is_kahn(self) -> bool:
        return self.kind != FINITE

    def check_point(self, x) -> None:
        if self.kind == FINITE:
            self.space.index(x)
            return
        if isinstance(x, Word):
            if any(c not in self.alphabet for c in x.text):
                raise MalformedInputError(f"word {x.label!r} leaves the alphabet")
            if self.exclude_empty and x.length == 0:
                raise MalformedInputError("the empty word is excluded from this space")
        elif isinstance(x, Stream):
            if self.kind == KAHN_WORDS:
                raise MalformedInputError("streams are not points of the finite-word space")
            if any(c not in self.alphabet for c in x.prefix(16)):
                raise MalformedInputError(f"stream {x} leaves the alphabet")
        else:
            raise MalformedInputError(f"not a Kahn point: {x!r}")

    def distance(self, x, y) -> Fraction:
        if self.kind == FINITE:
            return self.space.matrix[self.space.index(x)][self.space.index(y)]
        return kahn_distance(x, y)


def check_model(presented: PresentedSpace, model: CauchySeqModel) -> CauchySeqModel:
    """Validate that ``model`` lives in ``presented`` and is p-Cauchy."""
    if presented.kind == FINITE:
        if not isinstance(model, EventuallyPeriodicSeq):
            raise MalformedInputError("finite spaces take eventually periodic models")
        if double_limit(presented.space, model) is None:
            raise MalformedInputError("model is not p-Cauchy")
        return model
    if not isinstance(model, PrefixSequence):
        raise MalformedInputError("Kahn spaces take prefix-sequence models")
    target = model.target
    if isinstance(target, Stream):
        if any(c not in presented.alphabet for c in target.prefix(16)):
            raise MalformedInputError(f"stream {target} leaves the alphabet")
    else:
        presented.check_point(target)
    if presented.exclude_empty and model.length(0) == 0:
        raise MalformedInputError("model visits the excluded empty word")
    return model


def self_limit(presented: PresentedSpace, model: CauchySeqModel) -> Fraction:
    if presented.kind == FINITE:
        p = presented.space.matrix
        values = {p[s][s] for s in model.support}
        if len(values) != 1:
            raise MalformedInputError("model has no self-distance limit")
        return values.pop()
    return model.self_limit()


def cross_limit(presented: PresentedSpace, a: CauchySeqModel, b: CauchySeqModel) -> Fraction | None:
    """``lim p(a_n, b_n)``, or None when it does not exist."""
    if presented.kind == FINITE:
        p = presented.space.matrix
        start = max(len(a.prefix), len(b.prefix))
        period = math.lcm(len(a.cycle), len(b.cycle))
        values = {p[a[n]][b[n]] for n in range(start, start + period)}
        return values.pop() if len(values) == 1 else None
    return a.cross_limit(b)


@dataclass(frozen=True)
class ModelComparison:
    self_a: Fraction
    cross: Fraction | None
    self_b: Fraction
    diagnostic: str = ""

    @property
    def equivalent(self) -> bool:
        return self.cross is not None and self.self_a == self.cross == self.self_b


def compare_models(presented: PresentedSpace, a: CauchySeqModel, b: CauchySeqModel) -> ModelComparison:
    check_model(presented, a)
    check_model(presented, b)
    sa, sb = self_limit(presented, a), self_limit(presented, b)
    cross = cross_limit(presented, a, b)
    diagnostic = "" if cross is not None else "cross distance has no limit"
    return ModelComparison(sa, cross, sb, diagnostic)


def seq_equivalent(presented: PresentedSpace, a: CauchySeqModel, b: CauchySeqModel) -> bool:
    return compare_models(presented, a, b).equivalent


@dataclass(frozen=True)
class CompletionClass:
    representative: CauchySeqModel
    self_distance: Fraction
    label: str


def _canonical(presented: PresentedSpace, model: CauchySeqModel) -> CauchySeqModel:
    if presented.kind == FINITE:
        if len(model.support) == 1:
            return EventuallyPeriodicSeq.constant(next(iter(model.support)))
        return model
    return PrefixSequence(model.target, 1, 1)


def _label(presented: PresentedSpace, model: CauchySeqModel) -> str:
    if presented.kind == FINITE:
        if len(model.support) == 1:
            return presented.space.labels[next(iter(model.support))]
        return "[" + model.format(presented.space) + "]"
    return model.target.label


def quotient_pmetric(presented: PresentedSpace, a: CompletionClass, b: CompletionClass) -> Fraction:
    value = cross_limit(presented, a.representative, b.representative)
    if value is None:
        raise MalformedInputError("classes have no limiting distance")
    return value


class CompletionSpace:
    """The completion of a presented space, materialized class by class.

    Classes are appended, never removed; registration is serialized by a
    lock so concurrent callers always agree on the class of a model.
    """

    def __init__(self, presented: PresentedSpace):
        self.presented = presented
        self._classes: list[CompletionClass] = []
        self._lock = threading.Lock()

    @property
    def classes(self) -> tuple[CompletionClass, ...]:
        with self._lock:
            return tuple(self._classes)

    def class_of(self, model: CauchySeqModel) -> CompletionClass:
        check_model(self.presented, model)
        with self._lock:
            for cls in self._classes:
                if seq_equivalent(self.presented, cls.representative, model):
                    return cls
            rep = _canonical(self.presented, model)
            labels = {c.label for c in self._classes}
            label = _label(self.presented, model)
            if label in labels:
                label = f"{label}#{len(self._classes)}"
            cls = CompletionClass(rep, self_limit(self.presented, rep), label)
            self._classes.append(cls)
            return cls

    def embed(self, point) -> CompletionClass:
        """Class of the constant sequence at a base point."""
        self.presented.check_point(point)
        if self.presented.kind == FINITE:
            return self.class_of(EventuallyPeriodicSeq.constant(self.presented.space.index(point)))
        return self.class_of(PrefixSequence(point, 1, 1))

    def base_points(self) -> list:
        if self.presented.kind != FINITE:
            raise PreconditionError("Kahn base spaces are infinite; pass points explicitly")
        return list(range(self.presented.space.n))

    @property
    def base_embedding(self) -> tuple[int, ...]:
        """Finite kind: class index of each base point."""
        classes = self.classes
        return tuple(classes.index(self.embed(x)) for x in self.base_points())

    def distance(self, a: CompletionClass, b: CompletionClass) -> Fraction:
        return quotient_pmetric(self.presented, a, b)

    def is_base_class(self, cls: CompletionClass) -> bool:
        if self.presented.kind == FINITE:
            return len(cls.representative.support) == 1
        target = cls.representative.target
        return isinstance(target, Word) or self.presented.kind == KAHN_FULL

    def materialize(self, classes: Sequence[CompletionClass] | None = None) -> PMetricSpace:
        classes = list(self.classes if classes is None else classes)
        return PMetricSpace(
            tuple(c.label for c in classes),
            tuple(tuple(self.distance(a, b) for b in classes) for a in classes),
        )

    def approximants(self, cls: CompletionClass, count: int = 64) -> Iterator:
        """Base points drawn from the representative's own terms."""
        rep = cls.representative
        if self.presented.kind == FINITE:
            yield from dict.fromkeys(rep.terms(len(rep.prefix) + len(rep.cycle)))
            yield from range(self.presented.space.n)
        else:
            for n in range(count):
                term = rep.term(n)
                if not (self.presented.exclude_empty and term.length == 0):
                    yield term

    def symmetric_density_witness(self, cls: CompletionClass, epsilon, count: int = 64):
        """A base point ``x`` with ``[x]`` and ``cls`` inside each other's eps-balls."""
        eps = as_rational(epsilon)
        for x in self.approximants(cls, count):
            bx = self.embed(x)
            if (
                self.distance(bx, cls) < self.distance(bx, bx) + eps
                and self.distance(cls, bx) < cls.self_distance + eps
            ):
                return x
        return None

    def verify(self, epsilons: Iterable = DEFAULT_EPSILONS, base_points: Iterable = ()) -> CompletionReport:
        """Check isometry of the base embedding and symmetric denseness of its image."""
        points = list(base_points) if self.presented.is_kahn else self.base_points()
        isometric = all(
            self.distance(self.embed(x), self.embed(y)) == self.presented.distance(x, y)
            for x in points for y in points
        )
        failures = []
        for cls in self.classes:
            for eps in epsilons:
                if self.symmetric_density_witness(cls, eps) is None:
                    failures.append((cls.label, as_rational(eps)))
        return CompletionReport(isometric, tuple(failures))


@dataclass(frozen=True)
class CompletionReport:
    base_isometric: bool
    density_failures: tuple[tuple[str, Fraction], ...]

    @property
    def symmetrically_dense(self) -> bool:
        return not self.density_failures

    @property
    def ok(self) -> bool:
        return self.base_isometric and self.symmetrically_dense


def complete(presented: PresentedSpace, queries: Iterable[CauchySeqModel | KahnPoint] = ()) -> CompletionSpace:
    """Build the completion.

    Finite spaces: every support set is tried as a cycle, the p-Cauchy ones
    are grouped into classes.  Kahn spaces: classes are created on demand;
    ``queries`` (models, words or streams) are registered up front.
    """
    if not isinstance(presented, PresentedSpace):
        raise MalformedInputError("complete() takes a PresentedSpace")
    result = CompletionSpace(presented)
    if presented.kind == FINITE:
        n = presented.space.n
        for x in range(n):
            result.embed(x)
        for size in range(1, n + 1):
            for support in itertools.combinations(range(n), size):
                model = EventuallyPeriodicSeq((), support)
                if double_limit(presented.space, model) is not None:
                    result.class_of(model)
    for q in queries:
        if isinstance(q, (EventuallyPeriodicSeq, PrefixSequence)):
            result.class_of(q)
        else:
            result.class_of(PrefixSequence(q, 1, 1))
    return result


def collapse_isometry(completion: CompletionSpace) -> IsometryWitness | None:
    """Finite kind: the bijection from the base space onto the materialized completion."""
    from .space import find_isometry

    return find_isometry(completion.presented.space, completion.materialize())


@dataclass
class ZeroCompletion:
    """Base classes plus classes of self-distance zero."""

    completion: CompletionSpace

    def contains(self, cls: CompletionClass) -> bool:
        return self.completion.is_base_class(cls) or cls.self_distance == 0

    @property
    def classes(self) -> tuple[CompletionClass, ...]:
        return tuple(c for c in self.completion.classes if self.contains(c))

    def materialize(self) -> PMetricSpace:
        return self.completion.materialize(self.classes)


def zero_completion(presented: PresentedSpace, queries: Iterable = ()) -> ZeroCompletion:
    return ZeroCompletion(complete(presented, queries))


@dataclass(frozen=True)
class LimitCheck:
    """How the base classes ``[x_n]`` of a model behave against a class ``C``."""

    limit: CompletionClass
    to_limit: Fraction
    self_limit: Fraction

    @property
    def p_converges(self) -> bool:
        return self.limit.self_distance == self.to_limit == self.self_limit

    @property
    def zero_converges(self) -> bool:
        return self.p_converges and self.self_limit == 0


def base_sequence_limit(completion: CompletionSpace, model: CauchySeqModel) -> LimitCheck:
    """Exact limits for the sequence of base classes of ``model``'s terms.

    ``lim_n p([x_n], C)`` equals the cross limit between the model and C's
    representative, and ``lim_n p([x_n], [x_n])`` is the model's self limit.
    """
    cls = completion.class_of(model)
    to_limit = cross_limit(completion.presented, model, cls.representative)
    return LimitCheck(cls, to_limit, self_limit(completion.presented, model))


class FiniteTarget:
    """A finite complete space used as the codomain of embeddings."""

    is_finite = True

    def __init__(self, space: PMetricSpace):
        self.space = space.require_valid()

    def points(self, depth: int | None = None) -> Iterator[int]:
        return iter(range(self.space.n))

    def distance(self, y, z) -> Fraction:
        return self.space.matrix[y][z]

    def self_distance_achievable(self, value: Fraction) -> bool:
        return any(self.space.matrix[i][i] == value for i in range(self.space.n))

    def label(self, y) -> str:
        return self.space.labels[y]

    def describe_self_distances(self) -> str:
        values = sorted({self.space.matrix[i][i] for i in range(self.space.n)})
        return "{" + ", ".join(format_rational(v) for v in values) + "}"


class KahnTarget:
    """The Kahn domain (optionally without the empty word) as a codomain."""

    is_finite = False

    def __init__(self, alphabet: Alphabet, exclude_empty: bool = False, stream_cycle_bound: int = 6):
        self.alphabet = alphabet
        self.exclude_empty = exclude_empty
        self.stream_cycle_bound = stream_cycle_bound

    @property
    def min_length(self) -> int:
        return 1 if self.exclude_empty else 0

    def points(self, depth: int | None = None) -> Iterator[KahnPoint]:
        depth = 10 if depth is None else depth
        for text in self.alphabet.words(depth, self.min_length):
            yield Word(text)
        seen = set()
        for text in self.alphabet.words(min(depth, self.stream_cycle_bound), 1):
            s = PeriodicStream(text)
            if s.periodic_form() not in seen:
                seen.add(s.periodic_form())
                yield s

    def distance(self, y, z) -> Fraction:
        return kahn_distance(y, z)

    def self_distance_achievable(self, value: Fraction) -> bool:
        if value == 0:
            return True
        if value.numerator != 1 or value.denominator & (value.denominator - 1):
            return False
        return value.denominator.bit_length() - 1 >= self.min_length

    def label(self, y) -> str:
        return y.label

    def describe_self_distances(self) -> str:
        return f"{{0}} ∪ {{2^-k : k >= {self.min_length}}}"


@dataclass(frozen=True)
class EmbeddingExtension:
    """Images of completion classes under the extended embedding."""

    images: dict[str, object]
    isometric: bool
    unique: bool
    forcing: dict[str, str] = field(default_factory=dict)


def _as_images(f) -> list:
    return list(f.mapping) if isinstance(f, IsometryWitness) else list(f)


def extend_embedding(
    f,
    completion: CompletionSpace,
    target: PMetricSpace | KahnTarget,
    depth: int = 10,
) -> EmbeddingExtension:
    """Extend an isometric embedding of the base into a complete target.

    Each class goes to the p-limit of the image of its representative.  The
    extension is then checked to be isometric on every pair of materialized
    classes, and uniqueness is shown by distance forcing: any isometric
    extension must send a class to a point with the same self-distance and
    the same distances to the images of base points.
    """
    presented = completion.presented
    if presented.kind == FINITE:
        if not isinstance(target, PMetricSpace):
            raise MalformedInputError("finite completions extend into finite targets")
        return _extend_finite(_as_images(f), completion, target.require_valid())
    if not isinstance(target, KahnTarget):
        raise MalformedInputError("Kahn completions extend into a KahnTarget")
    return _extend_kahn(completion, target, depth)


def _extend_finite(f: list[int], completion: CompletionSpace, target: PMetricSpace) -> EmbeddingExtension:
    from .sequences import classify

    base = completion.presented.space
    pt = target.matrix
    if len(f) != base.n or any(pt[f[i]][f[j]] != base.matrix[i][j] for i in range(base.n) for j in range(base.n)):
        raise PreconditionError("f is not an isometric embedding of the base")
    classes = completion.classes
    images: dict[str, int] = {}
    for cls in classes:
        rep = cls.representative
        image = EventuallyPeriodicSeq(tuple(f[i] for i in rep.prefix), tuple(f[i] for i in rep.cycle))
        limits = classify(target, image).p_limits
        if len(limits) != 1:
            raise RuntimeError(f"image of class {cls.label} has p-limits {limits} in the target")
        images[cls.label] = limits[0]
    isometric = all(
        pt[images[a.label]][images[b.label]] == completion.distance(a, b) for a in classes for b in classes
    )
    forcing = {}
    unique = True
    for cls in classes:
        candidates = [
            y for y in range(target.n)
            if pt[y][y] == cls.self_distance
            and all(pt[y][f[x]] == completion.distance(cls, completion.embed(x)) for x in range(base.n))
        ]
        forcing[cls.label] = ",".join(target.labels[y] for y in candidates)
        unique &= candidates == [images[cls.label]]
    return EmbeddingExtension(
        {k: target.labels[v] for k, v in images.items()}, isometric, unique, forcing
    )


def _extend_kahn(completion: CompletionSpace, target: KahnTarget, depth: int) -> EmbeddingExtension:
    classes = completion.classes
    images = {cls.label: cls.representative.target for cls in classes}
    for cls in classes:
        t = images[cls.label]
        rep = cls.representative
        # lim p(t, x_n) = 2^-lcp(t, target); p-convergence needs it to match both self-distances
        if not (kahn_self_distance(t) == kahn_distance(t, rep.target) == rep.self_limit()):
            raise RuntimeError(f"image sequence of {cls.label} does not p-converge")
    isometric = all(
        kahn_distance(images[a.label], images[b.label]) == completion.distance(a, b)
        for a in classes for b in classes
    )
    forcing = {}
    unique = True
    for cls in classes:
        t = images[cls.label]
        if isinstance(t, Word):
            # p(g, t) = p(t, t) = p(g, g) pins g to t by P1
            ok = completion.distance(cls, completion.embed(t)) == cls.self_distance == kahn_self_distance(t)
            forcing[cls.label] = "exact" if ok else "failed"
            unique &= ok
            continue
        # p(g, t[:k]) = 2^-k for each sampled k forces g to extend t[:k]
        forced = 0
        for k in range(1 if completion.presented.exclude_empty else 0, depth + 1):
            anchor = Word(t.prefix(k))
            if completion.distance(cls, completion.embed(anchor)) != power_of_half(k):
                break
            forced = k
        forcing[cls.label] = f"prefix {forced} symbols, self-distance 0"
        unique &= forced == depth
    return EmbeddingExtension({k: v for k, v in images.items()}, isometric, unique, forcing)


GLOBAL = "refuted-global"
EXHAUSTIVE = "refuted-exhaustive"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RefutationCertificate:
    status: str
    required_self_distance: Fraction
    candidates_checked: int
    note: str

    @property
    def refuted(self) -> bool:
        return self.status in (GLOBAL, EXHAUSTIVE)


def refute_isometric_extension(
    f,
    super_space: PMetricSpace,
    target: FiniteTarget | KahnTarget | PMetricSpace,
    depth: int = 10,
    extra: int | str | None = None,
) -> RefutationCertificate | None:
    """Show that ``f`` cannot be isometrically extended to the extra point of ``super_space``.

    ``super_space`` is the base ``X`` plus one extra point ``w`` (the last
    point unless ``extra`` says otherwise); ``f`` lists the target images of
    the remaining points in order.  Returns None when a compatible target
    point exists.
    """
    if isinstance(target, PMetricSpace):
        target = FiniteTarget(target)
    w = super_space.n - 1 if extra is None else super_space.index(extra)
    base = [i for i in range(super_space.n) if i != w]
    images = _as_images(f)
    if len(images) != len(base):
        raise PreconditionError("f must give one image per base point")
    p = super_space.matrix
    for a, ya in zip(base, images):
        for b, yb in zip(base, images):
            if target.distance(ya, yb) != p[a][b]:
                raise PreconditionError("f is not isometric on the base")

    need = p[w][w]
    checked = 0
    for y in target.points(depth):
        checked += 1
        if target.distance(y, y) != need:
            continue
        if all(target.distance(y, yx) == p[w][x] for x, yx in zip(base, images)):
            return None
    if not target.self_distance_achievable(need):
        note = (
            f"self-distance {format_rational(need)} of {super_space.labels[w]} is not attained in the target, "
            f"whose self-distances are {target.describe_self_distances()}"
        )
        return RefutationCertificate(GLOBAL, need, checked, note)
    if target.is_finite:
        return RefutationCertificate(EXHAUSTIVE, need, checked, "every target point checked")
    return RefutationCertificate(INCONCLUSIVE, need, checked, f"no candidate up to depth {depth}")


def kahn_extension_fixture(alphabet: Alphabet, sample_depth: int) -> tuple[PMetricSpace, list[Word], KahnTarget]:
    """Nonempty words up to ``sample_depth`` plus the empty word, mapped identically.

    The empty word is point 0 of the returned space.
    """
    space = truncate(alphabet, sample_depth, budget=alphabet.count_words(sample_depth))
    images = [word_from_label(label) for label in space.labels[1:]]
    return space, images, KahnTarget(alphabet, exclude_empty=True)

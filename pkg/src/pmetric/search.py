"""Random generation and exhaustive search over small partial metric spaces."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import BudgetExceededError, MalformedInputError
from .extension import fresh_label, attach_asymmetric_point
from .sequences import is_p_cauchy_complete_finite
from .space import (
    PMetricSpace,
    as_rational,
    default_labels,
    find_isometry,
    is_dense,
    is_symmetrically_dense,
)

PROPER_SYMMETRICALLY_DENSE_SUBSET = "properSymmetricallyDenseSubset"
P_CAUCHY_INCOMPLETE_FINITE = "pCauchyIncompleteFinite"
SINGLE_COMPLETION_ONLY = "singleCompletionOnly"
PROPERTIES = (PROPER_SYMMETRICALLY_DENSE_SUBSET, P_CAUCHY_INCOMPLETE_FINITE, SINGLE_COMPLETION_ONLY)

FOUND = "foundWitness"
EXHAUSTED = "exhaustedNoWitness"

DEFAULT_MAX_CANDIDATES = 2_000_000


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    seed: int
    weight_range: tuple[Fraction, Fraction] = (Fraction(0), Fraction(2))
    metric_range: tuple[Fraction, Fraction] = (Fraction(1, 2), Fraction(3))
    resolution: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise MalformedInputError("n must be at least 1")
        if self.resolution < 1:
            raise MalformedInputError("resolution must be positive")
        for name in ("weight_range", "metric_range"):
            lo, hi = (as_rational(v) for v in getattr(self, name))
            if lo < 0 or hi < lo:
                raise MalformedInputError(f"{name} must be a nonnegative interval")
            object.__setattr__(self, name, (lo, hi))
        if self.metric_range[1] * self.resolution < 1:
            raise MalformedInputError("metric_range admits no positive grid value")


def _grid_value(rng: random.Random, lo: Fraction, hi: Fraction, resolution: int, positive: bool = False) -> Fraction:
    start = -(-lo.numerator * resolution // lo.denominator)
    stop = hi.numerator * resolution // hi.denominator
    if positive:
        start = max(start, 1)
    if stop < start:
        raise MalformedInputError("interval contains no grid value")
    return Fraction(rng.randint(start, stop), resolution)


def pmetric_from_metric(d: Sequence[Sequence], w: Sequence, labels: Sequence[str] | None = None) -> PMetricSpace:
    """``p(x, y) = d(x, y) + max(w(x), w(y))``; the diagonal is ``w``."""
    n = len(w)
    d = [[as_rational(v) for v in row] for row in d]
    w = [as_rational(v) for v in w]
    rows = [[d[x][y] + max(w[x], w[y]) if x != y else w[x] for y in range(n)] for x in range(n)]
    return PMetricSpace.from_rows(rows, labels)


def random_metric(rng: random.Random, n: int, lo: Fraction, hi: Fraction, resolution: int) -> list[list[Fraction]]:
    """Shortest-path closure of a complete graph with random positive edge weights."""
    d = [[Fraction(0)] * n for _ in range(n)]
    for x, y in itertools.combinations(range(n), 2):
        d[x][y] = d[y][x] = _grid_value(rng, lo, hi, resolution, positive=True)
    for k in range(n):
        for x in range(n):
            for y in range(n):
                via = d[x][k] + d[k][y]
                if via < d[x][y]:
                    d[x][y] = via
    return d


def random_pmetric(params: GeneratorParams) -> PMetricSpace:
    rng = random.Random(params.seed)
    d = random_metric(rng, params.n, *params.metric_range, params.resolution)
    w = [_grid_value(rng, *params.weight_range, params.resolution) for _ in range(params.n)]
    return pmetric_from_metric(d, w).require_valid()


def random_grid_pmetric(n: int, grid: Sequence, seed: int, max_tries: int = 100_000) -> PMetricSpace:
    """Rejection sampling: uniform symmetric matrices over ``grid`` until one is valid."""
    values = sorted({as_rational(v) for v in grid})
    rng = random.Random(seed)
    for _ in range(max_tries):
        rows = [[Fraction(0)] * n for _ in range(n)]
        for x in range(n):
            for y in range(x, n):
                rows[x][y] = rows[y][x] = rng.choice(values)
        space = PMetricSpace.from_rows(rows)
        if space.is_valid:
            return space
    raise BudgetExceededError(max_tries, max_tries, "tries")


def _grid(grid: Sequence) -> list[Fraction]:
    values = sorted({as_rational(v) for v in grid})
    if not values:
        raise MalformedInputError("grid must be nonempty")
    return values


def enumerate_pmetrics(
    n: int,
    grid: Sequence,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    shard: tuple[int, int] | None = None,
) -> Iterator[PMetricSpace]:
    """Every valid symmetric matrix over ``grid``, once each, in lexicographic order.

    Matrices are ordered by their upper triangle read row by row.  With
    ``shard=(k, m)`` only candidates whose position is ``k`` mod ``m`` are
    tried; the union of all shards is the unsharded stream.
    """
    values = _grid(grid)
    cells = [(x, y) for x in range(n) for y in range(x, n)]
    total = len(values) ** len(cells)
    if n < 1 or total > max_candidates:
        raise BudgetExceededError(total, max_candidates, "candidates")
    k, m = shard or (0, 1)
    labels = default_labels(n)
    for pos, assignment in enumerate(itertools.product(values, repeat=len(cells))):
        if pos % m != k:
            continue
        rows = [[Fraction(0)] * n for _ in range(n)]
        for (x, y), v in zip(cells, assignment):
            rows[x][y] = rows[y][x] = v
        space = PMetricSpace.from_rows(rows, labels)
        if space.is_valid:
            yield space


def one_point_superspaces(space: PMetricSpace, grid: Sequence, max_candidates: int = DEFAULT_MAX_CANDIDATES) -> Iterator[PMetricSpace]:
    """Valid spaces obtained by adding one point whose distances come from ``grid``."""
    space.require_valid()
    values = _grid(grid)
    n = space.n
    total = len(values) ** (n + 1)
    if total > max_candidates:
        raise BudgetExceededError(total, max_candidates, "candidates")
    labels = space.labels + (fresh_label(space.labels),)
    for row in itertools.product(values, repeat=n + 1):
        rows = [list(space.matrix[x]) + [row[x]] for x in range(n)] + [list(row)]
        candidate = PMetricSpace.from_rows(rows, labels)
        if candidate.is_valid:
            yield candidate


def _dedupe(spaces: list[PMetricSpace]) -> list[PMetricSpace]:
    """One space per isometry class, the lexicographically least matrix kept."""
    kept: list[PMetricSpace] = []
    for s in sorted(spaces, key=lambda s: (s.n, s.matrix)):
        if not any(k.n == s.n and find_isometry(k, s) is not None for k in kept):
            kept.append(s)
    return kept


def classify_completions(
    space: PMetricSpace,
    extra_points: int,
    grid: Sequence,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> list[PMetricSpace]:
    """Pairwise non-isometric complete spaces with at most one extra point in which ``space`` is dense."""
    if extra_points not in (0, 1):
        raise BudgetExceededError(extra_points, 1, "extra points")
    space.require_valid()
    found = []
    if is_p_cauchy_complete_finite(space).complete:
        found.append(space)
    if extra_points == 1:
        base = range(space.n)
        for candidate in one_point_superspaces(space, grid, max_candidates):
            if is_dense(candidate, base) and is_p_cauchy_complete_finite(candidate).complete:
                found.append(candidate)
    return _dedupe(found)


@dataclass(frozen=True)
class SearchResult:
    status: str
    witness: PMetricSpace | None
    annotation: str
    states_explored: int

    @property
    def found(self) -> bool:
        return self.status == FOUND


def search_counterexample(
    property_name: str,
    max_n: int,
    grid: Sequence,
    extra_points: int = 1,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> SearchResult:
    """Exhaust every space with at most ``max_n`` points over ``grid`` looking for ``property_name``."""
    if property_name not in PROPERTIES:
        raise MalformedInputError(f"unknown property {property_name!r}")
    states = 0
    for n in range(1, max_n + 1):
        for space in enumerate_pmetrics(n, grid, max_candidates):
            if property_name == PROPER_SYMMETRICALLY_DENSE_SUBSET:
                for size in range(1, n):
                    for subset in itertools.combinations(range(n), size):
                        states += 1
                        if is_symmetrically_dense(space, subset):
                            labels = " ".join(space.labels[i] for i in subset)
                            return SearchResult(FOUND, space, f"subset {labels}", states)
            elif property_name == P_CAUCHY_INCOMPLETE_FINITE:
                states += 1
                cert = is_p_cauchy_complete_finite(space, literal=True)
                if not cert.complete:
                    seq = cert.counterexamples[0]
                    return SearchResult(FOUND, space, f"sequence {seq.format(space)}", states)
            else:
                states += 1
                completions = classify_completions(space, extra_points, grid, max_candidates)
                source = "grid"
                if len(completions) < 2:
                    attached = attach_asymmetric_point(space, 0).space
                    completions = _dedupe(completions + [attached])
                    source = "grid+attach"
                if len(completions) < 2:
                    return SearchResult(FOUND, space, f"{len(completions)} completion(s) via {source}", states)
    return SearchResult(EXHAUSTED, None, "", states)


"""Finite partial metric spaces over exact rationals.

A space is a labelled square matrix ``p`` of :class:`fractions.Fraction`
values.  Construction only checks shape and sign; the partial-metric axioms
are checked by :func:`check_axioms` so that invalid candidates can still be
represented and reported on.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import AxiomViolationError, InvalidRadiusError, MalformedInputError

PointSet = tuple[int, ...]

BIJECTION = "bijection"
EMBEDDING = "embedding"
ISOMETRY_MODES = (BIJECTION, EMBEDDING)

# Above this size the P4 sweep runs on an integer-scaled numpy matrix.
_VECTORIZE_FROM = 24
_INT64_HEADROOM = 2**61


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction; accepts ints, Fractions and ``"p/q"`` text.

    Floats are rejected so that no rounded value can leak into an exact test.
    """
    if isinstance(value, bool):
        raise MalformedInputError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, den = text.partition("/")
            if den:
                return Fraction(int(num), int(den))
            return Fraction(int(num))
        except (ValueError, ZeroDivisionError):
            raise MalformedInputError(f"not a rational: {value!r}") from None
    raise MalformedInputError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def default_labels(n: int) -> tuple[str, ...]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if n <= len(letters):
        return tuple(letters[:n])
    return tuple(f"x{i}" for i in range(n))


@dataclass(frozen=True)
class PMetricSpace:
    """A labelled n x n matrix of nonnegative rationals (a candidate pmetric)."""

    labels: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise MalformedInputError("a space needs at least one point")
        for label in labels:
            if not isinstance(label, str) or not label or any(c.isspace() for c in label):
                raise MalformedInputError(f"bad label {label!r}")
        if len(set(labels)) != len(labels):
            raise MalformedInputError("labels must be distinct")
        n = len(labels)
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.matrix)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise MalformedInputError(f"matrix must be {n}x{n}")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v < 0:
                    raise MalformedInputError(f"negative entry at ({labels[i]},{labels[j]})")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], labels: Sequence[str] | None = None) -> PMetricSpace:
        if labels is None:
            labels = default_labels(len(rows))
        return cls(tuple(labels), tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def p(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j]

    def self_distance(self, i: int) -> Fraction:
        return self.matrix[i][i]

    def index(self, point: int | str) -> int:
        if isinstance(point, str):
            try:
                return self.labels.index(point)
            except ValueError:
                raise MalformedInputError(f"unknown point {point!r}") from None
        if isinstance(point, bool) or not isinstance(point, int) or not 0 <= point < self.n:
            raise MalformedInputError(f"point index out of range: {point!r}")
        return point

    def point_set(self, points: Iterable[int | str]) -> PointSet:
        """Normalize labels or indices to a strictly sorted index tuple."""
        return tuple(sorted({self.index(p) for p in points}))

    def restrict(self, indices: Iterable[int | str]) -> PMetricSpace:
        idx = [self.index(i) for i in indices]
        return PMetricSpace(
            tuple(self.labels[i] for i in idx),
            tuple(tuple(self.matrix[i][j] for j in idx) for i in idx),
        )

    @cached_property
    def axiom_report(self) -> AxiomReport:
        return check_axioms(self)

    @property
    def is_valid(self) -> bool:
        return self.axiom_report.passed

    def require_valid(self) -> PMetricSpace:
        if not self.axiom_report.passed:
            raise AxiomViolationError(self.axiom_report)
        return self


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction

    def holds_in(self, space: PMetricSpace) -> bool:
        """Re-derive this violation from the matrix alone."""
        p = space.matrix
        if self.axiom == "P1":
            i, j = self.indices
            d = p[i][i]
            return i != j and d == p[j][j] and (p[i][j] == d or p[j][i] == d)
        if self.axiom == "P2":
            i, j = self.indices
            return p[i][i] > p[i][j]
        if self.axiom == "P3":
            i, j = self.indices
            return p[i][j] != p[j][i]
        if self.axiom == "P4":
            i, j, k = self.indices
            return p[i][k] + p[j][j] > p[i][j] + p[j][k]
        raise MalformedInputError(f"unknown axiom {self.axiom}")


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def by_axiom(self, axiom: str) -> list[Violation]:
        return [v for v in self.violations if v.axiom == axiom]


def _scaled(space: PMetricSpace) -> tuple[list[list[int]], int]:
    scale = 1
    for row in space.matrix:
        for v in row:
            scale = math.lcm(scale, v.denominator)
    return [[v.numerator * (scale // v.denominator) for v in row] for row in space.matrix], scale


def check_axioms(space: PMetricSpace) -> AxiomReport:
    """List every instance of P1-P4 that fails, with both sides of the inequality.

    P1 is reported per unordered pair ``(i, j)``, ``i < j``; P2 per ordered
    pair; P3 per unordered pair; P4 per triple ``(x, y, z)``.
    """
    if not isinstance(space, PMetricSpace):
        raise MalformedInputError("expected a PMetricSpace")
    m, scale = _scaled(space)
    n = space.n
    raw: list[tuple[str, tuple[int, ...], int, int]] = []

    for i in range(n):
        for j in range(i + 1, n):
            d = m[i][i]
            if d == m[j][j] and (m[i][j] == d or m[j][i] == d):
                raw.append(("P1", (i, j), m[i][j], d))
            if m[i][j] != m[j][i]:
                raw.append(("P3", (i, j), m[i][j], m[j][i]))
        for j in range(n):
            if m[i][i] > m[i][j]:
                raw.append(("P2", (i, j), m[i][i], m[i][j]))

    biggest = max(max(row) for row in m)
    if n >= _VECTORIZE_FROM and 2 * biggest < _INT64_HEADROOM:
        raw.extend(_p4_numpy(m, biggest))
    else:
        for i in range(n):
            row_i = m[i]
            for j in range(n):
                base = m[j][j]
                via = row_i[j]
                row_j = m[j]
                for k in range(n):
                    lhs = row_i[k] + base
                    rhs = via + row_j[k]
                    if lhs > rhs:
                        raw.append(("P4", (i, j, k), lhs, rhs))

    raw.sort(key=lambda r: (r[0], r[1]))
    return AxiomReport(
        tuple(Violation(a, idx, Fraction(lhs, scale), Fraction(rhs, scale)) for a, idx, lhs, rhs in raw)
    )


def _p4_numpy(m: list[list[int]], biggest: int):
    # narrowest integer type that holds a sum of two entries
    dtype = next(t for t in (np.int16, np.int32, np.int64) if 2 * biggest < np.iinfo(t).max)
    arr = np.array(m, dtype=dtype)
    diag = np.diag(arr)
    for j in range(arr.shape[0]):
        # p(i,k) + p(j,j) > p(i,j) + p(j,k)  <=>  p(i,k) > p(i,j) + (p(j,k) - p(j,j))
        bound = np.add.outer(arr[:, j], arr[j, :] - diag[j])
        bad = arr > bound
        if not bad.any():
            continue
        for i, k in zip(*np.nonzero(bad)):
            i, k = int(i), int(k)
            yield ("P4", (i, j, k), m[i][k] + m[j][j], m[i][j] + m[j][k])


def open_ball(space: PMetricSpace, center: int | str, epsilon) -> PointSet:
    """Points ``y`` with ``p(center, y) < p(center, center) + epsilon``."""
    space.require_valid()
    c = space.index(center)
    eps = as_rational(epsilon)
    if eps <= 0:
        raise InvalidRadiusError(f"radius must be positive, got {format_rational(eps)}")
    bound = space.matrix[c][c] + eps
    return tuple(y for y in range(space.n) if space.matrix[c][y] < bound)


@dataclass(frozen=True)
class DensenessResult:
    """Verdict plus the witness chosen for each point, or the first failing point."""

    holds: bool
    witnesses: dict[int, int]
    failing: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def _first_witness(space: PMetricSpace, subset: PointSet, accept) -> DensenessResult:
    witnesses: dict[int, int] = {}
    for x in range(space.n):
        y = next((y for y in subset if accept(x, y)), None)
        if y is None:
            return DensenessResult(False, witnesses, x)
        witnesses[x] = y
    return DensenessResult(True, witnesses)


def is_dense(space: PMetricSpace, subset: Iterable[int | str]) -> DensenessResult:
    """Exact denseness: every x has some y in the subset with ``p(x, y) = p(x, x)``.

    In a finite space "``y`` in every ball around ``x``" reduces to this
    equality because of P2.  An empty subset is never dense.
    """
    space.require_valid()
    a = space.point_set(subset)
    p = space.matrix
    return _first_witness(space, a, lambda x, y: p[x][y] == p[x][x])


def is_symmetrically_dense(space: PMetricSpace, subset: Iterable[int | str]) -> DensenessResult:
    """Exact symmetric denseness, cross-checked against the P1 collapse.

    The direct criterion asks for ``p(x, y) = p(x, x) = p(y, y)``, which by P1
    forces ``y = x``; hence in a finite space only the full point set is
    symmetrically dense.  Both routes are evaluated and must agree.
    """
    space.require_valid()
    a = space.point_set(subset)
    p = space.matrix
    direct = _first_witness(space, a, lambda x, y: p[x][y] == p[x][x] and p[x][y] == p[y][y])
    collapse = len(a) == space.n
    if direct.holds != collapse:
        raise RuntimeError("symmetric denseness criterion disagrees with the P1 collapse")
    return direct


def dense_at_radius(space: PMetricSpace, subset: Iterable[int | str], epsilon) -> DensenessResult:
    """Ball form of denseness at a single radius: some y in the subset lies in B_eps(x)."""
    space.require_valid()
    a = space.point_set(subset)
    eps = as_rational(epsilon)
    if eps <= 0:
        raise InvalidRadiusError("radius must be positive")
    p = space.matrix
    return _first_witness(space, a, lambda x, y: p[x][y] < p[x][x] + eps)


def symmetrically_dense_at_radius(space: PMetricSpace, subset: Iterable[int | str], epsilon) -> DensenessResult:
    space.require_valid()
    a = space.point_set(subset)
    eps = as_rational(epsilon)
    if eps <= 0:
        raise InvalidRadiusError("radius must be positive")
    p = space.matrix
    return _first_witness(
        space, a, lambda x, y: p[x][y] < p[x][x] + eps and p[y][x] < p[y][y] + eps
    )


@dataclass(frozen=True)
class IsometryWitness:
    mode: str
    mapping: tuple[int, ...]

    def preserves(self, source: PMetricSpace, target: PMetricSpace) -> bool:
        return is_isometric_map(source, target, self.mapping, self.mode)

    def inverse(self) -> IsometryWitness:
        if self.mode != BIJECTION:
            raise MalformedInputError("only bijections can be inverted")
        inv = [0] * len(self.mapping)
        for i, t in enumerate(self.mapping):
            inv[t] = i
        return IsometryWitness(BIJECTION, tuple(inv))


def is_isometric_map(source: PMetricSpace, target: PMetricSpace, mapping: Sequence[int], mode: str = EMBEDDING) -> bool:
    """Entry-by-entry recheck of a candidate isometric map."""
    if len(mapping) != source.n or len(set(mapping)) != len(mapping):
        return False
    if any(not 0 <= t < target.n for t in mapping):
        return False
    if mode == BIJECTION and source.n != target.n:
        return False
    ps, pt = source.matrix, target.matrix
    return all(
        pt[mapping[i]][mapping[j]] == ps[i][j] for i in range(source.n) for j in range(source.n)
    )


def find_isometry(source: PMetricSpace, target: PMetricSpace, mode: str = BIJECTION) -> IsometryWitness | None:
    """Lexicographically least distance-preserving map of the given mode, if any.

    Backtracks over source points in index order, trying target points in
    increasing order; candidates must match the self-distance (and, for
    bijections, the sorted row) of the source point.
    """
    if mode not in ISOMETRY_MODES:
        raise MalformedInputError(f"unknown isometry mode {mode!r}")
    source.require_valid()
    target.require_valid()
    ps, pt = source.matrix, target.matrix
    ns, nt = source.n, target.n
    diag_s = Counter(ps[i][i] for i in range(ns))
    diag_t = Counter(pt[i][i] for i in range(nt))
    if mode == BIJECTION:
        if ns != nt or diag_s != diag_t:
            return None
        rows_s = [sorted(r) for r in ps]
        rows_t = [sorted(r) for r in pt]
    elif ns > nt or diag_s - diag_t:
        return None

    candidates = []
    for i in range(ns):
        options = [
            t for t in range(nt)
            if pt[t][t] == ps[i][i] and (mode != BIJECTION or rows_t[t] == rows_s[i])
        ]
        if not options:
            return None
        candidates.append(options)

    mapping: list[int] = []
    used = [False] * nt

    def extend(i: int) -> bool:
        if i == ns:
            return True
        for t in candidates[i]:
            if used[t]:
                continue
            if all(pt[mapping[j]][t] == ps[j][i] and pt[t][mapping[j]] == ps[i][j] for j in range(i)):
                mapping.append(t)
                used[t] = True
                if extend(i + 1):
                    return True
                mapping.pop()
                used[t] = False
        return False

    if not extend(0):
        return None
    return IsometryWitness(mode, tuple(mapping))

"""One-point asymmetric extensions and the two-point example spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import PreconditionError
from .sequences import CompletenessCertificate, is_p_cauchy_complete_finite
from .space import (
    EMBEDDING,
    IsometryWitness,
    PMetricSpace,
    as_rational,
    find_isometry,
    is_dense,
    is_symmetrically_dense,
)


def one_point_space() -> PMetricSpace:
    """``{a}`` with ``p(a, a) = 0``."""
    return PMetricSpace(("a",), ((0,),))


def two_point_space() -> PMetricSpace:
    """``{a, b}`` with ``p(a, a) = 0`` and every other entry 1."""
    return PMetricSpace(("a", "b"), ((0, 1), (1, 1)))


@dataclass(frozen=True)
class ExtensionResult:
    space: PMetricSpace
    new_index: int
    base_index: int
    certificate: CompletenessCertificate | None = None

    @property
    def old_points(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.space.n) if i != self.new_index)


def fresh_label(labels: tuple[str, ...]) -> str:
    taken = set(labels)
    for c in "abcdefghijklmnopqrstuvwxyz":
        if c not in taken:
            return c
    i = len(labels)
    while f"x{i}" in taken:
        i += 1
    return f"x{i}"


def attach_asymmetric_point(
    space: PMetricSpace,
    base: int | str = 0,
    offset=1,
    label: str | None = None,
) -> ExtensionResult:
    """Add a point ``b`` that sits ``offset`` above the base point ``a``.

    ``p(b, y) = p(a, y) + offset`` for old ``y`` and ``p(b, b) = p(a, a) + offset``.
    The old points are dense in the result but not symmetrically dense.
    """
    if space.n == 0:
        raise PreconditionError("cannot extend an empty space")
    space.require_valid()
    a = space.index(base)
    c = as_rational(offset)
    if c <= 0:
        raise PreconditionError("offset must be positive")
    n = space.n
    p = space.matrix
    new_row = tuple(p[a][y] + c for y in range(n)) + (p[a][a] + c,)
    rows = tuple(p[x] + (new_row[x],) for x in range(n)) + (new_row,)
    labels = space.labels + (label or fresh_label(space.labels),)
    extended = PMetricSpace(labels, rows).require_valid()
    return ExtensionResult(extended, n, a)


class TwoPointExample(NamedTuple):
    base: PMetricSpace
    completion: PMetricSpace
    embedding: IsometryWitness


def build_two_point_example() -> TwoPointExample:
    """The one-point space, its two-point completion, and the inclusion ``a -> a``."""
    x1 = one_point_space().require_valid()
    y2 = two_point_space().require_valid()
    embedding = IsometryWitness(EMBEDDING, (0,))
    assert embedding.preserves(x1, y2)
    return TwoPointExample(x1, y2, embedding)


def asymmetric_completion_finite(space: PMetricSpace, base: int | str = 0) -> ExtensionResult:
    """Attach an asymmetric point and certify the result is p-Cauchy complete.

    A finite valid space is p-Cauchy complete, so the extension itself is a
    completion of ``space`` in which ``space`` is dense but not symmetrically
    dense.  Each of those three facts is rechecked here.
    """
    ext = attach_asymmetric_point(space, base)
    cert = is_p_cauchy_complete_finite(ext.space)
    old = ext.old_points
    if not cert.complete:
        raise RuntimeError(f"extension failed completeness certificate: {cert.note}")
    if not is_dense(ext.space, old) or is_symmetrically_dense(ext.space, old):
        raise RuntimeError("extension is not dense-but-not-symmetrically-dense")
    return ExtensionResult(ext.space, ext.new_index, ext.base_index, cert)


def cardinality_obstruction(space: PMetricSpace, ext: ExtensionResult) -> bool:
    """True when no bijective isometry identifies the input with its extension."""
    return find_isometry(space, ext.space) is None


def extension_offsets(ext: ExtensionResult, original: PMetricSpace) -> dict[str, Fraction]:
    """Differences between the new row and the base row, for reporting."""
    p, q = ext.space.matrix, original.matrix
    a, b = ext.base_index, ext.new_index
    return {original.labels[y]: p[b][y] - q[a][y] for y in range(original.n)} | {
        ext.space.labels[b]: p[b][b] - q[a][a]
    }

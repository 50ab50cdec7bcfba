from fractions import Fraction

import pytest

from pmetric.errors import PreconditionError
from pmetric.extension import (
    asymmetric_completion_finite,
    attach_asymmetric_point,
    build_two_point_example,
    cardinality_obstruction,
    extension_offsets,
)
from pmetric.space import PMetricSpace, find_isometry, is_dense, is_symmetrically_dense
from conftest import corpus


def test_attach_to_one_point_gives_two_point(x1, y2):
    ext = attach_asymmetric_point(x1, "a")
    assert ext.space == y2
    assert ext.new_index == 1 and ext.old_points == (0,)


def test_attach_to_two_point(y2):
    ext = attach_asymmetric_point(y2, "a")
    c = ext.new_index
    p = ext.space.matrix
    assert ext.space.labels[c] == "c"
    assert (p[c][c], p[c][0], p[c][1]) == (1, 1, 2)
    assert ext.space.is_valid


def test_custom_offset_and_label(y2):
    ext = attach_asymmetric_point(y2, "b", offset="1/3", label="z")
    assert ext.space.labels[-1] == "z"
    assert ext.space.matrix[2][2] == Fraction(4, 3)
    assert extension_offsets(ext, y2) == {"a": Fraction(1, 3), "b": Fraction(1, 3), "z": Fraction(1, 3)}


def test_attach_rejects_bad_input(y2):
    with pytest.raises(PreconditionError):
        attach_asymmetric_point(y2, 0, offset=0)


@pytest.mark.parametrize("space", corpus(30))
def test_restriction_and_denseness(space):
    for base in range(space.n):
        ext = attach_asymmetric_point(space, base)
        assert ext.space.restrict(ext.old_points) == space
        assert is_dense(ext.space, ext.old_points)
        sym = is_symmetrically_dense(ext.space, ext.old_points)
        assert not sym and sym.failing == ext.new_index


def test_two_point_example(x1, y2):
    base, completion, embedding = build_two_point_example()
    assert base == x1 and completion == y2
    assert embedding.mapping == (0,)
    assert find_isometry(base, completion) is None


def test_asymmetric_completion(x1, y2):
    r = asymmetric_completion_finite(x1, "a")
    assert r.space == y2 and r.certificate.complete
    r = asymmetric_completion_finite(y2, "a")
    assert r.space.n == 3 and r.certificate.complete
    assert cardinality_obstruction(y2, r)


def test_asymmetric_completion_of_larger_space():
    s = PMetricSpace.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 1]])
    r = asymmetric_completion_finite(s, 2)
    assert not is_symmetrically_dense(r.space, r.old_points)

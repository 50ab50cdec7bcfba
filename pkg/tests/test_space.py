from fractions import Fraction

import pytest

from pmetric.errors import AxiomViolationError, InvalidRadiusError, MalformedInputError
from pmetric.space import (
    BIJECTION,
    EMBEDDING,
    IsometryWitness,
    PMetricSpace,
    as_rational,
    check_axioms,
    dense_at_radius,
    find_isometry,
    format_rational,
    is_dense,
    is_isometric_map,
    is_symmetrically_dense,
    open_ball,
    symmetrically_dense_at_radius,
)


def test_as_rational_accepts_exact_forms():
    assert as_rational(3) == 3
    assert as_rational("6/4") == Fraction(3, 2)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)


@pytest.mark.parametrize("bad", [0.5, True, "x", "1/0", None])
def test_as_rational_rejects(bad):
    with pytest.raises((MalformedInputError, TypeError, ValueError)):
        as_rational(bad)


def test_format_rational_reduces():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(2, 6)) == "1/3"


def test_space_rejects_malformed():
    with pytest.raises(MalformedInputError):
        PMetricSpace(("a", "b"), ((0, 1),))
    with pytest.raises(MalformedInputError):
        PMetricSpace(("a", "a"), ((0, 1), (1, 0)))
    with pytest.raises(MalformedInputError):
        PMetricSpace(("a",), ((-1,),))


def test_y2_passes(y2):
    assert check_axioms(y2).passed


def test_p2_violation_reported():
    space = PMetricSpace.from_rows([[1, 0], [0, 0]])
    report = check_axioms(space)
    assert not report.passed
    p2 = report.by_axiom("P2")
    assert [v.indices for v in p2] == [(0, 1)]
    assert all(v.holds_in(space) for v in report.violations)


def test_p1_violation_reported():
    space = PMetricSpace.from_rows([[0, 0], [0, 0]])
    assert [v.indices for v in check_axioms(space).by_axiom("P1")] == [(0, 1)]


def test_p3_and_p4_violations():
    asym = PMetricSpace.from_rows([[0, 1], [2, 2]])
    assert check_axioms(asym).by_axiom("P3")
    tri = PMetricSpace.from_rows([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    p4 = check_axioms(tri).by_axiom("P4")
    assert (0, 1, 2) in [v.indices for v in p4]


def test_require_valid_raises():
    with pytest.raises(AxiomViolationError, match="P1"):
        PMetricSpace.from_rows([[0, 0], [0, 0]]).require_valid()


def test_vectorized_p4_matches_scalar():
    # a 30-point ultrametric-like space with one corrupted entry
    n = 30
    rows = [[Fraction(1, 1 + min(i, j)) if i != j else Fraction(1, 2 + i) for j in range(n)] for i in range(n)]
    good = PMetricSpace.from_rows(rows)
    rows[0][29] = rows[29][0] = Fraction(7)
    bad = PMetricSpace.from_rows(rows)
    assert good.is_valid == all(
        good.matrix[x][z] + good.matrix[y][y] <= good.matrix[x][y] + good.matrix[y][z]
        for x in range(n) for y in range(n) for z in range(n)
    )
    violations = check_axioms(bad).by_axiom("P4")
    assert violations and all(v.holds_in(bad) for v in violations)


def test_open_ball(y2):
    assert open_ball(y2, "a", Fraction(1, 2)) == (0,)
    assert open_ball(y2, "b", Fraction(1, 2)) == (0, 1)
    with pytest.raises(InvalidRadiusError):
        open_ball(y2, "a", 0)


def test_dense(y2):
    r = is_dense(y2, ["a"])
    assert r.holds and r.witnesses[1] == 0
    r = is_dense(y2, ["b"])
    assert not r.holds and r.failing == 0
    assert is_dense(y2, ["a", "b"])


def test_empty_subset_is_not_dense(y2):
    assert not is_dense(y2, [])
    assert not is_symmetrically_dense(y2, [])


def test_symmetrically_dense(y2):
    r = is_symmetrically_dense(y2, ["a"])
    assert not r.holds and r.failing == 1
    r = is_symmetrically_dense(y2, ["b"])
    assert not r.holds and r.failing == 0
    assert is_symmetrically_dense(y2, [0, 1])


def test_radius_forms(y2):
    assert dense_at_radius(y2, ["a"], Fraction(1, 2))
    assert not symmetrically_dense_at_radius(y2, ["a"], Fraction(1, 2))
    # at radius above the gap the symmetric form holds too
    assert symmetrically_dense_at_radius(y2, ["a"], 2)


def test_find_isometry(x1, y2):
    assert find_isometry(x1, y2, BIJECTION) is None
    assert find_isometry(y2, y2).mapping == (0, 1)
    assert find_isometry(x1, y2, EMBEDDING).mapping == (0,)


def test_find_isometry_permutation():
    s = PMetricSpace.from_rows([[0, 1, 2], [1, 1, 2], [2, 2, 2]])
    t = s.restrict([2, 0, 1])
    w = find_isometry(s, t)
    assert w.mapping == (1, 2, 0)
    assert w.preserves(s, t)
    assert w.inverse().preserves(t, s)


def test_is_isometric_map_rejects_non_injective(y2):
    assert not is_isometric_map(y2, y2, [0, 0])
    assert not IsometryWitness(BIJECTION, (1, 0)).preserves(y2, y2)


def test_large_space_with_huge_denominators_stays_exact():
    # entries scale past int64, forcing the pure Python sweep
    n = 25
    tiny = Fraction(1, 2**70)
    rows = [[Fraction(1) if i != j else tiny * (i + 1) for j in range(n)] for i in range(n)]
    assert PMetricSpace.from_rows(rows).is_valid
    rows[3][4] = rows[4][3] = Fraction(3)
    report = check_axioms(PMetricSpace.from_rows(rows))
    assert report.by_axiom("P4") and not report.by_axiom("P2")

from fractions import Fraction

import pytest

from pmetric.errors import MalformedInputError
from pmetric.sequences import (
    EventuallyPeriodicSeq,
    check_implication_chain,
    classify,
    double_limit,
    enumerate_sequences,
    is_p_cauchy_complete_finite,
    sample_double_limit,
)
from conftest import corpus

Seq = EventuallyPeriodicSeq


def test_parse_and_format(y2):
    seq = Seq.parse("b;a", y2)
    assert seq == Seq((1,), (0,))
    assert seq.format(y2) == "b;a"
    assert Seq.parse("a,b", y2) == Seq((), (0, 1))
    assert seq.terms(4) == [1, 0, 0, 0]


def test_empty_cycle_rejected():
    with pytest.raises(MalformedInputError):
        Seq((0,), ())


def test_double_limits(y2):
    assert double_limit(y2, Seq((), (0, 1))) is None
    assert double_limit(y2, Seq((), (1,))) == 1
    assert double_limit(y2, Seq((1,), (0,))) == 0


def test_mixed_cycle_does_not_stabilize(y2):
    # sampled grid sees both values on every tail
    assert sample_double_limit(y2, Seq((), (0, 1)), 25, 50) == {Fraction(0), Fraction(1)}
    assert sample_double_limit(y2, Seq((1,), (0,)), 1, 50) == {Fraction(0)}


def test_classify_constant_a(y2):
    c = classify(y2, Seq.constant(0))
    assert c.zero_cauchy and c.p_cauchy
    assert c.p_limits == (0,) and c.zero_limits == (0,)
    assert c.top_limits == (0, 1)


def test_classify_constant_b(y2):
    c = classify(y2, Seq.constant(1))
    assert c.p_cauchy and c.p_cauchy_limit == 1
    assert not c.zero_cauchy
    assert c.p_limits == (1,)


def test_classify_alternating(y2):
    c = classify(y2, Seq((), (0, 1)))
    assert not c.p_cauchy and c.p_limits == ()


def test_completeness(x1, y2):
    assert is_p_cauchy_complete_finite(x1)
    cert = is_p_cauchy_complete_finite(y2, literal=True)
    assert cert.complete and cert.literal
    assert cert.sequences_checked == sum(1 for _ in enumerate_sequences(2, 2, 2))


@pytest.mark.parametrize("space", corpus(8, max_n=4))
def test_completeness_random(space):
    fast = is_p_cauchy_complete_finite(space)
    literal = is_p_cauchy_complete_finite(space, literal=True, max_prefix=1, max_cycle=space.n)
    assert fast.complete and literal.complete


def test_implication_chain(y2):
    r = check_implication_chain(y2, Seq.constant(0))
    assert r.holds and not any(i.vacuous for i in r.implications)
    r = check_implication_chain(y2, Seq.constant(1))
    assert r.holds
    names = {i.name: i for i in r.implications}
    assert not names["p-converge => topologically converge"].vacuous
    assert names["0-Cauchy => p-Cauchy"].vacuous
    r = check_implication_chain(y2, Seq((), (0, 1)))
    assert r.holds and all(i.vacuous for i in r.implications)

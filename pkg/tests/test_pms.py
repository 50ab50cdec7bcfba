import pytest

from pmetric.errors import PmsParseError
from pmetric.pms import emit_pms, emit_pms_stream, parse_pms, parse_pms_stream

Y2_TEXT = "pms 1\npoints 2\nlabels a b\nmatrix\n0 1\n1 1\n"


def test_parse_examples(x1, y2):
    assert parse_pms(Y2_TEXT) == y2
    assert parse_pms("pms 1\npoints 1\nlabels a\nmatrix\n0\n") == x1


def test_round_trip_normalizes():
    messy = "\n  pms 1\npoints   2\nlabels a   b\n\nmatrix\n0   2/2\n 3/3 4/4  \n"
    assert emit_pms(parse_pms(messy)) == Y2_TEXT


@pytest.mark.parametrize(
    "text, line",
    [
        ("pms 1\npoints 2\nlabels a b\nmatrix\n0 1\n1\n", 6),
        ("pms 2\npoints 1\nlabels a\nmatrix\n0\n", 1),
        ("pms 1\npoints 1\nlabels a\nmatrix\n-1\n", 5),
        ("pms 1\npoints 1\nlabels a\nmatrix\nx\n", 5),
        ("pms 1\npoints 2\nlabels a\nmatrix\n", 3),
        ("pms 1\npoints 1\nlabels a\nmatrix\n0\nextra\n", 6),
        ("pms 1\npoints 2\nlabels a b\nmatrix\n0 1\n", 5),
        ("", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(PmsParseError) as info:
        parse_pms(text)
    assert info.value.line == line


def test_candidate_not_checked():
    bad = parse_pms("pms 1\npoints 2\nlabels a b\nmatrix\n0 0\n0 0\n")
    assert not bad.is_valid


def test_stream(x1, y2):
    text = emit_pms_stream([x1, y2])
    assert "\n\npms 1" in text
    assert parse_pms_stream(text) == [x1, y2]

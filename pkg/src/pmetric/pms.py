"""The ``.pms`` text format for finite partial metric spaces.

    pms 1
    points 2
    labels a b
    matrix
    0 1
    1 1

Entries are integers or ``num/den``.  Blank lines and surrounding
whitespace are ignored; :func:`emit_pms` writes the normal form, single
spaces and reduced rationals.  Several spaces in one stream are separate
blocks, each starting at its own ``pms`` header.
"""

from __future__ import annotations

from .errors import MalformedInputError, PmsParseError
from .space import PMetricSpace, as_rational, format_rational

FORMAT_TAG = "pms"
FORMAT_VERSION = 1


def _tokens(text: str) -> list[tuple[int, list[str]]]:
    return [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1) if line.strip()]


def _parse_block(lines: list[tuple[int, list[str]]], end_line: int) -> PMetricSpace:
    it = iter(lines)

    def take(expect: str) -> tuple[int, list[str]]:
        try:
            no, toks = next(it)
        except StopIteration:
            raise PmsParseError(end_line, f"unexpected end of input, expected '{expect}'") from None
        if toks[0] != expect:
            raise PmsParseError(no, f"expected '{expect}', found {toks[0]!r}")
        return no, toks

    no, toks = take(FORMAT_TAG)
    if len(toks) != 2 or toks[1] != str(FORMAT_VERSION):
        raise PmsParseError(no, f"unsupported header {' '.join(toks)!r}; expected 'pms {FORMAT_VERSION}'")
    no, toks = take("points")
    if len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 1:
        raise PmsParseError(no, "'points' needs one positive integer")
    n = int(toks[1])
    no, toks = take("labels")
    labels = toks[1:]
    if len(labels) != n:
        raise PmsParseError(no, f"expected {n} labels, found {len(labels)}")
    if len(set(labels)) != n:
        raise PmsParseError(no, "labels must be distinct")
    no, toks = take("matrix")
    if len(toks) != 1:
        raise PmsParseError(no, "'matrix' takes no arguments")
    rows = []
    for _ in range(n):
        try:
            no, toks = next(it)
        except StopIteration:
            raise PmsParseError(end_line, f"expected {n} matrix rows, found {len(rows)}") from None
        if len(toks) != n:
            raise PmsParseError(no, f"row has {len(toks)} entries, expected {n}")
        row = []
        for tok in toks:
            try:
                value = as_rational(tok)
            except MalformedInputError:
                raise PmsParseError(no, f"unparseable entry {tok!r}") from None
            if value < 0 or tok.startswith("-"):
                raise PmsParseError(no, f"negative entry {tok!r}")
            row.append(value)
        rows.append(tuple(row))
    for no, toks in it:
        raise PmsParseError(no, f"unexpected trailing content {' '.join(toks)!r}")
    try:
        return PMetricSpace(tuple(labels), tuple(rows))
    except MalformedInputError as exc:
        raise PmsParseError(lines[0][0], str(exc)) from None


def parse_pms(text: str) -> PMetricSpace:
    """Parse one space.  The result is a candidate; axioms are not checked."""
    lines = _tokens(text)
    if not lines:
        raise PmsParseError(1, "empty input")
    return _parse_block(lines, len(text.splitlines()) or 1)


def parse_pms_stream(text: str) -> list[PMetricSpace]:
    lines = _tokens(text)
    end = len(text.splitlines()) or 1
    blocks: list[list[tuple[int, list[str]]]] = []
    for entry in lines:
        if entry[1][0] == FORMAT_TAG or not blocks:
            blocks.append([])
        blocks[-1].append(entry)
    spaces = []
    for i, block in enumerate(blocks):
        block_end = blocks[i + 1][0][0] - 1 if i + 1 < len(blocks) else end
        spaces.append(_parse_block(block, block_end))
    return spaces


def emit_pms(space: PMetricSpace) -> str:
    lines = [
        f"{FORMAT_TAG} {FORMAT_VERSION}",
        f"points {space.n}",
        "labels " + " ".join(space.labels),
        "matrix",
    ]
    lines.extend(" ".join(format_rational(v) for v in row) for row in space.matrix)
    return "\n".join(lines) + "\n"


def emit_pms_stream(spaces) -> str:
    return "\n".join(emit_pms(s) for s in spaces)

"""Command-line front end.

Every command prints a line-oriented report of ``key: value`` pairs; input
spaces are echoed as ``space> `` lines so a verdict can be recomputed from
the report alone.  The last line is always ``exit: <code>``.

Exit codes: 0 verdict true or success, 1 verdict false, 2 usage or parse
error, 3 the input violates the partial metric axioms.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import completion as comp
from . import kahn
from .errors import (
    AxiomViolationError,
    BudgetExceededError,
    LimitNotComputableError,
    PMetricError,
    PmsParseError,
)
from .extension import attach_asymmetric_point, extension_offsets
from .pms import emit_pms, emit_pms_stream, parse_pms
from .repro import run_fixtures
from .search import (
    PROPERTIES,
    GeneratorParams,
    classify_completions,
    random_grid_pmetric,
    random_pmetric,
    search_counterexample,
)
from .sequences import EventuallyPeriodicSeq, check_implication_chain, is_p_cauchy_complete_finite
from .space import (
    BIJECTION,
    ISOMETRY_MODES,
    PMetricSpace,
    as_rational,
    check_axioms,
    dense_at_radius,
    find_isometry,
    format_rational,
    is_dense,
    is_symmetrically_dense,
    open_ball,
    symmetrically_dense_at_radius,
)

OK, FALSE, USAGE, AXIOMS = 0, 1, 2, 3


@dataclass
class Report:
    command: str
    lines: list[str] = field(default_factory=list)
    raw: str | None = None

    def add(self, key: str, value) -> None:
        self.lines.append(f"{key}: {_text(value)}")

    def add_space(self, space: PMetricSpace, prefix: str = "space> ") -> None:
        self.lines.extend(prefix + line for line in emit_pms(space).splitlines())

    def render(self, code: int) -> str:
        if self.raw is not None:
            return self.raw
        return "\n".join([f"command: {self.command}", *self.lines, f"exit: {code}"]) + "\n"


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_text(v) for v in value) if value else "-"
    if value is None:
        return "-"
    return str(value)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, report: Report, name: str = "space") -> PMetricSpace:
    space = parse_pms(_read(path))
    report.add_space(space, f"{name}> ")
    space.require_valid()
    return space


def _add_violations(report: Report, violations, labels=None) -> None:
    for v in violations:
        idx = ",".join(labels[i] if labels else str(i) for i in v.indices)
        report.add(f"violation {v.axiom}", f"({idx}) lhs {format_rational(v.lhs)} rhs {format_rational(v.rhs)}")


def _labels(space: PMetricSpace, idx) -> list[str]:
    return [space.labels[i] for i in idx]


def _subset(text: str) -> list[str]:
    return [s for s in text.split(",") if s]


def _mapping(text: str, source: PMetricSpace, target: PMetricSpace) -> list[int]:
    pairs = dict(item.split("=", 1) for item in text.split(",") if item)
    missing = [a for a in source.labels if a not in pairs]
    if missing:
        raise _UsageError(f"--map gives no image for {','.join(missing)}")
    return [target.index(pairs[a]) for a in source.labels]


# commands ------------------------------------------------------------------


def cmd_check(args, report: Report) -> int:
    space = parse_pms(_read(args.file))
    report.add_space(space)
    violations = check_axioms(space).violations
    report.add("verdict", not violations)
    report.add("violations", len(violations))
    _add_violations(report, violations, space.labels)
    return OK if not violations else AXIOMS


def cmd_ball(args, report: Report) -> int:
    space = _load(args.file, report)
    members = open_ball(space, args.center, args.epsilon)
    report.add("center", space.labels[space.index(args.center)])
    report.add("epsilon", as_rational(args.epsilon))
    report.add("members", _labels(space, members))
    return OK


def _denseness(args, report: Report, symmetric: bool) -> int:
    space = _load(args.file, report)
    subset = _subset(args.subset)
    if args.epsilon is None:
        result = (is_symmetrically_dense if symmetric else is_dense)(space, subset)
    else:
        report.add("epsilon", as_rational(args.epsilon))
        result = (symmetrically_dense_at_radius if symmetric else dense_at_radius)(space, subset, args.epsilon)
    report.add("subset", _labels(space, space.point_set(subset)))
    report.add("verdict", result.holds)
    for x, y in result.witnesses.items():
        report.add(f"witness {space.labels[x]}", space.labels[y])
    if not result.holds:
        report.add("counterwitness", space.labels[result.failing])
    return OK if result.holds else FALSE


def cmd_dense(args, report):
    return _denseness(args, report, symmetric=False)


def cmd_symdense(args, report):
    return _denseness(args, report, symmetric=True)


def cmd_seq(args, report: Report) -> int:
    space = _load(args.file, report)
    seq = EventuallyPeriodicSeq.parse(args.seq, space)
    chain = check_implication_chain(space, seq)
    c = chain.classification
    report.add("sequence", seq.format(space))
    report.add("support", _labels(space, sorted(seq.support)))
    report.add("p-cauchy", c.p_cauchy)
    report.add("double-limit", c.p_cauchy_limit)
    report.add("0-cauchy", c.zero_cauchy)
    report.add("p-limits", _labels(space, c.p_limits))
    report.add("0-limits", _labels(space, c.zero_limits))
    report.add("topological-limits", _labels(space, c.top_limits))
    for imp in chain.implications:
        report.add(f"implication {imp.name}", "vacuous" if imp.vacuous else imp.holds)
    report.add("verdict", c.p_converges)
    return OK if c.p_converges else FALSE


def cmd_extend(args, report: Report) -> int:
    space = _load(args.file, report, "input")
    ext = attach_asymmetric_point(space, args.base, args.offset, args.label)
    new = ext.space
    old = ext.old_points
    cert = is_p_cauchy_complete_finite(new)
    dense = is_dense(new, old)
    sym = is_symmetrically_dense(new, old)
    report.add("base", space.labels[ext.base_index])
    report.add("new-point", new.labels[ext.new_index])
    for label, diff in extension_offsets(ext, space).items():
        report.add(f"offset {label}", diff)
    report.add("axioms", new.is_valid)
    report.add("restricts-to-input", new.restrict(old) == space)
    report.add("p-cauchy-complete", cert.complete)
    report.add("old-points-dense", dense.holds)
    report.add("old-points-symmetrically-dense", sym.holds)
    if not sym.holds:
        report.add("counterwitness", new.labels[sym.failing])
    report.add_space(new)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(emit_pms(new))
        report.add("output", args.output)
    ok = new.is_valid and cert.complete and dense.holds and not sym.holds
    return OK if ok else FALSE


def _presented(args, report: Report) -> comp.PresentedSpace:
    if args.kahn:
        if args.file:
            raise _UsageError("give either a file or --kahn, not both")
        report.add("alphabet", args.kahn)
        report.add("exclude-empty", args.exclude_empty)
        return comp.PresentedSpace.kahn_words(kahn.Alphabet.of(args.kahn), args.exclude_empty)
    if not args.file:
        raise _UsageError("a .pms file or --kahn ALPHABET is required")
    if args.query:
        raise _UsageError("--query applies to --kahn only")
    return comp.PresentedSpace.finite(_load(args.file, report))


def _kahn_queries(args) -> list:
    return [kahn.parse_point(q) for q in args.query or ()]


def _report_classes(report: Report, space: comp.CompletionSpace, classes) -> None:
    for cls in classes:
        kind = "base" if space.is_base_class(cls) else "new"
        report.add(f"class {cls.label}", f"self-distance {format_rational(cls.self_distance)} {kind}")
    if classes:
        report.add_space(space.materialize(list(classes)), "completion> ")


def _kahn_base_sample(presented: comp.PresentedSpace, depth: int = 2) -> list:
    low = 1 if presented.exclude_empty else 0
    return [kahn.Word(w) for w in presented.alphabet.words(depth, low)]


def cmd_complete(args, report: Report) -> int:
    presented = _presented(args, report)
    space = comp.complete(presented, _kahn_queries(args))
    _report_classes(report, space, space.classes)
    if presented.is_kahn:
        result = space.verify(base_points=_kahn_base_sample(presented))
    else:
        result = space.verify()
        witness = comp.collapse_isometry(space)
        report.add("collapse-isometry", witness is not None)
    report.add("base-isometric", result.base_isometric)
    report.add("base-symmetrically-dense", result.symmetrically_dense)
    for label, eps in result.density_failures:
        report.add("density-failure", f"{label} at {format_rational(eps)}")
    report.add("verdict", result.ok)
    return OK if result.ok else FALSE


def cmd_zero_complete(args, report: Report) -> int:
    presented = _presented(args, report)
    zero = comp.zero_completion(presented, _kahn_queries(args))
    space = zero.completion
    for cls in space.classes:
        report.add(f"member {cls.label}", zero.contains(cls))
    _report_classes(report, space, zero.classes)
    base = _kahn_base_sample(presented) if presented.is_kahn else ()
    result = space.verify(base_points=base)
    dense = all(
        space.symmetric_density_witness(cls, eps) is not None
        for cls in zero.classes for eps in comp.DEFAULT_EPSILONS
    )
    report.add("base-symmetrically-dense", dense)
    ok = result.base_isometric and dense
    if not presented.is_kahn:
        collapsed = find_isometry(presented.space, zero.materialize()) is not None
        report.add("collapses-to-base", collapsed)
        ok &= collapsed
    report.add("verdict", ok)
    return OK if ok else FALSE


def cmd_isometry(args, report: Report) -> int:
    source = _load(args.source, report, "source")
    target = _load(args.target, report, "target")
    witness = find_isometry(source, target, args.mode)
    report.add("mode", args.mode)
    report.add("verdict", witness is not None)
    if witness is not None:
        report.add("map", [f"{source.labels[i]}={target.labels[j]}" for i, j in enumerate(witness.mapping)])
    return OK if witness is not None else FALSE


def cmd_extend_embedding(args, report: Report) -> int:
    if args.kahn:
        presented = comp.PresentedSpace.kahn_words(kahn.Alphabet.of(args.kahn), args.exclude_empty)
        space = comp.complete(presented, _kahn_queries(args))
        target = comp.KahnTarget(presented.alphabet, args.exclude_empty)
        result = comp.extend_embedding(None, space, target, args.depth)
    else:
        if not (args.base and args.target and args.map):
            raise _UsageError("extend-embedding needs BASE TARGET --map, or --kahn ALPHABET")
        base = _load(args.base, report, "base")
        target_space = _load(args.target, report, "target")
        f = _mapping(args.map, base, target_space)
        space = comp.complete(comp.PresentedSpace.finite(base))
        result = comp.extend_embedding(f, space, target_space)
    for label, image in result.images.items():
        report.add(f"image {label}", getattr(image, "label", image))
    for label, reason in result.forcing.items():
        report.add(f"forcing {label}", reason)
    report.add("isometric", result.isometric)
    report.add("unique", result.unique)
    ok = result.isometric and result.unique
    report.add("verdict", ok)
    return OK if ok else FALSE


def cmd_refute_extension(args, report: Report) -> int:
    if args.kahn:
        alphabet = kahn.Alphabet.of(args.kahn)
        super_space, images, target = comp.kahn_extension_fixture(alphabet, args.sample_depth)
        report.add("alphabet", args.kahn)
        report.add("sample-depth", args.sample_depth)
        report.add("extra", kahn.EMPTY_LABEL)
        cert = comp.refute_isometric_extension(images, super_space, target, args.depth, extra=0)
    else:
        if not (args.super_space and args.target and args.map):
            raise _UsageError("refute-extension needs SUPER TARGET --map, or --kahn ALPHABET")
        super_space = _load(args.super_space, report, "super")
        target_space = _load(args.target, report, "target")
        extra = super_space.index(args.extra) if args.extra else super_space.n - 1
        base = super_space.restrict([i for i in range(super_space.n) if i != extra])
        f = _mapping(args.map, base, target_space)
        report.add("extra", super_space.labels[extra])
        cert = comp.refute_isometric_extension(f, super_space, target_space, args.depth, extra=extra)
    report.add("depth", args.depth)
    report.add("verdict", cert is not None and cert.refuted)
    if cert is None:
        report.add("status", "extension-exists")
        return FALSE
    report.add("status", cert.status)
    report.add("required-self-distance", cert.required_self_distance)
    report.add("candidates-checked", cert.candidates_checked)
    report.add("note", cert.note)
    return OK if cert.refuted else FALSE


def cmd_kahn(args, report: Report) -> int:
    alphabet = kahn.Alphabet.of(args.alphabet) if getattr(args, "alphabet", None) else None
    if args.kahn_command == "dist":
        x, y = kahn.parse_point(args.x), kahn.parse_point(args.y)
        try:
            # periodic pairs and identical programs are decided exactly
            value = kahn.kahn_distance(x, y, scan_limit=max(args.precision, 1))
        except LimitNotComputableError:
            value = kahn.kahn_pmetric(x, y, args.precision)
        report.add("x", x.label)
        report.add("y", y.label)
        report.add("precision", args.precision)
        if isinstance(value, kahn.Interval):
            report.add("exact", False)
            report.add("interval", [value.lo, value.hi])
        else:
            report.add("exact", True)
            report.add("distance", value)
        return OK
    if args.kahn_command == "truncate":
        report.raw = emit_pms(kahn.truncate(alphabet, args.depth, args.budget))
        return OK
    if args.kahn_command == "witness":
        point = kahn.parse_point(args.point)
        w = kahn.density_witness(alphabet, args.subset, point, args.epsilon, args.max_length)
        report.add("point", point.label)
        report.add("subset", args.subset)
        report.add("epsilon", w.epsilon)
        report.add("dense-witness", w.dense_witness.label if w.dense_witness else None)
        report.add("symmetric-witness", w.symmetric_witness.label if w.symmetric_witness else None)
        if w.asymmetry is not None:
            report.add("asymmetry-holds", w.asymmetry.holds)
            report.add("asymmetry-words-checked", w.asymmetry.words_checked)
            report.add("asymmetry-global", w.asymmetry.global_bound)
        ok = w.symmetric_witness is not None
        report.add("verdict", ok)
        return OK if ok else FALSE
    witness = kahn.kahn_incompleteness_witness(alphabet, args.max_length)
    report.add("sequence", str(witness.sequence))
    report.add("sequence-terms", [t.label for t in witness.sequence.terms(5)])
    report.add("self-distance-limit", witness.self_distance_limit)
    report.add("words-checked", len(witness.checks))
    report.add("verdict", witness.no_word_limit)
    return OK if witness.no_word_limit else FALSE


def cmd_gen(args, report: Report) -> int:
    spaces = []
    for i in range(args.count):
        seed = args.seed + i
        if args.grid:
            spaces.append(random_grid_pmetric(args.n, _subset(args.grid), seed))
        else:
            spaces.append(random_pmetric(GeneratorParams(args.n, seed)))
    report.raw = emit_pms_stream(spaces)
    return OK


def cmd_search(args, report: Report) -> int:
    grid = _subset(args.grid)
    report.add("property", args.property)
    report.add("max-n", args.max_n)
    report.add("grid", [as_rational(g) for g in grid])
    if args.classify:
        space = _load(args.classify, report)
        found = classify_completions(space, args.extra_points, grid)
        report.add("completions", len(found))
        for i, s in enumerate(found):
            report.add_space(s, f"completion{i}> ")
        return OK
    result = search_counterexample(args.property, args.max_n, grid, args.extra_points)
    report.add("status", result.status)
    report.add("states-explored", result.states_explored)
    if result.witness is not None:
        report.add("annotation", result.annotation)
        report.add_space(result.witness, "witness> ")
    # the verdict is "the property is impossible in this range"
    report.add("verdict", not result.found)
    return FALSE if result.found else OK


def cmd_repro(args, report: Report) -> int:
    results = run_fixtures(args.only)
    for r in results:
        report.add(f"fixture {r.name}", "pass" if r.passed else "FAIL")
        if r.detail:
            report.add(f"detail {r.name}", r.detail)
    ok = all(r.passed for r in results)
    report.add("verdict", ok)
    return OK if ok else FALSE


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmetric", description="Exact checks on partial metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="verify the axioms of a .pms file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ball", help="list the open ball around a point")
    p.add_argument("file")
    p.add_argument("--center", required=True)
    p.add_argument("--epsilon", required=True)
    p.set_defaults(func=cmd_ball)

    for name, func in (("dense", cmd_dense), ("symdense", cmd_symdense)):
        p = sub.add_parser(name, help=f"decide whether a subset is {name}")
        p.add_argument("file")
        p.add_argument("--subset", required=True, help="comma-separated labels")
        p.add_argument("--epsilon", help="check a single radius instead of the exact criterion")
        p.set_defaults(func=func)

    p = sub.add_parser("seq", help="classify an eventually periodic sequence")
    p.add_argument("file")
    p.add_argument("--seq", required=True, help="prefix;cycle, labels comma-separated")
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("extend", help="attach an asymmetric point")
    p.add_argument("file")
    p.add_argument("--base", default=0)
    p.add_argument("--offset", default="1")
    p.add_argument("--label")
    p.add_argument("--output", help="also write the extended space to this file")
    p.set_defaults(func=cmd_extend)

    for name, func in (("complete", cmd_complete), ("zero-complete", cmd_zero_complete)):
        p = sub.add_parser(name, help="build and verify a completion")
        p.add_argument("file", nargs="?")
        p.add_argument("--kahn", metavar="ALPHABET")
        p.add_argument("--exclude-empty", action="store_true")
        p.add_argument("--query", action="append", help="Kahn point to register")
        p.set_defaults(func=func)

    p = sub.add_parser("isometry", help="search for an isometry")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--mode", choices=ISOMETRY_MODES, default=BIJECTION)
    p.set_defaults(func=cmd_isometry)

    p = sub.add_parser("extend-embedding", help="extend an embedding to the completion")
    p.add_argument("base", nargs="?")
    p.add_argument("target", nargs="?")
    p.add_argument("--map", help="a=x,b=y")
    p.add_argument("--kahn", metavar="ALPHABET")
    p.add_argument("--exclude-empty", action="store_true")
    p.add_argument("--query", action="append")
    p.add_argument("--depth", type=int, default=10)
    p.set_defaults(func=cmd_extend_embedding)

    p = sub.add_parser("refute-extension", help="certify that an embedding cannot be extended")
    p.add_argument("super_space", nargs="?", metavar="SUPER")
    p.add_argument("target", nargs="?")
    p.add_argument("--map")
    p.add_argument("--extra", help="label of the extra point (default: last)")
    p.add_argument("--kahn", metavar="ALPHABET")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--sample-depth", type=int, default=4)
    p.set_defaults(func=cmd_refute_extension)

    p = sub.add_parser("kahn", help="Kahn domain utilities")
    ksub = p.add_subparsers(dest="kahn_command", required=True, parser_class=_Parser)
    k = ksub.add_parser("dist")
    k.add_argument("x")
    k.add_argument("y")
    k.add_argument("--precision", type=int, default=64)
    k = ksub.add_parser("truncate")
    k.add_argument("--alphabet", required=True)
    k.add_argument("--depth", type=int, required=True)
    k.add_argument("--budget", type=int, default=kahn.DEFAULT_TRUNCATION_BUDGET)
    k = ksub.add_parser("witness")
    k.add_argument("--alphabet", required=True)
    k.add_argument("--point", required=True)
    k.add_argument("--epsilon", required=True)
    k.add_argument("--subset", choices=kahn.SUBSETS, default=kahn.ALL_WORDS)
    k.add_argument("--max-length", type=int, default=10)
    k = ksub.add_parser("incomplete")
    k.add_argument("--alphabet", required=True)
    k.add_argument("--max-length", type=int, default=6)
    p.set_defaults(func=cmd_kahn)

    p = sub.add_parser("gen", help="emit seeded random spaces")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--grid", help="rejection-sample over these values instead")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("search", help="exhaustive counterexample search")
    p.add_argument("--property", choices=PROPERTIES, default=PROPERTIES[0])
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--grid", default="0,1/2,1")
    p.add_argument("--extra-points", type=int, default=1)
    p.add_argument("--classify", metavar="FILE", help="list the completions of FILE instead")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("repro", help="replay every built-in fixture")
    p.add_argument("--only", action="append", metavar="NAME", help="run just this fixture (repeatable)")
    p.set_defaults(func=cmd_repro)
    return parser


def run(argv: Sequence[str]) -> tuple[Report, int]:
    report = Report(" ".join(argv))
    try:
        with contextlib.redirect_stdout(io.StringIO()) as help_text:
            args = build_parser().parse_args(list(argv))
    except SystemExit as exc:  # --help
        report.raw = help_text.getvalue()
        return report, exc.code or 0
    except _UsageError as exc:
        report.add("error", f"usage: {exc}")
        return report, USAGE
    try:
        code = args.func(args, report)
    except PmsParseError as exc:
        report.add("error", f"parse: {exc}")
        code = USAGE
    except AxiomViolationError as exc:
        report.lines = [line for line in report.lines if "> " in line]
        _add_violations(report, exc.report.violations)
        report.add("error", f"axioms: {exc}")
        code = AXIOMS
    except _UsageError as exc:
        report.add("error", f"usage: {exc}")
        code = USAGE
    except (BudgetExceededError, LimitNotComputableError) as exc:
        report.add("error", f"{type(exc).__name__}: {exc}")
        code = USAGE
    except (PMetricError, ValueError, KeyError, IndexError) as exc:
        report.add("error", f"input: {exc}")
        code = USAGE
    if report.raw is not None and code != OK:
        report.raw = None
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    report, code = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(report.render(code))
    return code


if __name__ == "__main__":
    sys.exit(main())

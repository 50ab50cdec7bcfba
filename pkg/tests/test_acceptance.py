"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from pmetric.cli import run
from pmetric.completion import (
    GLOBAL,
    PresentedSpace,
    base_sequence_limit,
    collapse_isometry,
    complete,
    kahn_extension_fixture,
    quotient_pmetric,
    refute_isometric_extension,
    seq_equivalent,
    zero_completion,
)
from pmetric.extension import asymmetric_completion_finite, attach_asymmetric_point, build_two_point_example
from pmetric.kahn import (
    ALL_WORDS,
    Alphabet,
    PeriodicStream,
    PrefixSequence,
    ProgramStream,
    Word,
    asymmetry_certificate,
    density_witness,
    kahn_distance,
    kahn_incompleteness_witness,
    power_of_half,
    self_distance,
    truncate,
)
from pmetric.search import (
    EXHAUSTED,
    P_CAUCHY_INCOMPLETE_FINITE,
    PROPER_SYMMETRICALLY_DENSE_SUBSET,
    SINGLE_COMPLETION_ONLY,
    GeneratorParams,
    classify_completions,
    random_pmetric,
    search_counterexample,
)
from pmetric.sequences import EventuallyPeriodicSeq, is_p_cauchy_complete_finite
from pmetric.space import (
    find_isometry,
    is_dense,
    is_symmetrically_dense,
    open_ball,
)

CORPUS = [random_pmetric(GeneratorParams(1 + seed % 6, seed)) for seed in range(500)]
SMALL = [s for s in CORPUS if s.n <= 5]
BIN = Alphabet.of("01")
EPSILONS = [power_of_half(k) for k in range(11)]


@pytest.fixture
def verdict(capsys):
    def record(number: int, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"

    return record


def _first(problems: list) -> str:
    return f"first problems: {problems[:3]}" if problems else ""


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def test_criterion_01_two_completions(verdict):
    (report, code), elapsed = _timed(lambda: run(["repro", "--only", "two-completions"]))
    text = report.render(code)
    x1, y2, emb = build_two_point_example()
    ok = (
        code == 0
        and "fixture two-completions: pass" in text
        and x1.is_valid and y2.is_valid
        and is_p_cauchy_complete_finite(x1, literal=True).complete
        and is_p_cauchy_complete_finite(y2, literal=True).complete
        and emb.preserves(x1, y2)
        and is_dense(y2, emb.mapping).holds
        and find_isometry(x1, y2) is None
        and elapsed < 1
    )
    verdict(1, ok, f"{elapsed:.3f}s")


def test_criterion_02_not_symmetrically_dense(verdict):
    def check():
        _, y2, _ = build_two_point_example()
        r = is_symmetrically_dense(y2, ["a"])
        return not r.holds and y2.labels[r.failing] == "b" and 1 not in open_ball(y2, "a", Fraction(1, 2))

    ok, elapsed = _timed(check)
    verdict(2, ok and elapsed < 1, f"counterwitness b, {elapsed:.3f}s")


def test_criterion_03_extension_corpus(verdict):
    def check():
        failures, total = [], 0
        for seed, space in enumerate(CORPUS):
            for base in range(space.n):
                total += 1
                ext = attach_asymmetric_point(space, base)
                old = ext.old_points
                if not (
                    ext.space.is_valid
                    and ext.space.restrict(old) == space
                    and is_dense(ext.space, old).holds
                    and not is_symmetrically_dense(ext.space, old).holds
                ):
                    failures.append((seed, base))
        return failures, total

    (failures, total), elapsed = _timed(check)
    ok = not failures and len(CORPUS) >= 500 and max(s.n for s in CORPUS) == 6 and elapsed < 30
    verdict(3, ok, f"{len(CORPUS)} spaces, {total} extensions, {len(failures)} failures, {elapsed:.2f}s")


def test_criterion_04_asymmetric_completions(verdict):
    failures = []
    for i, space in enumerate(SMALL):
        for base in range(space.n):
            r = asymmetric_completion_finite(space, base)
            if not r.certificate.complete:
                failures.append((i, base))
    # literal prefix/cycle enumeration on a slice, as a cross-check of the support-set certificate
    literal_checked = 0
    for space in SMALL[:60]:
        ext = asymmetric_completion_finite(space, 0).space
        cert = is_p_cauchy_complete_finite(ext, literal=True, max_prefix=1, max_cycle=min(ext.n, 3))
        literal_checked += cert.sequences_checked
        if not cert.complete:
            failures.append(("literal", ext.labels))
    verdict(4, not failures, f"{len(SMALL)} spaces, {literal_checked} literal sequences, {len(failures)} failures")


def test_criterion_05_multiple_completions(verdict):
    x1, y2, _ = build_two_point_example()
    found = classify_completions(x1, 1, [0, 1])
    pairwise = all(a.n != b.n or find_isometry(a, b) is None for a, b in itertools.combinations(found, 2))
    has_both = x1 in found and any(find_isometry(s, y2) is not None for s in found)
    search = search_counterexample(SINGLE_COMPLETION_ONLY, 2, [0, 1, 2], extra_points=1)
    ok = len(found) >= 2 and pairwise and has_both and search.status == EXHAUSTED and search.witness is None
    verdict(5, ok, f"{len(found)} completions, search {search.status} after {search.states_explored} spaces")


def _kahn_streams() -> list:
    cycles = ["0", "1", "01", "10", "001", "011", "0001", "0110", "00111", "010011", "1011", "110", "0010", "111000", "01011"]
    periodic = [PeriodicStream(c) for c in cycles] + [PeriodicStream("0", "1")]
    programs = [ProgramStream(n) for n in ("thue-morse", "fibonacci", "champernowne", "alternate-blocks")]
    return periodic + programs


def test_criterion_06_kahn_example(verdict):
    def check():
        problems = []
        truncations = 0
        for symbols in ("0", "01", "012"):
            sigma = Alphabet.of(symbols)
            for depth in range(7):
                truncations += 1
                if not truncate(sigma, depth).is_valid:
                    problems.append(f"truncate {symbols} {depth}")
        streams = _kahn_streams()
        assert len(streams) == 20
        for s in streams:
            for eps in EPSILONS:
                w = density_witness(BIN, ALL_WORDS, s, eps)
                y = w.symmetric_witness
                # recheck both ball memberships exactly from the distance formula
                if y is None or not (
                    kahn_distance(s, y) < self_distance(s) + eps and kahn_distance(y, s) < self_distance(y) + eps
                ):
                    problems.append(f"witness {s} {eps}")
        cert = asymmetry_certificate(BIN, Fraction(1, 2), 10)
        if not (cert.holds and cert.words_checked == BIN.count_words(10, 1)):
            problems.append("asymmetry")
        if not kahn_incompleteness_witness(BIN).no_word_limit:
            problems.append("incompleteness")
        return problems, truncations

    (problems, truncations), elapsed = _timed(check)
    verdict(6, not problems and elapsed < 10, f"{truncations} truncations, 20 streams x 11 radii, {elapsed:.2f}s {_first(problems)}")


def _finite_models(rng: random.Random, space, count: int):
    n = space.n
    out = []
    for _ in range(count):
        x = rng.randrange(n)
        prefix = tuple(rng.randrange(n) for _ in range(rng.randrange(3)))
        out.append(EventuallyPeriodicSeq(prefix, (x,) * rng.randint(1, 2)))
    return out


def _kahn_models(rng: random.Random, count: int):
    targets = [PeriodicStream("0"), PeriodicStream("01"), PeriodicStream("1", "0"), Word("01"), Word("")]
    return [PrefixSequence(rng.choice(targets), rng.randint(1, 3), rng.randint(0, 3)) for _ in range(count)]


def test_criterion_07_quotient_claims(verdict):
    rng = random.Random(7)
    problems = []
    triples = 0
    kahn = PresentedSpace.kahn_words(BIN)
    for space in SMALL[:40]:
        pres = PresentedSpace.finite(space)
        for _ in range(3):
            a, b, c = _finite_models(rng, space, 3)
            triples += 1
            problems += _laws(pres, a, b, c)
    for _ in range(60):
        a, b, c = _kahn_models(rng, 3)
        triples += 1
        problems += _laws(kahn, a, b, c)

    # representative independence: three alternates per class
    comp = complete(kahn, [PeriodicStream("0"), PeriodicStream("01"), Word("1"), Word("")])
    classes = comp.classes
    for cls in classes:
        alternates = [PrefixSequence(cls.representative.target, s, o) for s, o in ((1, 0), (2, 1), (3, 2))]
        for other in classes:
            base = quotient_pmetric(kahn, cls, other)
            for alt in alternates:
                if comp.class_of(alt) is not cls:
                    problems.append(f"class of {alt}")
                if kahn_distance(alt.target, other.representative.target) != base:
                    problems.append(f"distance {alt}")
    fragments = [comp.materialize()]
    for space in SMALL[:40]:
        fin = complete(PresentedSpace.finite(space))
        fragments.append(fin.materialize())
        if not fin.verify(EPSILONS).ok:
            problems.append("finite density")
    bad_fragments = sum(not f.is_valid for f in fragments)
    report = comp.verify(EPSILONS, base_points=[Word(w) for w in BIN.words(3)])
    ok = not problems and not bad_fragments and report.ok and triples >= 100
    verdict(7, ok, f"{triples} triples, {len(fragments)} fragments {_first(problems)}")


def _laws(pres, a, b, c) -> list[str]:
    eq = lambda x, y: seq_equivalent(pres, x, y)
    problems = []
    if not (eq(a, a) and eq(b, b) and eq(c, c)):
        problems.append("reflexivity")
    if eq(a, b) != eq(b, a):
        problems.append("symmetry")
    if eq(a, b) and eq(b, c) and not eq(a, c):
        problems.append("transitivity")
    return problems


def test_criterion_08_finite_collapse(verdict):
    failures = [i for i, s in enumerate(SMALL) if collapse_isometry(complete(PresentedSpace.finite(s))) is None]
    verdict(8, not failures, f"{len(SMALL)} spaces, {len(failures)} failures")


def test_criterion_09_no_isometric_extension(verdict):
    x1, y2, _ = build_two_point_example()
    small = refute_isometric_extension([0], y2, x1, extra="b")
    space, images, target = kahn_extension_fixture(BIN, 4)
    kahn = refute_isometric_extension(images, space, target, depth=10, extra=0)
    control = refute_isometric_extension([0], y2, y2, extra="b")
    ok = (
        small is not None and small.status == GLOBAL
        and kahn is not None and kahn.status == GLOBAL and kahn.required_self_distance == 1
        and control is None
    )
    verdict(9, ok, f"small {small and small.status}, kahn {kahn and kahn.status}, control {control}")


def test_criterion_10_impossibility_sweeps(verdict):
    def check():
        grid = [0, Fraction(1, 2), 1]
        return [search_counterexample(p, 3, grid) for p in (PROPER_SYMMETRICALLY_DENSE_SUBSET, P_CAUCHY_INCOMPLETE_FINITE)]

    results, elapsed = _timed(check)
    ok = all(r.status == EXHAUSTED and r.witness is None for r in results) and elapsed < 60
    verdict(10, ok, f"states {[r.states_explored for r in results]}, {elapsed:.2f}s")


def test_criterion_11_zero_completion(verdict):
    problems = []
    for i, space in enumerate(SMALL):
        zc = zero_completion(PresentedSpace.finite(space))
        if find_isometry(space, zc.materialize()) is None:
            problems.append(f"collapse {i}")
    kahn = PresentedSpace.kahn_words(BIN)
    streams = _kahn_streams()[:10]
    zc = zero_completion(kahn, streams)
    comp = zc.completion
    registered = len(zc.classes)
    stream_cls = comp.class_of(PrefixSequence(PeriodicStream("0")))
    word_cls = comp.embed(Word("01"))
    if not (zc.contains(stream_cls) and zc.contains(word_cls)):
        problems.append("membership")
    for cls in zc.classes:
        for eps in EPSILONS:
            if comp.symmetric_density_witness(cls, eps) is None:
                problems.append(f"density {cls.label} {eps}")
    # ten 0-Cauchy word sequences, each 0-converging to a member
    for s, schedule in zip(streams, itertools.cycle([(1, 0), (2, 1), (3, 0)])):
        check = base_sequence_limit(comp, PrefixSequence(s, *schedule))
        if not (check.zero_converges and zc.contains(check.limit)):
            problems.append(f"limit {s}")
    verdict(11, not problems, f"{len(SMALL)} finite collapses, {registered} Kahn query classes {_first(problems)}")

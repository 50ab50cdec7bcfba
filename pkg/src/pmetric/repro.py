"""Replayable fixture suite: every worked example, rechecked from scratch."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .completion import (
    GLOBAL,
    PresentedSpace,
    collapse_isometry,
    complete,
    kahn_extension_fixture,
    refute_isometric_extension,
    seq_equivalent,
    zero_completion,
)
from .errors import MalformedInputError
from .extension import attach_asymmetric_point, build_two_point_example
from .kahn import (
    ALL_WORDS,
    Alphabet,
    PeriodicStream,
    PrefixSequence,
    Word,
    asymmetry_certificate,
    density_witness,
    kahn_incompleteness_witness,
    kahn_pmetric,
    truncate,
)
from .search import GeneratorParams, classify_completions, random_pmetric
from .sequences import is_p_cauchy_complete_finite
from .space import (
    BIJECTION,
    EMBEDDING,
    find_isometry,
    is_dense,
    is_symmetrically_dense,
    open_ball,
)


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    detail: str = ""


def _two_completions() -> tuple[bool, str]:
    x1, y2, emb = build_two_point_example()
    checks = {
        "axioms": x1.is_valid and y2.is_valid,
        "complete": bool(is_p_cauchy_complete_finite(x1, literal=True))
        and bool(is_p_cauchy_complete_finite(y2, literal=True)),
        "embedding": emb.preserves(x1, y2) and find_isometry(x1, y2, EMBEDDING) == emb,
        "dense": is_dense(y2, emb.mapping).holds,
        "no-bijection": find_isometry(x1, y2, BIJECTION) is None,
    }
    return all(checks.values()), " ".join(f"{k}={v}" for k, v in checks.items())


def _asymmetric_completion() -> tuple[bool, str]:
    _, y2, _ = build_two_point_example()
    result = is_symmetrically_dense(y2, ["a"])
    outside = 1 not in open_ball(y2, 0, Fraction(1, 2))
    return (not result.holds and result.failing == 1 and outside), f"counterwitness={y2.labels[result.failing]}"


def _extension_corpus(count: int = 500) -> tuple[bool, str]:
    checked = 0
    for seed in range(count):
        space = random_pmetric(GeneratorParams(1 + seed % 6, seed))
        for base in range(space.n):
            ext = attach_asymmetric_point(space, base)
            old = ext.old_points
            if not (
                ext.space.is_valid
                and ext.space.restrict(old) == space
                and is_dense(ext.space, old).holds
                and not is_symmetrically_dense(ext.space, old).holds
            ):
                return False, f"seed {seed} base {base}"
            checked += 1
    return True, f"{checked} extensions"


def _multiple_completions() -> tuple[bool, str]:
    x1, y2, _ = build_two_point_example()
    found = classify_completions(x1, 1, [0, 1])
    ok = len(found) >= 2 and x1 in found and any(find_isometry(s, y2) for s in found)
    return ok, f"{len(found)} completions"


def _kahn_facts() -> tuple[bool, str]:
    sigma = Alphabet.of("01")
    ok = truncate(sigma, 4).is_valid
    ok &= kahn_pmetric(Word("ab"), Word("ac"), 0) == Fraction(1, 2)
    w = density_witness(sigma, ALL_WORDS, PeriodicStream("0"), Fraction(1, 4))
    ok &= w.symmetric_witness == Word("000")
    ok &= asymmetry_certificate(sigma, Fraction(1, 2), 10).holds
    ok &= kahn_incompleteness_witness(sigma).no_word_limit
    return ok, ""


def _quotient_claims() -> tuple[bool, str]:
    sigma = Alphabet.of("01")
    presented = PresentedSpace.kahn_words(sigma)
    zero = PeriodicStream("0")
    ok = seq_equivalent(presented, PrefixSequence(zero, 1, 0), PrefixSequence(zero, 2, 0))
    comp = complete(presented, [zero])
    cls = comp.class_of(PrefixSequence(zero))
    ok &= cls.self_distance == 0
    ok &= comp.distance(cls, comp.embed(Word("000"))) == Fraction(1, 8)
    ok &= comp.verify(base_points=[Word(""), Word("0"), Word("01")]).ok
    _, y2, _ = build_two_point_example()
    finite = complete(PresentedSpace.finite(y2))
    ok &= collapse_isometry(finite) is not None and finite.verify().ok
    zc = zero_completion(presented, [zero])
    ok &= zc.contains(cls) and zc.contains(comp.embed(Word("01")))
    return ok, ""


def _no_extension() -> tuple[bool, str]:
    x1, y2, _ = build_two_point_example()
    small = refute_isometric_extension([0], y2, x1, extra="b")
    control = refute_isometric_extension([0], y2, y2, extra="b")
    space, images, target = kahn_extension_fixture(Alphabet.of("01"), 4)
    kahn = refute_isometric_extension(images, space, target, depth=10, extra=0)
    ok = small is not None and small.status == GLOBAL and control is None
    ok &= kahn is not None and kahn.status == GLOBAL
    return ok, ""


FIXTURES: dict[str, Callable[[], tuple[bool, str]]] = {
    "two-completions": _two_completions,
    "asymmetric-completion": _asymmetric_completion,
    "extension-corpus": _extension_corpus,
    "multiple-completions": _multiple_completions,
    "kahn-example": _kahn_facts,
    "quotient-claims": _quotient_claims,
    "no-isometric-extension": _no_extension,
}


def run_fixtures(only: list[str] | None = None) -> list[FixtureResult]:
    unknown = set(only or ()) - FIXTURES.keys()
    if unknown:
        raise MalformedInputError(f"unknown fixture(s): {', '.join(sorted(unknown))}")
    results = []
    for name, check in FIXTURES.items():
        if only and name not in only:
            continue
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a regression, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(FixtureResult(name, bool(ok), detail))
    return results

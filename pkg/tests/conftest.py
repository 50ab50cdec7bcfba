from __future__ import annotations

import pytest

from pmetric.extension import one_point_space, two_point_space
from pmetric.search import GeneratorParams, random_pmetric


@pytest.fixture
def x1():
    return one_point_space()


@pytest.fixture
def y2():
    return two_point_space()


def corpus(count: int, max_n: int = 6, offset: int = 0):
    """Seeded random spaces with sizes cycling through 1..max_n."""
    return [random_pmetric(GeneratorParams(1 + seed % max_n, seed + offset)) for seed in range(count)]

from fractions import Fraction

import pytest

from selfdetermined import CommunityParams, RankedSystem, WeightedSystem
from selfdetermined.generators import gen_overlap_pair
from selfdetermined.multifacet import FacetedSystem

TWO_PAIRS_RANKINGS = [[0, 1, 2, 3], [1, 0, 2, 3], [2, 3, 0, 1], [3, 2, 0, 1]]


@pytest.fixture
def two_pairs():
    return RankedSystem(TWO_PAIRS_RANKINGS)


@pytest.fixture
def overlap16():
    system, planted = gen_overlap_pair(16)
    return system, [members for members, _ in planted]


@pytest.fixture
def tri_weighted():
    dense = [[0, 1, Fraction(1, 5)], [1, 0, Fraction(1, 5)], [Fraction(1, 2), Fraction(1, 2), 0]]
    return WeightedSystem(3, dense)


@pytest.fixture
def two_pairs_faceted():
    return FacetedSystem([[row, row[::-1]] for row in TWO_PAIRS_RANKINGS])


@pytest.fixture
def half():
    return CommunityParams(1, 1, Fraction(1, 2))


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion and return the verdict."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])

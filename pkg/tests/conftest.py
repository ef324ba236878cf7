import itertools
import math
import sys
from collections import Counter
from fractions import Fraction

import pytest


def brute_force_walk_law(d, N, n):
    """Law of the first n suits over all N! orderings of the deck."""
    suits = 2 * d
    tally = Counter()
    for perm in itertools.permutations(range(1, N + 1)):
        tally[tuple(card % suits for card in perm[:n])] += 1
    total = math.factorial(N)
    return {omega: Fraction(k, total) for omega, k in tally.items()}


def brute_force_tv(d, N, n):
    law = brute_force_walk_law(d, N, n)
    uniform = Fraction(1, (2 * d) ** n)
    return sum((max(law.get(omega, 0) - uniform, 0) for omega in itertools.product(range(2 * d), repeat=n)), Fraction(0))


def brute_force_count_law(d, N, n):
    out = Counter()
    for omega, p in brute_force_walk_law(d, N, n).items():
        out[tuple(omega.count(s) for s in range(2 * d))] += p
    return dict(out)


@pytest.fixture(scope="session")
def four_card_counts():
    return brute_force_count_law(1, 4, 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)

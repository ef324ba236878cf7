import itertools
import math
from fractions import Fraction

import pytest

from deckwalk.combinatorics import LOG_ZERO, enumerate_compositions
from deckwalk.errors import CapacityError, DomainError
from deckwalk.exact_tv import (
    DeckSpec,
    TVEstimate,
    delta_localization_check,
    f_asymptotic,
    hypergeom_log_pmf,
    hypergeom_pmf_exact,
    multinomial_log_pmf,
    multinomial_pmf_exact,
    radon_nikodym_f,
    radon_nikodym_f_exact,
    rescale,
    tv_by_pmf_difference,
    tv_exact,
)
from deckwalk.profile import profile_d1_closed, radius

from conftest import brute_force_count_law, brute_force_tv

DECK4 = DeckSpec(1, 2)


def test_deckspec():
    deck = DeckSpec.from_cards(2, 52)
    assert (deck.d, deck.per_suit, deck.N, deck.suits) == (2, 13, 52, 4)
    with pytest.raises(DomainError):
        DeckSpec.from_cards(2, 50)
    with pytest.raises(DomainError):
        DeckSpec(0, 3)


def test_tvestimate_invariants():
    with pytest.raises(DomainError):
        TVEstimate(1.5, "log-float", 0.0)
    with pytest.raises(DomainError):
        TVEstimate(0.5, "exact-rational", 0.0)
    with pytest.raises(DomainError):
        TVEstimate(0.5, "log-float", "exact")


def test_hypergeom_against_brute_force(four_card_counts):
    assert four_card_counts == {(1, 1): Fraction(2, 3), (2, 0): Fraction(1, 6), (0, 2): Fraction(1, 6)}
    assert hypergeom_log_pmf((1, 1), DECK4, 2) == pytest.approx(math.log(2 / 3), abs=1e-15)
    assert hypergeom_log_pmf((2, 0), DECK4, 2) == pytest.approx(math.log(1 / 6), abs=1e-15)
    for lam, p in four_card_counts.items():
        assert hypergeom_pmf_exact(lam, DECK4, 2) == p


def test_hypergeom_infeasible_and_domain():
    assert hypergeom_log_pmf((3, 1), DECK4, 4) == LOG_ZERO
    with pytest.raises(DomainError):
        hypergeom_log_pmf((3, 2), DECK4, 5)


@pytest.mark.parametrize("d,N,n", [(1, 6, 3), (2, 8, 3), (1, 8, 5)])
def test_hypergeom_brute_force_larger(d, N, n):
    deck = DeckSpec.from_cards(d, N)
    law = brute_force_count_law(d, N, n)
    for lam in enumerate_compositions(n, 2 * d):
        assert hypergeom_pmf_exact(lam, deck, n) == law.get(lam, 0)


def test_multinomial_pmf_examples():
    assert multinomial_log_pmf((1, 1), 2, 2) == pytest.approx(math.log(0.5), abs=1e-15)
    assert multinomial_log_pmf((2, 0), 2, 2) == pytest.approx(math.log(0.25), abs=1e-15)
    total = math.fsum(math.exp(multinomial_log_pmf(lam, 5, 4)) for lam in enumerate_compositions(5, 4))
    assert total == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        multinomial_log_pmf((1, 1, 0), 2, 2)


NORMALIZATION_CASES = [
    (d, K, n) for d in (1, 2, 3) for K in (1, 4, 10) for n in (1, 6, 13, 20) if n <= 2 * d * K
]


@pytest.mark.parametrize("d,K,n", NORMALIZATION_CASES)
def test_normalization(d, K, n):
    deck = DeckSpec(d, K)
    lams = list(enumerate_compositions(n, 2 * d))
    assert sum(hypergeom_pmf_exact(lam, deck, n) for lam in lams) == 1
    assert sum(multinomial_pmf_exact(lam, n, 2 * d) for lam in lams) == 1
    h = math.fsum(math.exp(hypergeom_log_pmf(lam, deck, n)) for lam in lams)
    b = math.fsum(math.exp(multinomial_log_pmf(lam, n, 2 * d)) for lam in lams)
    assert abs(h - 1) <= 1e-9 and abs(b - 1) <= 1e-9


def test_radon_nikodym_examples():
    assert radon_nikodym_f((1, 1), 4, 2) == pytest.approx(math.log(4 / 3), abs=1e-15)
    assert radon_nikodym_f((2, 0), 4, 2) == pytest.approx(math.log(2 / 3), abs=1e-15)
    for N in (2, 8, 52):
        assert radon_nikodym_f((1, 0), N, 1) == pytest.approx(0.0, abs=1e-13)
        assert radon_nikodym_f_exact((0, 0, 1, 0), 2 * N, 1) == 1
    assert radon_nikodym_f((3, 0), 4, 3) == LOG_ZERO


def test_radon_nikodym_is_pmf_ratio():
    deck = DeckSpec(2, 5)
    for lam in enumerate_compositions(6, 4):
        want = hypergeom_log_pmf(lam, deck, 6) - multinomial_log_pmf(lam, 6, 4)
        got = radon_nikodym_f(lam, deck.N, 6)
        if want == LOG_ZERO:
            assert got == LOG_ZERO
        else:
            assert got == pytest.approx(want, abs=1e-12)


def _moves(lam):
    for i, j in itertools.permutations(range(len(lam)), 2):
        if lam[i] < lam[j]:
            moved = list(lam)
            moved[i] += 1
            moved[j] -= 1
            yield tuple(moved)


@pytest.mark.parametrize("d,n_max", [(1, 12), (2, 8)])
def test_f_monotone_towards_balance(d, n_max):
    for n in range(1, n_max + 1):
        for N in {2 * d * math.ceil(n / (2 * d)), 2 * n * d, 4 * n * d}:
            for lam in enumerate_compositions(n, 2 * d):
                base = radon_nikodym_f_exact(lam, N, n)
                for moved in _moves(lam):
                    assert base <= radon_nikodym_f_exact(moved, N, n)


def test_f_asymptotic_examples():
    assert f_asymptotic((0.0, 0.0), 2, 1) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert f_asymptotic((0.0,) * 4, 4, 2) == pytest.approx((4 / 3) ** 1.5, rel=1e-15)
    assert f_asymptotic((0.0,) * 4, 4, 2) == pytest.approx(1.5396, abs=1e-4)
    with pytest.raises(DomainError):
        f_asymptotic((1.0, 0.0), 2, 1)


def test_f_asymptotic_ratio_tends_to_one():
    devs = []
    for n in (100, 400, 2500):
        root = math.isqrt(n)
        lam = ((n + 2 * root) // 2, (n - 2 * root) // 2)
        devs.append(abs(math.exp(radon_nikodym_f(lam, 2 * n, n)) / f_asymptotic((2.0, -2.0), 2, 1) - 1))
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] < 1e-3


def test_tv_four_card_deck():
    est = tv_exact(DECK4, 2, mode="exact-rational")
    assert est.exact == Fraction(1, 6)
    assert est.exact == brute_force_tv(1, 4, 2)
    assert est.error_bound == "exact"


@pytest.mark.parametrize("d,N", [(1, 6), (1, 8), (2, 4), (2, 8)])
def test_tv_matches_permutation_brute_force(d, N):
    deck = DeckSpec.from_cards(d, N)
    for n in range(1, min(N, 4) + 1):
        assert tv_exact(deck, n, mode="exact-rational").exact == brute_force_tv(d, N, n)


@pytest.mark.parametrize("K", [1, 2, 7, 26])
def test_tv_single_step_is_zero(K):
    deck = DeckSpec(1, K)
    assert tv_exact(deck, 1, mode="rational").exact == 0
    assert tv_exact(deck, 1).value == 0.0


def test_tv_52_card_deck_half():
    deck = DeckSpec(1, 26)
    rational = tv_exact(deck, 26, mode="exact-rational")
    approx = tv_exact(deck, 26, mode="log-float")
    assert rational.exact == Fraction(619267250471412005, 3823590232386699264)
    assert abs(rational.value - approx.value) <= 1e-9
    assert abs(rational.value - profile_d1_closed(2)) < 0.2


@pytest.mark.parametrize("d,N", [(1, 8), (1, 12), (2, 8), (2, 12), (3, 12)])
def test_tv_truncation_symmetry_and_orbit_reduction(d, N):
    deck = DeckSpec.from_cards(d, N)
    for n in range(1, min(N, 8) + 1):
        assert tv_exact(deck, n, mode="exact-rational").exact == tv_by_pmf_difference(deck, n)


def test_tv_monotone_in_n():
    cases = [(1, N) for N in range(2, 21, 2)] + [(2, N) for N in range(4, 17, 4)]
    for d, N in cases:
        deck = DeckSpec.from_cards(d, N)
        vals = [tv_exact(deck, n, mode="exact-rational").exact for n in range(1, N + 1)]
        assert all(a <= b for a, b in zip(vals, vals[1:])), (d, N)


@pytest.mark.parametrize("d,K,n", [(1, 10, 7), (1, 26, 26), (2, 6, 15), (2, 20, 40), (3, 4, 12)])
def test_mode_agreement(d, K, n):
    deck = DeckSpec(d, K)
    a = tv_exact(deck, n, mode="exact-rational")
    b = tv_exact(deck, n, mode="log-float")
    assert abs(a.value - b.value) <= 1e-8
    assert abs(a.value - b.value) <= b.error_bound + 1e-15


def test_tv_domain_and_capacity():
    with pytest.raises(DomainError):
        tv_exact(DECK4, 5)
    with pytest.raises(DomainError):
        tv_exact(DECK4, 0)
    with pytest.raises(DomainError):
        tv_exact(DECK4, 2, mode="bogus")
    with pytest.raises(CapacityError):
        tv_exact(DeckSpec(3, 40), 40, mode="exact-rational")


def test_parallel_reduction_matches_serial():
    deck = DeckSpec(3, 10)
    serial = tv_exact(deck, 30, mode="log-float")
    parallel = tv_exact(deck, 30, mode="log-float", workers=3)
    assert parallel.value == pytest.approx(serial.value, abs=1e-14)


def test_localization_single_step():
    rep = delta_localization_check(DeckSpec(1, 1), 1, 2.0)
    assert rep.members == 2  # both unit vectors, f == 1 exactly
    rep = delta_localization_check(DeckSpec(2, 3), 1, 12.0)
    assert rep.members == 4


def test_localization_d1_c2():
    r = radius(2, 1)
    small = delta_localization_check(DeckSpec(1, 100), 100, 2.0)
    large = delta_localization_check(DeckSpec(1, 400), 400, 2.0)
    for rep in (small, large):
        assert rep.within_bound
        assert rep.max_norm <= r
    # both maxima sit on the same rescaled lattice point a = 0.8
    assert small.max_norm == pytest.approx(0.8 * math.sqrt(2), abs=1e-12)
    assert large.max_norm == pytest.approx(0.8 * math.sqrt(2), abs=1e-12)
    assert abs(large.slack) <= abs(small.slack) + 1e-12


def test_localization_rejects_mismatched_deck():
    with pytest.raises(DomainError):
        delta_localization_check(DeckSpec(1, 100), 100, 3.0)


def test_rescale():
    assert rescale((60, 40), 100) == pytest.approx((2.0, -2.0))

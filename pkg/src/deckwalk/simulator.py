"""Deck-driven walk simulation and Monte-Carlo estimates of the distance.

Random streams come from numpy's PCG64 bit generator; every output records
``RNG_ALGORITHM`` so runs can be reproduced.  Cards are labelled 1..N and
card ``j`` has suit ``j mod 2d``.  Suit ``2i`` steps along ``+e_{i+1}`` and
suit ``2i + 1`` along ``-e_{i+1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .combinatorics import enumerate_compositions, log_multinomial
from .errors import DomainError
from .exact_tv import DeckSpec, TVEstimate, hypergeom_log_pmf

RNG_ALGORITHM = "PCG64"
CHI2_ALPHA = 1e-3
_BATCH = 100_000


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Generator for ``seed``; ``stream`` selects an independent child stream."""
    seq = np.random.SeedSequence(seed)
    if stream is not None:
        seq = seq.spawn(stream + 1)[stream]
    return np.random.Generator(np.random.PCG64(seq))


def fisher_yates(rng: np.random.Generator, N: int, count: int = 1, prefix: int | None = None) -> np.ndarray:
    """Shuffle ``count`` fresh decks of cards 1..N, one per row.

    Forward Fisher-Yates: position ``i`` swaps with a uniform position in
    ``[i, N)``.  With ``prefix`` only the first ``prefix`` positions are
    settled, which already makes them a uniform draw without replacement.
    """
    if N < 1:
        raise DomainError(f"deck size must be positive, got {N}")
    stop = N - 1 if prefix is None else min(prefix, N - 1)
    decks = np.tile(np.arange(1, N + 1, dtype=np.int64), (count, 1))
    rows = np.arange(count)
    for i in range(stop):
        j = rng.integers(i, N, size=count)
        picked = decks[rows, j]
        decks[rows, j] = decks[:, i]
        decks[:, i] = picked
    return decks


@dataclass(frozen=True)
class Permutation:
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(1, len(self.order) + 1)):
            raise DomainError("order is not a permutation of 1..N")

    @property
    def N(self) -> int:
        return len(self.order)


def shuffle(N: int, seed: int) -> Permutation:
    deck = fisher_yates(make_rng(seed), N)[0]
    return Permutation(tuple(int(x) for x in deck))


def suit_of(card: int, d: int) -> int:
    if card < 1:
        raise DomainError(f"card labels start at 1, got {card}")
    return card % (2 * d)


def step_vector(suit: int, d: int) -> tuple[int, ...]:
    v = [0] * d
    v[suit // 2] = 1 if suit % 2 == 0 else -1
    return tuple(v)


@dataclass(frozen=True)
class Trajectory:
    suits: tuple[int, ...]
    positions: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.suits)

    def unit_steps(self) -> bool:
        return all(
            sum((a - b) ** 2 for a, b in zip(p, q)) == 1
            for p, q in zip(self.positions[1:], self.positions[:-1])
        )


def deal_walk(sigma: Permutation, n: int, d: int) -> Trajectory:
    if n < 0 or n > sigma.N:
        raise DomainError(f"cannot deal {n} cards from a deck of {sigma.N}")
    suits = tuple(suit_of(card, d) for card in sigma.order[:n])
    pos = [0] * d
    positions = [tuple(pos)]
    for s in suits:
        pos[s // 2] += 1 if s % 2 == 0 else -1
        positions.append(tuple(pos))
    return Trajectory(suits, tuple(positions))


def suit_counts(decks: np.ndarray, n: int, d: int) -> np.ndarray:
    """Per-row suit-count vectors of the first ``n`` cards."""
    suits = decks[:, :n] % (2 * d)
    return np.stack([(suits == s).sum(axis=1) for s in range(2 * d)], axis=1)


def _log_f_batch(lam: np.ndarray, deck: DeckSpec, n: int) -> np.ndarray:
    K = deck.per_suit
    rest = K - lam
    out = np.full(lam.shape[0], -np.inf)
    ok = (rest >= 0).all(axis=1)
    log_full = log_multinomial(deck.N, [K] * deck.suits)
    out[ok] = (
        n * math.log(deck.suits)
        + special.gammaln(deck.N - n + 1)
        - special.gammaln(rest[ok] + 1).sum(axis=1)
        - log_full
    )
    return out


def tv_monte_carlo(deck: DeckSpec, n: int, samples: int, seed: int) -> TVEstimate:
    """Estimate the distance as the multinomial mean of ``max(f - 1, 0)``.

    ``error_bound`` is three standard errors.
    """
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    if n < 1 or n > deck.N:
        raise DomainError(f"need 1 <= n <= N={deck.N}, got n={n}")
    rng = make_rng(seed)
    probs = np.full(deck.suits, 1.0 / deck.suits)
    total = 0.0
    total_sq = 0.0
    left = samples
    while left:
        size = min(left, _BATCH)
        lam = rng.multinomial(n, probs, size=size)
        excess = np.maximum(np.expm1(_log_f_batch(lam, deck, n)), 0.0)
        total += float(excess.sum())
        total_sq += float((excess * excess).sum())
        left -= size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    sem = math.sqrt(var / samples) if samples > 1 else math.inf
    return TVEstimate(min(max(mean, 0.0), 1.0), "monte-carlo", 3.0 * sem)


@dataclass(frozen=True)
class ChiSquareReport:
    statistic: float
    dof: int
    p_value: float
    alpha: float
    observed: dict
    expected: dict

    @property
    def passed(self) -> bool:
        return self.p_value >= self.alpha


def chi_square_report(observed: dict, probs: dict, samples: int, alpha: float = CHI2_ALPHA) -> ChiSquareReport:
    """Pearson goodness-of-fit, pooling cells with expected count below 5 into one."""
    keys = sorted(probs)
    exp = {k: probs[k] * samples for k in keys}
    big = [k for k in keys if exp[k] >= 5]
    small = [k for k in keys if exp[k] < 5]
    obs_v = [observed.get(k, 0) for k in big]
    exp_v = [exp[k] for k in big]
    if small:
        obs_v.append(sum(observed.get(k, 0) for k in small))
        exp_v.append(sum(exp[k] for k in small))
    obs_a, exp_a = np.asarray(obs_v, float), np.asarray(exp_v, float)
    dof = len(obs_v) - 1
    if dof < 1:
        return ChiSquareReport(0.0, 0, 1.0, alpha, dict(observed), exp)
    stat = float(((obs_a - exp_a) ** 2 / exp_a).sum())
    return ChiSquareReport(stat, dof, float(stats.chi2.sf(stat, dof)), alpha, dict(observed), exp)


def empirical_suitcount_check(deck: DeckSpec, n: int, samples: int, seed: int) -> ChiSquareReport:
    """Shuffle ``samples`` decks and test the first-``n`` suit counts against the hypergeometric law."""
    if n < 0 or n > deck.N:
        raise DomainError(f"need 0 <= n <= N={deck.N}, got n={n}")
    rng = make_rng(seed)
    tally: dict = {}
    left = samples
    while left:
        size = min(left, _BATCH)
        decks = fisher_yates(rng, deck.N, size, prefix=n)
        lam, counts = np.unique(suit_counts(decks, n, deck.d), axis=0, return_counts=True)
        for row, k in zip(lam, counts):
            key = tuple(int(x) for x in row)
            tally[key] = tally.get(key, 0) + int(k)
        left -= size
    probs = {}
    for lam in enumerate_compositions(n, deck.suits):
        lp = hypergeom_log_pmf(lam, deck, n)
        if lp > -math.inf:
            probs[lam] = math.exp(lp)
    return chi_square_report(tally, probs, samples)


def simulate_walks(deck: DeckSpec, n: int, samples: int, seed: int) -> list[Trajectory]:
    rng = make_rng(seed)
    decks = fisher_yates(rng, deck.N, samples, prefix=n)
    return [deal_walk(Permutation(tuple(int(x) for x in row)), n, deck.d) for row in decks]

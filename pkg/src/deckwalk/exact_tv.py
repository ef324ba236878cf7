"""Total variation distance between a dealt-deck walk and the simple random walk.

The suit counts of the first ``n`` cards of a shuffled deck follow a
multivariate hypergeometric law, while ``n`` steps of the walk give
multinomial counts with uniform cell probabilities.  Both laws assign the
same probability to every walk path with a given count vector, so the
distance between path laws reduces to the distance between count laws.
"""
from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .combinatorics import (
    LOG_ZERO,
    ZERO_SUM_TOL,
    count_compositions,
    enumerate_compositions,
    enumerate_partitions_with_orbit,
    log_multinomial,
    multinomial_exact,
)
from .errors import CapacityError, DomainError
from .profile import radius

EXACT_TERM_LIMIT = 10**6

METHODS = ("exact-rational", "log-float", "asymptotic-profile", "monte-carlo")
MODES = ("exact-rational", "log-float")
_MODE_ALIASES = {"rational": "exact-rational", "float": "log-float", "log": "log-float"}

# Below this many multisets a process pool costs more than it saves.
_PARALLEL_MIN_ITEMS = 5_000

# Near-tie threshold on log f below which f >= 1 is settled in integers.
_TIE_WINDOW = 1e-9


@dataclass(frozen=True)
class DeckSpec:
    """A deck of ``N = 2 d K`` cards split evenly over ``2d`` suits."""

    d: int
    per_suit: int

    def __post_init__(self):
        if self.d < 1 or self.per_suit < 1:
            raise DomainError(f"need d >= 1 and K >= 1, got d={self.d}, K={self.per_suit}")

    @property
    def suits(self) -> int:
        return 2 * self.d

    @property
    def N(self) -> int:
        return 2 * self.d * self.per_suit

    @classmethod
    def from_cards(cls, d: int, N: int) -> "DeckSpec":
        if d < 1:
            raise DomainError(f"d must be positive, got {d}")
        if N < 1 or N % (2 * d):
            raise DomainError(f"N={N} is not a positive multiple of 2d={2 * d}")
        return cls(d, N // (2 * d))


@dataclass(frozen=True)
class TVEstimate:
    value: float
    method: str
    error_bound: float | str
    exact: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"distance {self.value} outside [0, 1]")
        if (self.method == "exact-rational") != (self.error_bound == "exact"):
            raise DomainError("error_bound 'exact' is reserved for exact-rational results")


def _normalize_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def _check_lambda(lam: Sequence[int], suits: int, n: int) -> None:
    if len(lam) != suits:
        raise DomainError(f"expected {suits} suit counts, got {len(lam)}")
    if any(x < 0 for x in lam) or sum(lam) != n:
        raise DomainError(f"{tuple(lam)} is not a composition of n={n}")


def hypergeom_log_pmf(lam: Sequence[int], deck: DeckSpec, n: int) -> float:
    """Log-probability that the first ``n`` cards show suit counts ``lam``."""
    if n > deck.N:
        raise DomainError(f"cannot deal n={n} cards from a deck of {deck.N}")
    _check_lambda(lam, deck.suits, n)
    K = deck.per_suit
    if max(lam) > K:
        return LOG_ZERO
    return (
        log_multinomial(deck.N - n, [K - x for x in lam])
        + log_multinomial(n, lam)
        - log_multinomial(deck.N, [K] * deck.suits)
    )


def multinomial_log_pmf(lam: Sequence[int], n: int, suits: int) -> float:
    _check_lambda(lam, suits, n)
    return log_multinomial(n, lam) - n * math.log(suits)


def hypergeom_pmf_exact(lam: Sequence[int], deck: DeckSpec, n: int) -> Fraction:
    if n > deck.N:
        raise DomainError(f"cannot deal n={n} cards from a deck of {deck.N}")
    _check_lambda(lam, deck.suits, n)
    K = deck.per_suit
    if max(lam) > K:
        return Fraction(0)
    num = multinomial_exact(deck.N - n, [K - x for x in lam]) * multinomial_exact(n, lam)
    return Fraction(num, multinomial_exact(deck.N, [K] * deck.suits))


def multinomial_pmf_exact(lam: Sequence[int], n: int, suits: int) -> Fraction:
    _check_lambda(lam, suits, n)
    return Fraction(multinomial_exact(n, lam), suits**n)


def _deck_for(N: int, suits: int) -> DeckSpec:
    if suits % 2:
        raise DomainError(f"number of suits must be even, got {suits}")
    return DeckSpec.from_cards(suits // 2, N)


def radon_nikodym_f(lam: Sequence[int], N: int, n: int) -> float:
    """Log of the hypergeometric-to-multinomial likelihood ratio at ``lam``.

    The number of suits is ``len(lam)``; infeasible counts give ``LOG_ZERO``.
    """
    deck = _deck_for(N, len(lam))
    if n > N:
        raise DomainError(f"n={n} exceeds N={N}")
    _check_lambda(lam, deck.suits, n)
    K = deck.per_suit
    if max(lam) > K:
        return LOG_ZERO
    return (
        n * math.log(deck.suits)
        + log_multinomial(N - n, [K - x for x in lam])
        - log_multinomial(N, [K] * deck.suits)
    )


def radon_nikodym_f_exact(lam: Sequence[int], N: int, n: int) -> Fraction:
    deck = _deck_for(N, len(lam))
    _check_lambda(lam, deck.suits, n)
    K = deck.per_suit
    if n > N or max(lam) > K:
        return Fraction(0)
    return Fraction(
        deck.suits**n * multinomial_exact(N - n, [K - x for x in lam]),
        multinomial_exact(N, [K] * deck.suits),
    )


def f_asymptotic(a: Sequence[float], c: float, d: int) -> float:
    """Leading-order likelihood ratio at ``lam_i = (n + a_i sqrt(n)) / (2d)`` when ``N = c n``."""
    if len(a) != 2 * d:
        raise DomainError(f"expected {2 * d} displacements, got {len(a)}")
    if abs(math.fsum(a)) > ZERO_SUM_TOL:
        raise DomainError(f"displacements must sum to zero, got {math.fsum(a)!r}")
    if c <= 1:
        raise DomainError(f"c must exceed 1, got {c}")
    sq = math.fsum(x * x for x in a)
    return (c / (c - 1)) ** (d - 0.5) * math.exp(-sq / (4 * d * (c - 1)))


class _Kernel:
    """Per-deck constants reused across every term of the distance sum."""

    def __init__(self, deck: DeckSpec, n: int):
        self.deck = deck
        self.n = n
        self.K = deck.per_suit
        self.log_suits_n = n * math.log(deck.suits)
        self.log_full = log_multinomial(deck.N, [self.K] * deck.suits)
        self._full_exact = None

    def log_f(self, lam) -> float:
        K = self.K
        if max(lam) > K:
            return LOG_ZERO
        return self.log_suits_n + log_multinomial(self.deck.N - self.n, [K - x for x in lam]) - self.log_full

    def exact_excess(self, lam) -> Fraction:
        """``f(lam) - 1`` in exact arithmetic."""
        if self._full_exact is None:
            self._full_exact = multinomial_exact(self.deck.N, [self.K] * self.deck.suits)
        lhs = self.deck.suits**self.n * multinomial_exact(self.deck.N - self.n, [self.K - x for x in lam])
        return Fraction(lhs - self._full_exact, self._full_exact)

    def f_at_least_one(self, lam, lf: float) -> bool:
        if abs(lf) > _TIE_WINDOW:
            return lf > 0
        return self.exact_excess(lam) >= 0


def _float_chunk(deck: DeckSpec, n: int, chunk):
    kern = _Kernel(deck, n)
    terms = []
    for lam, orbit in chunk:
        lf = kern.log_f(lam)
        if lf <= -_TIE_WINDOW:
            continue
        if lf < _TIE_WINDOW:
            excess = kern.exact_excess(lam)
            if excess <= 0:
                continue
            log_excess = math.log(excess)
        else:
            log_excess = math.log(math.expm1(lf))
        log_pb = log_multinomial(n, lam) - kern.log_suits_n
        terms.append(math.exp(math.log(orbit) + log_pb + log_excess))
    return math.fsum(terms), len(terms)


def _rational_chunk(deck: DeckSpec, n: int, chunk) -> int:
    K = deck.per_suit
    full = multinomial_exact(deck.N, [K] * deck.suits)
    scale = deck.suits**n
    total = 0
    for lam, orbit in chunk:
        if max(lam) > K:
            continue
        excess = scale * multinomial_exact(deck.N - n, [K - x for x in lam]) - full
        if excess > 0:
            total += orbit * multinomial_exact(n, lam) * excess
    return total


def _run_chunks(fn, deck, n, items, workers):
    if workers <= 1 or len(items) < _PARALLEL_MIN_ITEMS:
        return [fn(deck, n, items)]
    size = -(-len(items) // workers)
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [deck] * len(chunks), [n] * len(chunks), chunks))


def tv_exact(deck: DeckSpec, n: int, mode: str = "log-float", workers: int = 1) -> TVEstimate:
    """Exact distance ``d_n(N)`` by summation over suit-count multisets.

    ``mode`` is ``"exact-rational"`` (arbitrary precision, limited to
    ``EXACT_TERM_LIMIT`` compositions) or ``"log-float"``.
    """
    mode = _normalize_mode(mode)
    if n < 1 or n > deck.N:
        raise DomainError(f"need 1 <= n <= N={deck.N}, got n={n}")
    n_terms = count_compositions(n, deck.suits)
    if mode == "exact-rational" and n_terms > EXACT_TERM_LIMIT:
        raise CapacityError(f"{n_terms} compositions exceed the exact-mode limit of {EXACT_TERM_LIMIT}")
    items = list(enumerate_partitions_with_orbit(n, deck.suits))

    if mode == "exact-rational":
        num = sum(_run_chunks(_rational_chunk, deck, n, items, workers))
        den = multinomial_exact(deck.N, [deck.per_suit] * deck.suits) * deck.suits**n
        frac = Fraction(num, den)
        return TVEstimate(float(frac), mode, "exact", exact=frac)

    parts = _run_chunks(_float_chunk, deck, n, items, workers)
    value = math.fsum(p[0] for p in parts)
    # log-gamma differences carry absolute error of a few ulps of log(N!)
    scale = 16 * sys.float_info.epsilon * (log_multinomial(deck.N, [deck.N]) + n + 1)
    bound = min(value * scale + n_terms * sys.float_info.epsilon, 1e-9 * n_terms)
    return TVEstimate(min(max(value, 0.0), 1.0), mode, bound)


def tv_by_pmf_difference(deck: DeckSpec, n: int) -> Fraction:
    """``sum_lam [P_H(lam) - P_B(lam)]^+`` over every composition, without symmetry reduction."""
    if n < 1 or n > deck.N:
        raise DomainError(f"need 1 <= n <= N={deck.N}, got n={n}")
    total = Fraction(0)
    for lam in enumerate_compositions(n, deck.suits):
        diff = hypergeom_pmf_exact(lam, deck, n) - multinomial_pmf_exact(lam, n, deck.suits)
        if diff > 0:
            total += diff
    return total


def rescale(lam: Sequence[int], n: int) -> tuple[float, ...]:
    """Map suit counts to centred coordinates ``2d lam_i / sqrt(n) - sqrt(n)``."""
    root = math.sqrt(n)
    s = len(lam)
    return tuple(s * x / root - root for x in lam)


@dataclass(frozen=True)
class LocalizationReport:
    n: int
    c: float
    members: int
    max_norm: float
    radius: float
    slack: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.max_norm <= self.bound


def delta_localization_check(deck: DeckSpec, n: int, c: float) -> LocalizationReport:
    """Largest rescaled norm among the count vectors where the likelihood ratio is >= 1."""
    if n < 1 or n > deck.N:
        raise DomainError(f"need 1 <= n <= N={deck.N}, got n={n}")
    if deck.N != round(c * n):
        raise DomainError(f"deck of {deck.N} cards does not match c*n = {c * n}")
    kern = _Kernel(deck, n)
    members = 0
    max_norm = 0.0
    for lam, orbit in enumerate_partitions_with_orbit(n, deck.suits):
        lf = kern.log_f(lam)
        if lf == LOG_ZERO or not kern.f_at_least_one(lam, lf):
            continue
        members += orbit
        max_norm = max(max_norm, math.hypot(*rescale(lam, n)))
    r = radius(c, deck.d)
    return LocalizationReport(n, c, members, max_norm, r, max_norm - r, r * (1 + 5 / math.sqrt(n)))

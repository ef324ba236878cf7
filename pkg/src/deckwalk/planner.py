"""Deck sizing: smallest deck for a step budget, or largest step budget for a deck."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .combinatorics import count_compositions
from .errors import DomainError
from .exact_tv import EXACT_TERM_LIMIT, DeckSpec, tv_exact
from .profile import profile

DECK_WINDOW = 5  # multiples of 2d scanned around the asymptotic deck size
STEP_WINDOW = 10  # steps scanned around the asymptotic step count
BRACKET = 1e-6
_DECK_CAP = 10**12


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")


def solve_c_for_epsilon(d: int, epsilon: float) -> float:
    """Smallest ratio c >= 2d whose limit profile is at most ``epsilon``.

    Bisection on the decreasing profile; the returned point always sits on
    the feasible side (``profile(c) <= epsilon``).
    """
    _check_epsilon(epsilon)
    lo = 2.0 * d
    if profile(lo, d) <= epsilon:
        return lo
    hi = 2.0 * lo
    while profile(hi, d) > epsilon:
        lo, hi = hi, 2.0 * hi
        if hi > 1e15:
            raise DomainError(f"epsilon={epsilon} is below the resolvable profile range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if profile(mid, d) > epsilon:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


@dataclass(frozen=True)
class PlanResult:
    c_star: float
    answer: int
    method: str
    achieved_value: float
    feasible: bool = True
    asymptotic_answer: int | None = None
    scanned: dict = field(default_factory=dict, compare=False)
    monotone_on_scan: bool | None = None


def _exact_ok(n: int, d: int) -> bool:
    return count_compositions(n, 2 * d) <= EXACT_TERM_LIMIT


def _tv(d: int, N: int, n: int, cache: dict) -> float:
    key = (N, n)
    if key not in cache:
        cache[key] = tv_exact(DeckSpec.from_cards(d, N), n, mode="log-float").value
    return cache[key]


def min_deck_for_threshold(d: int, n: int, epsilon: float, refine: bool = True) -> PlanResult:
    """Smallest deck (a multiple of 2d, at least ``n`` cards) keeping the distance within ``epsilon``.

    The asymptotic size is refined with exact distances: first a scan of
    ``DECK_WINDOW`` neighbours, then galloping and bisection if the answer
    lies further out.
    """
    _check_epsilon(epsilon)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    step = 2 * d
    c_star = solve_c_for_epsilon(d, epsilon)
    floor_deck = step * math.ceil(n / step)
    # tiny slack keeps exact products like 2.0 * 26 from rounding up a step
    N0 = max(floor_deck, step * math.ceil(c_star * n / step - 1e-9))
    if not (refine and _exact_ok(n, d)):
        return PlanResult(c_star, N0, "asymptotic", profile(max(N0 / n, c_star), d), asymptotic_answer=N0)

    cache: dict = {}

    def ok(N):
        return _tv(d, N, n, cache) <= epsilon

    # find lo < hi with lo infeasible (or below the smallest legal deck) and hi feasible
    stride = step
    if ok(N0):
        hi = N0
        lo = hi - stride
        while lo >= floor_deck and ok(lo):
            hi = lo
            if N0 - hi >= DECK_WINDOW * step:
                stride *= 2
            lo = hi - stride
        lo = max(lo, floor_deck - step)
    else:
        lo = N0
        hi = lo + stride
        while not ok(hi):
            lo = hi
            if hi - N0 >= DECK_WINDOW * step:
                stride *= 2
            hi = lo + stride
            if hi > _DECK_CAP:
                raise DomainError(f"no deck below {_DECK_CAP} cards reaches epsilon={epsilon}")
    while hi - lo > step:
        mid = lo + step * ((hi - lo) // step // 2)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    scanned = {N: v for (N, _), v in sorted(cache.items())}
    values = list(scanned.values())
    monotone = all(b <= a for a, b in zip(values, values[1:]))
    return PlanResult(c_star, hi, "exact-refined", scanned[hi], True, N0, scanned, monotone)


def max_steps_for_deck(d: int, N: int, epsilon: float, refine: bool = True) -> PlanResult:
    """Largest number of steps a deck of ``N`` cards supports within ``epsilon``."""
    _check_epsilon(epsilon)
    DeckSpec.from_cards(d, N)
    c_star = solve_c_for_epsilon(d, epsilon)
    n0 = min(N, max(1, math.floor(N / c_star + 1e-9)))
    asym = PlanResult(c_star, n0, "asymptotic", profile(max(N / n0, c_star), d), asymptotic_answer=n0)
    lo = max(1, n0 - STEP_WINDOW)
    hi = min(N, n0 + STEP_WINDOW)
    if not (refine and _exact_ok(hi, d)):
        return asym

    cache: dict = {}
    # d_1(N) = 0, so n = 1 is always feasible; widen the window until it brackets
    while lo > 1 and _tv(d, N, lo, cache) > epsilon:
        lo = max(1, lo - STEP_WINDOW)
    if _tv(d, N, lo, cache) > epsilon:
        return PlanResult(c_star, 0, "exact-refined", _tv(d, N, lo, cache), False, n0)
    while hi < N and _tv(d, N, hi, cache) <= epsilon:
        if not _exact_ok(min(N, hi + STEP_WINDOW), d):
            return asym
        hi = min(N, hi + STEP_WINDOW)
    if _tv(d, N, hi, cache) <= epsilon:
        lo = hi
    # invariant: tv(lo) <= epsilon < tv(hi) unless lo == hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _tv(d, N, mid, cache) <= epsilon:
            lo = mid
        else:
            hi = mid
    return PlanResult(
        c_star, lo, "exact-refined", _tv(d, N, lo, cache), True, n0, {k[1]: v for k, v in cache.items()}
    )

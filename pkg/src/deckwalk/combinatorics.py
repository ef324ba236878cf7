"""Factorials, multinomial coefficients and composition enumeration.

Log-scale quantities are plain floats; ``LOG_ZERO`` (negative infinity)
stands for the logarithm of an exact zero.
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Iterator, Sequence

from .errors import DomainError

LOG_ZERO = -math.inf

_EXACT_TABLE_MAX = 128
_LOG_FACT_TABLE = tuple(math.log(math.factorial(m)) for m in range(_EXACT_TABLE_MAX + 1))

# Sum-to-zero tolerance for real displacement vectors.
ZERO_SUM_TOL = 1e-9


def _check_composition(m: int, lam: Sequence[int]) -> None:
    if any(x < 0 for x in lam):
        raise DomainError(f"negative part in {tuple(lam)}")
    if sum(lam) != m:
        raise DomainError(f"parts {tuple(lam)} sum to {sum(lam)}, expected {m}")


def log_factorial(m: int) -> float:
    """Natural log of ``m!``.

    Values up to 128 come from a table built from exact integer factorials;
    larger arguments go through ``lgamma``.
    """
    if m < 0:
        raise DomainError(f"log_factorial undefined for m={m}")
    if m <= _EXACT_TABLE_MAX:
        return _LOG_FACT_TABLE[m]
    return math.lgamma(m + 1)


def multinomial_exact(m: int, lam: Sequence[int]) -> int:
    """Exact multinomial coefficient m! / prod(lam_i!)."""
    _check_composition(m, lam)
    # product of binomials keeps intermediates small
    out, rest = 1, m
    for part in lam:
        out *= math.comb(rest, part)
        rest -= part
    return out


def log_multinomial(m: int, lam: Sequence[int]) -> float:
    _check_composition(m, lam)
    return log_factorial(m) - sum(log_factorial(x) for x in lam)


def count_compositions(n: int, parts: int) -> int:
    """Number of weak compositions of ``n`` into ``parts`` parts."""
    return math.comb(n + parts - 1, parts - 1)


def enumerate_compositions(n: int, parts: int, start: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every weak composition of ``n`` into ``parts`` parts in lexicographic order.

    Iterative odometer; ``start`` resumes the stream at a given composition
    (inclusive), which lets callers split the range across workers.
    """
    if n < 0 or parts < 1:
        raise DomainError(f"need n >= 0 and parts >= 1, got n={n}, parts={parts}")
    if start is None:
        lam = [0] * parts
        lam[-1] = n
    else:
        _check_composition(n, start)
        if len(start) != parts:
            raise DomainError("start has the wrong number of parts")
        lam = list(start)
    while True:
        yield tuple(lam)
        # rightmost nonzero position, ignoring index 0
        p = parts - 1
        while p > 0 and lam[p] == 0:
            p -= 1
        if p == 0:
            return
        s = lam[p]
        lam[p] = 0
        lam[p - 1] += 1
        lam[-1] = s - 1


def orbit_size(lam: Sequence[int]) -> int:
    """Number of distinct orderings of the multiset ``lam``."""
    out = math.factorial(len(lam))
    for mult in Counter(lam).values():
        out //= math.factorial(mult)
    return out


def enumerate_partitions_with_orbit(n: int, parts: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(lam, orbit)`` for every multiset of ``parts`` non-negative integers summing to ``n``.

    ``lam`` is sorted in descending order and ``orbit`` counts its distinct
    permutations, so orbit-weighted sums reproduce sums over all compositions.
    Partitions come out in reverse lexicographic order.
    """
    if n < 0 or parts < 1:
        raise DomainError(f"need n >= 0 and parts >= 1, got n={n}, parts={parts}")
    # explicit stack of (prefix, remaining, cap)
    stack: list[tuple[tuple[int, ...], int, int]] = [((), n, n)]
    while stack:
        prefix, remaining, cap = stack.pop()
        slots = parts - len(prefix)
        if slots == 1:
            lam = prefix + (remaining,)
            yield lam, orbit_size(lam)
            continue
        # the remaining slots must hold `remaining` with each part <= first
        lo = -(-remaining // slots)
        hi = min(cap, remaining)
        for first in range(lo, hi + 1):
            stack.append((prefix + (first,), remaining - first, first))


def log_stirling(m: int) -> float:
    if m < 1:
        raise DomainError(f"Stirling approximation needs m >= 1, got {m}")
    return 0.5 * math.log(2.0 * math.pi * m) + m * (math.log(m) - 1.0)


def stirling_approx(m: int) -> float:
    """sqrt(2*pi*m) * (m/e)**m; overflows to ``inf`` past double range."""
    try:
        return math.exp(log_stirling(m))
    except OverflowError:
        return math.inf


def multinomial_asymptotic(m: int, a: Sequence[float]) -> float:
    """Leading-order log multinomial coefficient around the balanced composition.

    Estimates ``log_multinomial(m, lam)`` for ``lam_i = (m + a_i sqrt(m)) / (2d)``
    where ``len(a) == 2d``.
    """
    if len(a) % 2 or not a:
        raise DomainError("displacement vector must have an even, positive length")
    if abs(math.fsum(a)) > ZERO_SUM_TOL:
        raise DomainError(f"displacements must sum to zero, got {math.fsum(a)!r}")
    d = len(a) // 2
    root = math.sqrt(m)
    if any(m + x * root < -ZERO_SUM_TOL for x in a):
        raise DomainError("displacement produces a negative part")
    sq = math.fsum(x * x for x in a)
    return (
        0.5 * math.log(2.0)
        + d * math.log(d)
        + m * math.log(2 * d)
        - (d - 0.5) * math.log(math.pi)
        - (d - 0.5) * math.log(m)
        - sq / (4.0 * d)
    )

"""Gaussian limit profile of the deck-walk distance when ``N = c n``.

The profile is the integral of a radial density over the ball of radius
``r(c)`` intersected with the zero-sum hyperplane of R^{2d}.  Integration
uses Lebesgue measure on the first ``2d - 1`` coordinates (the last one is
minus their sum).  That chart measure equals the surface measure on the
hyperplane scaled by ``(2d)**-0.5``, which gives the radial reduction

    value = (2d)**-0.5 * |S^{2d-2}| * integral_0^r rho**(2d-2) G(rho) d rho.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import ConvergenceError, DomainError

QUAD_ABS_TOL = 1e-10
QUAD_MAX_SUBDIVISIONS = 100_000


def _log_ratio(c: float) -> float:
    # log(c / (c - 1)) without cancellation at large c
    return math.log1p(1.0 / (c - 1.0))


def radius(c: float, d: int) -> float:
    if c <= 1:
        raise DomainError(f"radius needs c > 1, got {c}")
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    return math.sqrt((4 * d * d - 2 * d) * (c - 1) * _log_ratio(c))


@dataclass(frozen=True)
class ProfileParams:
    c: float
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"d must be positive, got {self.d}")
        if not self.c > 1:
            raise DomainError(f"c must exceed 1, got {self.c}")

    @property
    def r(self) -> float:
        return radius(self.c, self.d)

    @property
    def in_hypothesis(self) -> bool:
        """Whether ``c >= 2d``, the range where the limit theorem applies."""
        return self.c >= 2 * self.d


@dataclass(frozen=True)
class ProfileValue:
    value: float
    quadrature_error: float = 0.0
    outside_hypothesis: bool = False


def erf(x: float) -> float:
    """Gauss error function (C library implementation, odd by construction)."""
    return math.erf(x)


def sphere_area(m: int) -> float:
    """Surface area of the unit ``m``-sphere in R^{m+1}."""
    if m < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {m}")
    # |S^m| = 2 pi / (m - 1) * |S^{m-2}|
    area = 2.0 if m % 2 == 0 else 2.0 * math.pi
    for k in range(m % 2 + 2, m + 1, 2):
        area *= 2.0 * math.pi / (k - 1)
    return area


def _prefactor(d: int) -> float:
    return math.pi ** (0.5 - d) * 2.0 ** (1.5 - 2 * d) * float(d) ** (1 - d)


def gaussian_profile_density(rho: float, params: ProfileParams) -> float:
    """Profile density at any point of the hyperplane with Euclidean norm ``rho``."""
    c, d = params.c, params.d
    r = params.r
    if rho < 0 or rho > r * (1 + 1e-12):
        raise DomainError(f"rho={rho} outside [0, r={r}]")
    rho = min(rho, r)
    lead = math.exp((d - 0.5) * _log_ratio(c) - c * rho * rho / (4 * d * (c - 1)))
    return _prefactor(d) * (lead - math.exp(-rho * rho / (4 * d)))


def profile_integral(params: ProfileParams) -> ProfileValue:
    """Integrate the profile density over the ball-hyperplane intersection by radial quadrature."""
    d = params.d
    r = params.r
    if not params.in_hypothesis:
        warnings.warn(f"c={params.c} < 2d={2 * d}: outside the range of the limit theorem", stacklevel=2)
    power = 2 * d - 2
    value, err = integrate.quad(
        lambda rho: rho**power * gaussian_profile_density(rho, params),
        0.0,
        r,
        epsabs=QUAD_ABS_TOL,
        epsrel=1e-13,
        limit=QUAD_MAX_SUBDIVISIONS,
    )
    scale = sphere_area(power) / math.sqrt(2 * d)
    value, err = value * scale, err * scale
    if err > QUAD_ABS_TOL:
        raise ConvergenceError(f"quadrature reached only {err:.3g}", achieved=err)
    return ProfileValue(min(max(value, 0.0), 1.0), err, not params.in_hypothesis)


def profile_d1_closed(c: float) -> float:
    """Limit profile for d = 1 as a difference of error functions; requires c >= 2."""
    if c < 2:
        raise DomainError(f"the d=1 profile needs c >= 2, got {c}")
    L = _log_ratio(c)
    return erf(math.sqrt(c * L / 2)) - erf(math.sqrt((c - 1) * L / 2))


def profile_d2_closed(c: float) -> float:
    """Limit profile for d = 2; requires c >= 4.

    Integrating rho**2 against each Gaussian leaves an error-function term
    and a boundary term at rho = r; the two Gaussians agree there, so the
    boundary terms combine into ``r exp(-r**2 / 8) / (c sqrt(2 pi))``.
    """
    if c < 4:
        raise DomainError(f"the d=2 profile needs c >= 4, got {c}")
    L = _log_ratio(c)
    r2 = 12 * (c - 1) * L
    boundary = math.sqrt(r2) * math.exp(-r2 / 8) / (c * math.sqrt(2 * math.pi))
    return erf(math.sqrt(3 * c * L / 2)) - erf(math.sqrt(3 * (c - 1) * L / 2)) + boundary


def profile_value(c: float, d: int, method: str = "auto") -> ProfileValue:
    """Profile at ``(c, d)``: closed form for d <= 2 under ``auto``, quadrature otherwise."""
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown profile method {method!r}")
    if method == "auto":
        method = "closed" if d in (1, 2) else "quadrature"
    if method == "closed":
        if d == 1:
            return ProfileValue(profile_d1_closed(c))
        if d == 2:
            return ProfileValue(profile_d2_closed(c))
        raise DomainError(f"no closed form for d={d}; use quadrature")
    return profile_integral(ProfileParams(c, d))


def profile(c: float, d: int) -> float:
    return profile_value(c, d).value

"""Exact and asymptotic analysis of random walks simulated with a shuffled deck."""

__version__ = "0.1.0"

from .combinatorics import (
    enumerate_compositions,
    enumerate_partitions_with_orbit,
    log_factorial,
    log_multinomial,
    multinomial_asymptotic,
    multinomial_exact,
    stirling_approx,
)
from .errors import CapacityError, ConvergenceError, DomainError
from .exact_tv import (
    DeckSpec,
    TVEstimate,
    delta_localization_check,
    f_asymptotic,
    hypergeom_log_pmf,
    multinomial_log_pmf,
    radon_nikodym_f,
    tv_exact,
)
from .planner import PlanResult, max_steps_for_deck, min_deck_for_threshold, solve_c_for_epsilon
from .profile import (
    ProfileParams,
    ProfileValue,
    erf,
    gaussian_profile_density,
    profile,
    profile_d1_closed,
    profile_d2_closed,
    profile_integral,
    radius,
)
from .simulator import deal_walk, empirical_suitcount_check, shuffle, suit_of, tv_monte_carlo

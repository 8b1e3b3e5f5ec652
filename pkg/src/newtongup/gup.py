"""Generalized uncertainty relation, minimum length and minimum momentum.

Inputs are the first-order coefficients from :mod:`newtongup.resolvent`;
everything here is closed-form algebra on top of them.  Lengths are fm,
momenta MeV (c = 1), so "Delta p / hbar" is ``dp / hbar_c`` in fm^-1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from newtongup.constants import (
    CODATA,
    EV_PER_MEV,
    FM_PER_CM,
    PhysicalConstants,
    TwoBodySystem,
    coupling_constant,
)
from newtongup.errors import DomainError

QUANTUM_MECHANICAL = "quantum-mechanical"
QUANTUM_GRAVITY = "quantum-gravity"
INTERMEDIATE = "intermediate"


def beta_prime(system: TwoBodySystem, resolvent_value: float) -> float:
    """(lambda_m / lambda_M) * Overline{G'_E (hbar c / r)}; the sign is kept."""
    return system.lambda_m / system.lambda_M * resolvent_value


@dataclass(frozen=True)
class MinimumLength:
    l_min: float
    # Momentum spread at which the bound is attained; inf for beta' = 0.
    dp_at_minimum: float
    exists: bool


def min_length(beta_prime_value: float, constants: PhysicalConstants = CODATA) -> MinimumLength:
    """l_min = l_pl sqrt(beta'), reached at Delta p = hbar / (l_pl sqrt(beta')).

    A negative beta' has no minimum (the relation stays Heisenberg-like);
    that is reported through ``exists`` rather than raised.
    """
    if beta_prime_value < 0:
        return MinimumLength(0.0, math.nan, False)
    l_min = constants.planck_length * math.sqrt(beta_prime_value)
    dp = constants.hbar_c / l_min if l_min > 0 else math.inf
    return MinimumLength(l_min, dp, True)


def rough_min_length(E: float, system: TwoBodySystem, mean_inverse_r: float) -> float:
    """Order-of-magnitude l_min ~ l_pl [ (hbar c / E) (M/m) <1/r> ]^(1/2)."""
    if not E > 0:
        raise DomainError(f"rough estimate needs positive energy, got {E!r}")
    if not mean_inverse_r > 0:
        raise DomainError(f"<1/r> must be positive, got {mean_inverse_r!r}")
    c = system.constants
    ratio = system.total_mass / system.reduced_mass
    return c.planck_length * math.sqrt(c.hbar_c / E * ratio * mean_inverse_r)


def alpha_prime(alpha: float, constants: PhysicalConstants = CODATA) -> float:
    """2 alpha l_pl^2 / hbar^2 (dimensionless)."""
    return 2.0 * alpha * constants.planck_length**2 / constants.hbar_c**2


@dataclass(frozen=True)
class MinimumMomentum:
    alpha_prime: float
    p_min: float
    exists: bool


def min_momentum(alpha: float, constants: PhysicalConstants = CODATA) -> MinimumMomentum:
    """Minimum momentum spread m_pl c sqrt(alpha') from alpha in MeV^2."""
    a_prime = alpha_prime(alpha, constants)
    if a_prime < 0:
        return MinimumMomentum(a_prime, 0.0, False)
    return MinimumMomentum(a_prime, constants.planck_mass_energy * math.sqrt(a_prime), True)


def min_momentum_from_alpha_prime(a_prime: float, constants: PhysicalConstants = CODATA) -> float:
    if a_prime < 0:
        raise DomainError("alpha' must be non-negative")
    return constants.planck_mass_energy * math.sqrt(a_prime)


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    satisfied: bool


def gup_bound(dx, dp, alpha, beta, constants: PhysicalConstants = CODATA, rtol=1e-12) -> BoundCheck:
    """Evaluate Delta x Delta p / hbar against 1/2 + (alpha/hbar^2) dx^2 + beta (dp/hbar)^2.

    ``satisfied`` compares the squared form (dx dp)^2 >= hbar^2/4 + alpha dx^2
    + beta dp^2 with a relative slack ``rtol`` so equality counts.
    """
    if not (dx > 0 and dp > 0):
        raise DomainError("deviations must be positive")
    hc = constants.hbar_c
    lhs = dx * dp / hc
    rhs = 0.5 + alpha / hc**2 * dx**2 + beta * (dp / hc) ** 2
    sq_lhs = (dx * dp) ** 2
    sq_rhs = hc**2 / 4.0 + alpha * dx**2 + beta * dp**2
    satisfied = sq_lhs >= sq_rhs * (1.0 - rtol)
    return BoundCheck(lhs, rhs, satisfied)


def dx_lower_bound(dp_over_hbar: float, beta_prime_value: float, constants: PhysicalConstants = CODATA) -> float:
    """Right side of the beta-only relation, Delta x >= 1/(2 k) + l_pl^2 beta'/2 * k, k = Delta p/hbar."""
    if not dp_over_hbar > 0:
        raise DomainError("Delta p / hbar must be positive")
    return 0.5 / dp_over_hbar + constants.planck_length**2 * beta_prime_value / 2.0 * dp_over_hbar


def string_tension(beta_prime_value: float, constants: PhysicalConstants = CODATA) -> float:
    """hbar c / (l_pl^2 beta') in MeV/fm; inf when beta' = 0."""
    if beta_prime_value == 0:
        return math.inf
    return constants.hbar_c / (constants.planck_length**2 * beta_prime_value)


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    # (Delta p / hbar) * l_min
    ratio: float
    # (Delta p / hbar) / (Delta x / (l_pl^2 beta')); ~1 in the quantum-gravity limit.
    consistency: float


def regime_classify(
    dx: float,
    dp: float,
    l_min: float,
    constants: PhysicalConstants = CODATA,
    qm_threshold: float = 0.1,
    qg_window: tuple = (0.5, 2.0),
) -> RegimeReport:
    if l_min < 0:
        raise DomainError("l_min must be non-negative")
    k = dp / constants.hbar_c
    ratio = k * l_min
    if ratio <= qm_threshold:
        regime = QUANTUM_MECHANICAL
    elif qg_window[0] <= ratio <= qg_window[1]:
        regime = QUANTUM_GRAVITY
    else:
        regime = INTERMEDIATE
    # l_pl^2 beta' = l_min^2
    consistency = k * l_min**2 / dx if dx > 0 and l_min > 0 else 0.0
    return RegimeReport(regime, ratio, consistency)


def large_distance_estimate(m: float, l_min: float, constants: PhysicalConstants = CODATA) -> float:
    """Delta x ~ (1/2)(m_pl/m)^2 l_pl^2 / l_min, returned in cm."""
    if not (m > 0 and l_min > 0):
        raise DomainError("mass and l_min must be positive")
    dx_fm = 0.5 * (constants.planck_mass_energy / m) ** 2 * constants.planck_length**2 / l_min
    return dx_fm / FM_PER_CM


def mass_for_large_distance(dx_cm: float, l_min: float, constants: PhysicalConstants = CODATA) -> float:
    """Inverse of :func:`large_distance_estimate`: the mass (MeV) giving ``dx_cm``."""
    if not (dx_cm > 0 and l_min > 0):
        raise DomainError("distance and l_min must be positive")
    dx_fm = dx_cm * FM_PER_CM
    return constants.planck_mass_energy * math.sqrt(0.5 * constants.planck_length**2 / (l_min * dx_fm))


def mev_to_ev(value: float) -> float:
    return value * EV_PER_MEV


@dataclass(frozen=True)
class GupReport:
    beta_prime: float
    alpha_prime: float
    l_min: float
    p_min: float
    has_min_length: bool
    has_min_momentum: bool
    dp_at_l_min: float
    bound_rhs: float
    bound_lhs: float
    bound_satisfied: bool
    compact_bound: float
    compact_residual: float
    regime: str
    regime_ratio: float
    gamma: float
    string_tension_mev_per_fm: float
    coefficients: str

    def to_dict(self) -> dict:
        return asdict(self)


def gup_report(
    perturbation,
    system: TwoBodySystem,
    coefficients: str = "approx",
    qm_threshold: float = 0.1,
    qg_window: tuple = (0.5, 2.0),
) -> GupReport:
    """Assemble the uncertainty-relation summary from a perturbation report.

    ``coefficients`` picks which alpha/beta feed the bound and p_min: the
    mean-value shortcut (``approx``, the default) or the full expressions
    (``exact``).  beta' always comes from the resolvent value alone.
    """
    if coefficients not in ("approx", "exact"):
        raise DomainError(f"coefficients must be 'approx' or 'exact', got {coefficients!r}")
    c = system.constants
    # The unit tail is attractive, -hbar_c Theta/r, so Overline{G'(hbar c/r)} = -value.
    gbar_hc_over_r = -perturbation.resolvent.value
    bp = beta_prime(system, gbar_hc_over_r) if system.lambda_M > 0 else math.nan
    if math.isfinite(bp) and system.coupling_override is not None:
        # l_pl^2 in beta' stands for G; an overridden coupling rescales G.
        natural = coupling_constant(system.m1, system.m2, c)
        bp = bp * system.g / natural
    alpha = perturbation.alpha_approx if coefficients == "approx" else perturbation.alpha
    beta = perturbation.beta_approx if coefficients == "approx" else perturbation.beta
    lmin = min_length(bp, c) if math.isfinite(bp) else MinimumLength(0.0, math.nan, False)
    pmin = min_momentum(alpha, c)
    bound = gup_bound(perturbation.corrected_dx, perturbation.corrected_dp, alpha, beta, c)
    compact = 0.5 / perturbation.norm
    reg = regime_classify(
        perturbation.corrected_dx, perturbation.corrected_dp, lmin.l_min, c, qm_threshold, qg_window
    )
    return GupReport(
        beta_prime=bp,
        alpha_prime=pmin.alpha_prime,
        l_min=lmin.l_min,
        p_min=pmin.p_min,
        has_min_length=lmin.exists and lmin.l_min > 0,
        has_min_momentum=pmin.exists and pmin.p_min > 0,
        dp_at_l_min=lmin.dp_at_minimum,
        bound_rhs=bound.rhs,
        bound_lhs=bound.lhs,
        bound_satisfied=bound.satisfied,
        compact_bound=compact,
        compact_residual=bound.rhs - compact,
        regime=reg.regime,
        regime_ratio=reg.ratio,
        gamma=-perturbation.g * perturbation.resolvent.value,
        string_tension_mev_per_fm=string_tension(bp, c) if math.isfinite(bp) else math.nan,
        coefficients=coefficients,
    )

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from newtongup.constants import CODATA, TwoBodySystem
from newtongup.errors import DomainError
from newtongup.gup import (
    INTERMEDIATE,
    QUANTUM_GRAVITY,
    QUANTUM_MECHANICAL,
    alpha_prime,
    beta_prime,
    dx_lower_bound,
    gup_bound,
    gup_report,
    large_distance_estimate,
    mass_for_large_distance,
    mev_to_ev,
    min_length,
    min_momentum,
    min_momentum_from_alpha_prime,
    regime_classify,
    rough_min_length,
)
from newtongup.resolvent import deviation_corrections, probe_energy, reduced_resolvent_expectation
from newtongup.spectra import CutoffCoulomb, Grid, gaussian_s, hydrogenic_1s, radial_eigensolve, sample, zero_potential

from conftest import HBAR_C

L_PL = CODATA.planck_length
M_PL = CODATA.planck_mass_energy


@pytest.fixture(scope="module")
def gaussian_case(nucleon_pair, well, unit_tail):
    grid = Grid(20.0, 600)
    basis = radial_eigensolve(well, grid, grid.points - 2, nucleon_pair)
    probe = sample(gaussian_s(1.0), grid)
    return basis, probe, probe_energy(basis, probe), unit_tail, nucleon_pair


def test_beta_prime_basics(nucleon_pair):
    assert beta_prime(nucleon_pair, 0.0) == 0.0
    assert beta_prime(nucleon_pair, 0.37) == pytest.approx(4 * 0.37, rel=1e-14)


def test_beta_prime_against_resolvent_beta(gaussian_case):
    basis, probe, E, tail, system = gaussian_case
    r = deviation_corrections(basis, probe, E, tail, system)
    bp = beta_prime(system, -r.resolvent.value)
    # beta = -2 g dx^2 v and g = l_pl^2/(lambda_m lambda_M) give beta = 2 l_pl^2 beta' dx^2/lambda_m^2.
    assert r.beta_approx == pytest.approx(2 * L_PL**2 * bp * r.baseline_dx**2 / system.lambda_m**2, rel=1e-12)
    assert r.baseline_dx >= system.lambda_m / 2
    assert r.beta_approx >= L_PL**2 * bp / 2


@pytest.mark.parametrize("bp, expected", [(1.0, L_PL), (0.0, 0.0), (4.0, 2 * L_PL)])
def test_min_length(bp, expected):
    ml = min_length(bp)
    assert ml.l_min == pytest.approx(expected, rel=1e-15)
    assert ml.exists


def test_min_length_negative_reported():
    ml = min_length(-1.0)
    assert not ml.exists and ml.l_min == 0.0


def test_min_length_attained_at_dp():
    ml = min_length(4.0)
    assert ml.dp_at_minimum == pytest.approx(HBAR_C / (2 * L_PL), rel=1e-15)


def test_rough_min_length_scaling(nucleon_pair):
    # hbar c/E = 1 fm and <1/r> = 1 fm^-1; M/m = 4 for equal masses.
    l1 = rough_min_length(HBAR_C, nucleon_pair, 1.0)
    assert l1 == pytest.approx(2 * L_PL, rel=1e-14)
    assert rough_min_length(4 * HBAR_C, nucleon_pair, 1.0) == pytest.approx(l1 / 2, rel=1e-14)
    with pytest.raises(DomainError):
        rough_min_length(-1.0, nucleon_pair, 1.0)
    with pytest.raises(DomainError):
        rough_min_length(1.0, nucleon_pair, 0.0)


@pytest.mark.parametrize("kappa", [0.2, 1.0])
def test_rough_vs_resolvent_path(nucleon_pair, kappa):
    grid = Grid(60.0, 1500)
    basis = radial_eigensolve(zero_potential, grid, grid.points - 2, nucleon_pair)
    probe = hydrogenic_1s(kappa, nucleon_pair)
    res = reduced_resolvent_expectation(basis, probe, probe.energy, CutoffCoulomb(-HBAR_C, 0.0))
    bp = beta_prime(nucleon_pair, -res.value)
    resolvent_path = L_PL * math.sqrt(abs(bp))
    rough = rough_min_length(-probe.energy, nucleon_pair, kappa)
    assert 0.1 <= resolvent_path / rough <= 10


def test_min_momentum():
    assert min_momentum(0.0).p_min == 0.0
    assert min_momentum_from_alpha_prime(1.0) == M_PL
    assert not min_momentum(-1.0).exists
    a = HBAR_C**2 / (2 * L_PL**2)  # alpha' = 1
    assert min_momentum(a).p_min == pytest.approx(M_PL, rel=1e-14)


def test_alpha_beta_prime_link_at_compton_spread(nucleon_pair):
    v = -0.42
    g = nucleon_pair.g
    dp = HBAR_C / nucleon_pair.lambda_m
    alpha = -2 * g * dp**2 * v
    lhs = math.sqrt(alpha_prime(alpha))
    rhs = 2 * (nucleon_pair.reduced_mass / M_PL) ** 2 * math.sqrt(beta_prime(nucleon_pair, -v))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_heisenberg_bound():
    dx = 1.3
    dp = HBAR_C / (2 * dx)
    b = gup_bound(dx, dp, 0.0, 0.0)
    assert b.rhs == 0.5
    assert b.lhs == pytest.approx(0.5, rel=1e-15)
    assert b.satisfied
    with pytest.raises(DomainError):
        gup_bound(0.0, 1.0, 0.0, 0.0)


def test_beta_only_minimum_matches_min_length():
    bp = 1e40
    res = minimize_scalar(
        lambda t: dx_lower_bound(math.exp(t), bp), bracket=(-5.0, 5.0), tol=1e-12
    )
    assert res.fun == pytest.approx(min_length(bp).l_min, rel=1e-10)


@given(
    st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0.1, 10), st.floats(1, 1e3)
)
def test_rhs_monotone_and_above_half(alpha, extra, beta, dx, dp):
    a = gup_bound(dx, dp, alpha, beta).rhs
    assert a >= 0.5
    assert gup_bound(dx, dp, alpha + extra, beta).rhs >= a
    assert gup_bound(dx, dp, alpha, beta + extra).rhs >= a


def test_regimes():
    assert regime_classify(1.0, 1.0, 0.0).regime == QUANTUM_MECHANICAL
    l = 1e-3
    assert regime_classify(1.0, HBAR_C / l, l).regime == QUANTUM_GRAVITY
    assert regime_classify(1.0, 1e-3 * HBAR_C / l, l).regime == QUANTUM_MECHANICAL
    assert regime_classify(1.0, 0.3 * HBAR_C / l, l).regime == INTERMEDIATE
    with pytest.raises(DomainError):
        regime_classify(1.0, 1.0, -1.0)


def test_large_distance_estimates():
    assert large_distance_estimate(1000.0, L_PL) == pytest.approx(1.2e5, rel=0.01)
    assert mev_to_ev(mass_for_large_distance(1e28, L_PL)) == pytest.approx(3.5e-3, rel=0.01)
    assert large_distance_estimate(M_PL, L_PL) * 1e13 == pytest.approx(L_PL / 2, rel=1e-14)
    with pytest.raises(DomainError):
        large_distance_estimate(0.0, L_PL)


@given(st.floats(1e-6, 1e10))
def test_large_distance_round_trip(m):
    dx = large_distance_estimate(m, L_PL)
    assert mass_for_large_distance(dx, L_PL) == pytest.approx(m, rel=1e-12)


def test_report_invariants(gaussian_case):
    basis, probe, E, tail, system = gaussian_case
    r = deviation_corrections(basis, probe, E, tail, system, g=1e-4)
    rep = gup_report(r, system)
    assert rep.l_min == L_PL * math.sqrt(rep.beta_prime)
    assert rep.p_min == M_PL * math.sqrt(rep.alpha_prime)
    assert rep.compact_bound == 0.5 / r.norm
    assert abs(rep.bound_rhs - rep.compact_bound) <= 10 * 1e-4**2


def test_report_at_zero_coupling(gaussian_case):
    basis, probe, E, tail, _ = gaussian_case
    system = TwoBodySystem(938.272, 938.272, coupling_override=0.0)
    r = deviation_corrections(basis, probe, E, tail, system)
    rep = gup_report(r, system)
    assert rep.bound_rhs == 0.5 and rep.compact_bound == 0.5
    assert rep.l_min == 0.0 and rep.p_min == 0.0


def test_report_rejects_unknown_coefficients(gaussian_case):
    basis, probe, E, tail, system = gaussian_case
    r = deviation_corrections(basis, probe, E, tail, system)
    with pytest.raises(DomainError):
        gup_report(r, system, coefficients="other")

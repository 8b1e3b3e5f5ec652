import math

import numpy as np
import pytest
from scipy.integrate import quad

from newtongup.constants import TwoBodySystem
from newtongup.errors import DomainError, PreconditionError
from newtongup.spectra import (
    P2,
    R2,
    CutoffCoulomb,
    Grid,
    RadialState,
    SquareWell,
    analytic_basis,
    gaussian_s,
    grid_state,
    hydrogenic_1s,
    kinetic_moment,
    matrix_element,
    matrix_element_cutoff_inverse_r,
    overlap,
    quadrature_element,
    radial_eigensolve,
    sample,
    second_moment,
    well_1s,
    zero_potential,
)

from conftest import HBAR_C


def norm_by_quadrature(state):
    return quad(lambda r: 4 * math.pi * r * r * state.phi(r) ** 2, 0, math.inf, epsabs=0, epsrel=1e-12)[0]


@pytest.mark.parametrize("state", [hydrogenic_1s(1.0), well_1s(1, 2.0), well_1s(3, 0.5), gaussian_s(1.3)])
def test_closed_forms_normalized(state):
    assert norm_by_quadrature(state) == pytest.approx(1.0, rel=1e-10)


def test_hydrogenic_moments():
    s = hydrogenic_1s(1.0)
    assert second_moment(s) == pytest.approx(3.0, rel=1e-10)
    assert second_moment(s) / 3 == pytest.approx(1.0, rel=1e-10)
    assert kinetic_moment(s, HBAR_C) == pytest.approx(HBAR_C**2, rel=1e-10)


def test_hydrogen_kappa():
    # kappa = Z/(nu a) with a = 5.3e4 fm
    assert 1.0 / 5.3e4 == pytest.approx(1.9e-5, rel=0.01)


def test_invalid_kappa():
    with pytest.raises(DomainError):
        hydrogenic_1s(0.0)
    with pytest.raises(DomainError):
        well_1s(0, 2.0)
    with pytest.raises(DomainError):
        well_1s(1, -2.0)


def test_well_kappa():
    s1, s2 = well_1s(1, 2.0), well_1s(2, 2.0)
    assert s1.kappa == pytest.approx(math.pi / 4)
    assert s1.kappa * 2.0 == pytest.approx(math.pi / 2)
    assert s2.kappa == pytest.approx(2 * s1.kappa)


def test_self_overlap():
    s = hydrogenic_1s(0.7)
    assert overlap(s, s) == pytest.approx(1.0, rel=1e-12)


def test_hydrogenic_well_overlap_closed_form():
    h = hydrogenic_1s(1.0)
    w = RadialState("well-1s", kappa=1.0)
    expected = math.sqrt(1 / (2 * math.pi)) * math.sqrt(1 / math.pi) * 4 * math.pi / 4
    assert overlap(h, w) == pytest.approx(expected, rel=1e-12)
    assert overlap(h, w) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)
    assert quadrature_element(h, w) == pytest.approx(expected, rel=1e-8)


def test_overlap_vanishes_with_kappa():
    w = well_1s(1, 2.0)
    a, b = overlap(hydrogenic_1s(1e-4), w), overlap(hydrogenic_1s(1e-6), w)
    assert a / b == pytest.approx(100.0**1.5, rel=1e-3)


def test_overlap_rejects_unnormalized():
    g = Grid(10.0, 50)
    bad = grid_state(g, np.ones(48))
    with pytest.raises(PreconditionError):
        overlap(bad, bad)


def test_cutoff_inverse_r():
    s = hydrogenic_1s(0.8)
    assert matrix_element_cutoff_inverse_r(s, s, 0.0) == pytest.approx(0.8, rel=1e-12)
    assert matrix_element_cutoff_inverse_r(s, s, math.inf) == 0.0
    with pytest.raises(DomainError):
        matrix_element_cutoff_inverse_r(s, s, -1.0)


@pytest.mark.parametrize("kappa", [1.0 / 5.3e4, 0.3, 2.0])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_cutoff_element_closed_form_vs_quadrature(kappa, n):
    h, w = hydrogenic_1s(kappa), well_1s(n, 2.0)
    op = CutoffCoulomb(1.0, 2.0)
    closed = matrix_element(w, h, op)
    assert closed == pytest.approx(quadrature_element(w, h, op), rel=1e-8)


@pytest.mark.parametrize("a,b", [(well_1s(1, 2.0), well_1s(2, 2.0)), (hydrogenic_1s(0.5), well_1s(1, 2.0))])
def test_overlap_closed_form_vs_quadrature(a, b):
    assert matrix_element(a, b) == pytest.approx(quadrature_element(a, b), rel=1e-8)


def test_gaussian_saturates_heisenberg():
    s = gaussian_s(1.7)
    dx = math.sqrt(second_moment(s) / 3)
    dp = math.sqrt(kinetic_moment(s, HBAR_C) / 3)
    assert dx * dp / HBAR_C == pytest.approx(0.5, rel=1e-10)


def test_grid_invariants():
    g = Grid(10.0, 11)
    assert g.spacing == 1.0
    with pytest.raises(DomainError):
        Grid(10.0, 2)
    with pytest.raises(DomainError):
        Grid(-1.0, 10)


def test_box_spectrum():
    system = TwoBodySystem(938.272, 938.272)
    grid = Grid(10.0, 2001)
    basis = radial_eigensolve(zero_potential, grid, 3, system)
    k = system.kinetic_prefactor
    for n, e in enumerate(basis.energies, start=1):
        assert e == pytest.approx(k * (n * math.pi / 10.0) ** 2, rel=1e-4)


def test_pure_coulomb_ground_state():
    g = 0.1
    system = TwoBodySystem(938.272, 938.272)
    m = system.reduced_mass
    exact = -m * g * g / 2
    grid = Grid(80.0, 8001)
    basis = radial_eigensolve(CutoffCoulomb(-HBAR_C * g, 0.0), grid, 1, system)
    assert basis.energies[0] == pytest.approx(exact, rel=1e-4)


def test_second_order_convergence():
    system = TwoBodySystem(938.272, 938.272)
    exact = system.kinetic_prefactor * (math.pi / 10.0) ** 2
    errs = [
        abs(radial_eigensolve(zero_potential, Grid(10.0, n), 1, system).energies[0] - exact)
        for n in (101, 201)
    ]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.01)


def test_numeric_basis_orthonormal_and_complete(nucleon_pair, well):
    grid = Grid(20.0, 600)
    basis = radial_eigensolve(well, grid, grid.points - 2, nucleon_pair)
    assert basis.orthonormality_error() <= 1e-8
    probe = sample(gaussian_s(1.0), grid)
    assert basis.completeness_defect(probe) <= 1e-6


def test_completeness_improves_with_truncation(nucleon_pair, well):
    grid = Grid(20.0, 400)
    probe = sample(gaussian_s(1.0), grid)
    defects = [
        radial_eigensolve(well, grid, n, nucleon_pair).completeness_defect(probe) for n in (5, 20, 80, 398)
    ]
    assert all(a >= b for a, b in zip(defects, defects[1:]))
    assert defects[-1] < 1e-10


def test_eigensolve_validation(nucleon_pair):
    grid = Grid(10.0, 20)
    with pytest.raises(DomainError):
        radial_eigensolve(zero_potential, grid, 0, nucleon_pair)
    with pytest.raises(DomainError):
        radial_eigensolve(lambda r: np.full_like(r, np.inf), grid, 1, nucleon_pair)


def test_grid_moments_match_closed_form():
    grid = Grid(20.0, 4001)
    s = gaussian_s(1.0)
    sampled = sample(s, grid)
    assert matrix_element(sampled, sampled, R2) == pytest.approx(second_moment(s), rel=1e-6)
    assert matrix_element(sampled, sampled, P2, HBAR_C) == pytest.approx(kinetic_moment(s, HBAR_C), rel=1e-5)


def test_analytic_basis_sorted_by_energy():
    system = TwoBodySystem(0.5, math.inf)
    basis = analytic_basis([well_1s(n, 2.0, system) for n in (1, 2, 3)])
    assert np.all(np.diff(basis.energies) > 0)
    assert [s.index for s in basis.states] == [3, 2, 1]


def test_square_well_values():
    w = SquareWell(50.0, 2.0)
    assert list(w(np.array([1.0, 2.0, 3.0]))) == [-50.0, 0.0, 0.0]

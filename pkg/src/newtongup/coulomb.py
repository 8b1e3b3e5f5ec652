"""Hydrogen-like atom: size of the Coulomb analogue of the gravitational term.

The nucleus is a homogeneously charged sphere of radius R.  Its inside part
is the unperturbed potential; the 1/r tail outside R plays the role of the
perturbation.  The probe is a hydrogenic 1s state and the unperturbed
spectrum is modelled by closed-form square-well states.

The electron mass is taken from the Bohr radius, m c^2 = (hbar c)^2 / (a e^2),
so the general resolvent machinery and the dimensionless closed form agree
exactly for any chosen ``a``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from newtongup.constants import CODATA, PhysicalConstants, TwoBodySystem
from newtongup.errors import DomainError
from newtongup.resolvent import ResolventSum, reduced_resolvent_expectation
from newtongup.spectra import CutoffCoulomb, SpectralBasis, analytic_basis, hydrogenic_1s, well_1s

FINE_STRUCTURE_INVERSE = 137.035999
DEFAULT_NUCLEAR_RADIUS = 2.0  # fm
DEFAULT_BOHR_RADIUS = 5.3e4  # fm
DEFAULT_BASIS_COUNT = 30
GAMMA_THRESHOLD = 1e-14
SUM_TERM_CUTOFF = 1e-16


class ApproximationDomainError(DomainError):
    """The small-lambda approximation was requested outside lambda << lambda_1."""


@dataclass(frozen=True)
class HydrogenLikeScenario:
    Z: int
    nu: int = 1
    R: float = DEFAULT_NUCLEAR_RADIUS
    a: float = DEFAULT_BOHR_RADIUS
    constants: PhysicalConstants = field(default=CODATA, repr=False)

    def __post_init__(self):
        if self.Z < 0 or int(self.Z) != self.Z:
            raise DomainError(f"Z must be a non-negative integer, got {self.Z!r}")
        if self.nu < 1 or int(self.nu) != self.nu:
            raise DomainError(f"nu must be a positive integer, got {self.nu!r}")
        if not (self.R > 0 and self.a > 0):
            raise DomainError("R and a must be positive")

    @property
    def e2(self) -> float:
        """Elementary charge squared in MeV fm."""
        return self.constants.hbar_c / FINE_STRUCTURE_INVERSE

    @property
    def g_coulomb(self) -> float:
        return self.Z / FINE_STRUCTURE_INVERSE

    @property
    def kappa(self) -> float:
        return self.Z / (self.nu * self.a)

    @property
    def lam(self) -> float:
        return self.kappa * self.R

    def lambda_n(self, count: int) -> list:
        return [0.5 * math.pi * n for n in range(1, count + 1)]

    @property
    def electron_mass(self) -> float:
        return self.constants.hbar_c**2 / (self.a * self.e2)

    @property
    def system(self) -> TwoBodySystem:
        return TwoBodySystem(
            self.electron_mass, math.inf, constants=self.constants, coupling_override=self.g_coulomb
        )

    def unit_tail(self) -> CutoffCoulomb:
        return CutoffCoulomb(-self.constants.hbar_c, self.R)


@dataclass(frozen=True)
class NuclearPotential:
    inside: float
    outside: float

    @property
    def total(self) -> float:
        return self.inside + self.outside


def nuclear_potential(r: float, scenario: HydrogenLikeScenario) -> NuclearPotential:
    """Electron-nucleus energy split into the inside (V) and outside (U) parts.

    Uses the form (Z e^2 / R^3)(r^2 - 3 R^2) inside, -Z e^2 / r outside, as
    given; note the two branches do not meet at r = R.  The point r = R is
    assigned to the outside branch.
    """
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r!r}")
    ze2 = scenario.Z * scenario.e2
    R = scenario.R
    if r < R:
        return NuclearPotential(ze2 / R**3 * (r * r - 3.0 * R * R), 0.0)
    return NuclearPotential(0.0, -ze2 / r)


def coulomb_basis(scenario: HydrogenLikeScenario, count: int = DEFAULT_BASIS_COUNT) -> SpectralBasis:
    if count < 1:
        raise DomainError(f"basis count must be >= 1, got {count}")
    system = scenario.system
    return analytic_basis([well_1s(n, scenario.R, system) for n in range(1, count + 1)])


def coulomb_probe(scenario: HydrogenLikeScenario):
    return hydrogenic_1s(scenario.kappa, scenario.system)


def gamma_resolvent(scenario: HydrogenLikeScenario, basis_count: int = DEFAULT_BASIS_COUNT) -> ResolventSum:
    """Overline{G'_E U1} for the unit tail, through the general spectral machinery."""
    probe = coulomb_probe(scenario)
    basis = coulomb_basis(scenario, basis_count)
    return reduced_resolvent_expectation(basis, probe, probe.energy, scenario.unit_tail())


def gamma_exact(scenario: HydrogenLikeScenario, basis_count: int = DEFAULT_BASIS_COUNT) -> float:
    """gamma = -Overline{G'_E U} summed over ``basis_count`` well states."""
    if basis_count < 1:
        raise DomainError(f"basis count must be >= 1, got {basis_count}")
    if scenario.Z == 0:
        return 0.0
    res = gamma_resolvent(scenario, basis_count)
    return -scenario.g_coulomb * res.value


def gamma_closed_form(scenario: HydrogenLikeScenario, basis_count: int = DEFAULT_BASIS_COUNT) -> float:
    """Dimensionless form of the same sum:

    16 Z (R/a) lam^3 sum_n lam_n exp(-(lam_n + lam)) / ((lam_n^2 - lam^2)(lam_n + lam)^3).
    """
    lam = scenario.lam
    terms = [
        ln * math.exp(-(ln + lam)) / ((ln * ln - lam * lam) * (ln + lam) ** 3)
        for ln in scenario.lambda_n(basis_count)
    ]
    return 16.0 * scenario.Z * (scenario.R / scenario.a) * lam**3 * math.fsum(terms)


@lru_cache(maxsize=None)
def sum_constant() -> float:
    """S = sum_{n>=1} exp(-pi n / 2) / n^4 by direct summation.

    Terminates once a term drops below 1e-16 of the running sum.
    """
    terms = []
    n = 1
    while True:
        t = math.exp(-0.5 * math.pi * n) / n**4
        if terms and t < SUM_TERM_CUTOFF * math.fsum(terms):
            break
        terms.append(t)
        n += 1
    return math.fsum(terms)


def gamma_approx_prefactor(scenario: HydrogenLikeScenario) -> float:
    """16 Z (R/a) lam^3 (2/pi)^4; multiply by :func:`sum_constant` for gamma."""
    return 16.0 * scenario.Z * (scenario.R / scenario.a) * scenario.lam**3 * (2.0 / math.pi) ** 4


def gamma_approx(scenario: HydrogenLikeScenario) -> float:
    """Small-lambda limit of :func:`gamma_closed_form` (requires lam < 0.01 lam_1)."""
    if scenario.lam >= 0.01 * (0.5 * math.pi):
        raise ApproximationDomainError(
            f"lambda = {scenario.lam:.3g} is not small against lambda_1 = pi/2"
        )
    return gamma_approx_prefactor(scenario) * sum_constant()


@dataclass(frozen=True)
class GammaBound:
    bound: float
    z_at_max: int
    threshold: float
    ratio_to_threshold: float
    below_threshold: bool
    verdict: str
    within_validated_range: bool


def gamma_upper_bound(
    z_max: int, nu: int = 1, R: float = DEFAULT_NUCLEAR_RADIUS, a: float = DEFAULT_BOHR_RADIUS
) -> GammaBound:
    """Largest gamma over Z = 1..z_max, set against the 1e-14 level."""
    if z_max < 1:
        raise DomainError(f"z_max must be >= 1, got {z_max}")
    in_range = z_max <= 10
    if not in_range:
        warnings.warn(f"z_max = {z_max} is outside the validated range 1..10", stacklevel=2)
    values = [gamma_approx(HydrogenLikeScenario(z, nu, R, a)) for z in range(1, z_max + 1)]
    i = int(np.argmax(values))
    bound = values[i]
    # Negligible means tiny against the 1/2 of the Heisenberg bound.
    verdict = "may be neglected" if bound < 1e-6 * 0.5 else "not negligible"
    return GammaBound(
        bound=bound,
        z_at_max=i + 1,
        threshold=GAMMA_THRESHOLD,
        ratio_to_threshold=bound / GAMMA_THRESHOLD,
        below_threshold=bound < GAMMA_THRESHOLD,
        verdict=verdict,
        within_validated_range=in_range,
    )


def beta_from_gamma(gamma: float, lambda_m: float) -> float:
    """beta = lambda_m^2 gamma / 2 in fm^2."""
    return 0.5 * lambda_m**2 * gamma


SWEEP_COLUMNS = ("Z", "nu", "lambda", "gamma_exact", "gamma_approx", "rel_diff", "beta_fm2")


def coulomb_sweep(
    z_max: int = 10,
    nu: int = 1,
    R: float = DEFAULT_NUCLEAR_RADIUS,
    a: float = DEFAULT_BOHR_RADIUS,
    basis_count: int = DEFAULT_BASIS_COUNT,
) -> list:
    """One row per Z in 1..z_max with the ``SWEEP_COLUMNS`` fields, in Z order."""
    rows = []
    for z in range(1, z_max + 1):
        sc = HydrogenLikeScenario(z, nu, R, a)
        ge = gamma_exact(sc, basis_count)
        ga = gamma_approx(sc)
        rows.append(
            {
                "Z": z,
                "nu": nu,
                "lambda": sc.lam,
                "gamma_exact": ge,
                "gamma_approx": ga,
                "rel_diff": abs(ge - ga) / abs(ge),
                "beta_fm2": beta_from_gamma(ge, sc.system.lambda_m),
            }
        )
    return rows

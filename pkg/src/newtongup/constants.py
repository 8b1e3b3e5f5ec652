"""Internal unit system and physical constants.

Energies and masses are in MeV, lengths in fm, momenta in MeV/c; hbar = c = 1,
so ``hbar_c`` (MeV fm) converts between inverse lengths and energies.  Only
report boundaries convert to cm or eV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import scipy.constants as sc

from newtongup.errors import DomainError

FM_PER_CM = 1.0e13
EV_PER_MEV = 1.0e6

# Smallness diagnostic levels.
PASS = "pass"
WARN = "warn"
FAIL = "fail"


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants of the fm/MeV unit system.

    The Planck mass is derived from ``hbar_c / planck_length`` so that
    ``m_pl * l_pl == hbar_c`` holds to rounding; Newton's constant is never
    stored and is rebuilt from the Planck length on request.
    """

    hbar_c: float = 197.3269804  # MeV fm
    planck_length: float = 1.616255e-20  # fm
    speed_of_light: float = 1.0

    def __post_init__(self):
        if not (self.hbar_c > 0 and self.planck_length > 0):
            raise DomainError("physical constants must be strictly positive")
        if self.speed_of_light != 1.0:
            raise DomainError("internal units require c = 1")

    @classmethod
    def from_overrides(cls, hbar_c=None, planck_length=None, planck_mass=None):
        """Build constants from any consistent subset of the override keys."""
        hbar_c = cls.hbar_c if hbar_c is None else float(hbar_c)
        if planck_mass is not None:
            derived = hbar_c / float(planck_mass)
            if planck_length is not None and not math.isclose(
                derived, float(planck_length), rel_tol=1e-12
            ):
                raise DomainError(
                    "planck_length and planck_mass disagree with hbar_c "
                    f"(hbar_c/m_pl = {derived!r} fm, l_pl = {planck_length!r} fm)"
                )
            planck_length = derived
        if planck_length is None:
            planck_length = cls.planck_length
        return cls(hbar_c=hbar_c, planck_length=float(planck_length))

    @property
    def planck_mass_energy(self) -> float:
        """Planck mass times c^2 in MeV."""
        return self.hbar_c / self.planck_length

    @property
    def newton_constant(self) -> float:
        """G in fm/MeV (c = 1): G = l_pl^2 / (hbar c)."""
        return self.planck_length**2 / self.hbar_c

    @property
    def newton_constant_si(self) -> float:
        """G in m^3 kg^-1 s^-2, rebuilt as l_pl^2 c^3 / hbar."""
        l_pl_m = self.planck_length * 1e-15
        return l_pl_m**2 * sc.c**3 / sc.hbar

    def as_dict(self) -> dict:
        return {
            "hbar_c_mev_fm": self.hbar_c,
            "planck_length_fm": self.planck_length,
            "planck_mass_mev": self.planck_mass_energy,
        }


CODATA = PhysicalConstants()


def compton_wavelength(mass: float, constants: PhysicalConstants = CODATA) -> float:
    """Reduced Compton wavelength hbar/(m c) in fm for a mass-energy in MeV."""
    if not mass > 0:
        raise DomainError(f"Compton wavelength needs a positive mass, got {mass!r}")
    return constants.hbar_c / mass


def mass_of(wavelength: float, constants: PhysicalConstants = CODATA) -> float:
    """Inverse of :func:`compton_wavelength`."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    return constants.hbar_c / wavelength


def coupling_constant(m1: float, m2: float, constants: PhysicalConstants = CODATA) -> float:
    """Dimensionless gravitational coupling g = G m1 m2 / (hbar c).

    Evaluated as (m1/m_pl)(m2/m_pl) to keep the tiny numbers in range.
    """
    if m1 < 0 or m2 < 0:
        raise DomainError(f"masses must be non-negative, got m1={m1!r}, m2={m2!r}")
    m_pl = constants.planck_mass_energy
    return (m1 / m_pl) * (m2 / m_pl)


@dataclass(frozen=True)
class SmallnessDiagnostic:
    status: str
    g: float
    pass_threshold: float
    fail_threshold: float
    # The two equivalent forms of the smallness condition; None when not defined
    # (e.g. a coupling given directly rather than via masses).
    wavelength_form: float | None = None
    mass_form: float | None = None

    @property
    def ok(self) -> bool:
        return self.status != FAIL


def validate_smallness(
    g: float,
    system: "TwoBodySystem | None" = None,
    pass_threshold: float = 1e-3,
    fail_threshold: float = 1e-1,
) -> SmallnessDiagnostic:
    """Classify a coupling against the perturbative requirement g << 1."""
    if g <= pass_threshold:
        status = PASS
    elif g < fail_threshold:
        status = WARN
    else:
        status = FAIL
    wavelength_form = mass_form = None
    if system is not None and system.reduced_mass > 0 and system.lambda_M > 0:
        c = system.constants
        wavelength_form = (c.planck_length / system.lambda_m) * (
            c.planck_length / system.lambda_M
        )
        mass_form = (system.reduced_mass / c.planck_mass_energy) * (
            system.total_mass / c.planck_mass_energy
        )
    return SmallnessDiagnostic(
        status, g, pass_threshold, fail_threshold, wavelength_form, mass_form
    )


@dataclass(frozen=True)
class TwoBodySystem:
    """Two particles reduced to relative motion.

    ``g`` defaults to the gravitational coupling of the pair; ``coupling_override``
    sets it directly, e.g. for a Coulomb-analog strength or a swept coupling.
    """

    m1: float
    m2: float
    constants: PhysicalConstants = field(default=CODATA, repr=False)
    coupling_override: float | None = None

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise DomainError(f"masses must be non-negative, got {self.m1!r}, {self.m2!r}")
        if self.m1 + self.m2 <= 0:
            raise DomainError("total mass must be positive")
        if self.coupling_override is not None and self.coupling_override < 0:
            raise DomainError("coupling must be non-negative")

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @property
    def reduced_mass(self) -> float:
        # A static force centre (m2 = inf) leaves the light particle's mass.
        if math.isinf(self.m2):
            return self.m1
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def g(self) -> float:
        if self.coupling_override is not None:
            return self.coupling_override
        return coupling_constant(self.m1, self.m2, self.constants)

    @property
    def lambda_m(self) -> float:
        return compton_wavelength(self.reduced_mass, self.constants)

    @property
    def lambda_M(self) -> float:
        if math.isinf(self.total_mass):
            return 0.0
        return compton_wavelength(self.total_mass, self.constants)

    @property
    def kinetic_prefactor(self) -> float:
        """hbar^2/(2m) in MeV fm^2."""
        return self.constants.hbar_c**2 / (2.0 * self.reduced_mass)

    def as_dict(self) -> dict:
        out = {
            "m1_mev": self.m1,
            "m2_mev": self.m2,
            "reduced_mass_mev": self.reduced_mass,
            "total_mass_mev": self.total_mass,
            "g": self.g,
        }
        if self.reduced_mass > 0:
            out["lambda_m_fm"] = self.lambda_m
            out["lambda_M_fm"] = self.lambda_M
        return out

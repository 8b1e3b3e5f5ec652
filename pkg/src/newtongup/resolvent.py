"""Reduced Green's function sums and the linear-in-g corrections built on them.

Everything here is first order in the coupling.  The tail potential is passed
per unit coupling (``U = g * U1``) and ``g`` is multiplied in at the end, so
every correction is exactly proportional to g.

Sums run over the basis in a fixed order and are accumulated with
``math.fsum``; results do not depend on thread count or call history.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from newtongup.constants import TwoBodySystem, validate_smallness
from newtongup.errors import (
    DegenerateConfigurationError,
    IncompleteInputError,
    NumericError,
    PreconditionError,
)
from newtongup.spectra import (
    IDENTITY,
    P2,
    R2,
    GRID,
    RadialState,
    SpectralBasis,
    matrix_element,
    sample,
)


@dataclass(frozen=True)
class ResolventSum:
    """Value of sum'_n <phi|A|phi_n><phi_n|U|phi> / (E - E_n)."""

    value: float
    terms_used: int
    excluded_indices: tuple = ()
    tail_estimate: float = 0.0
    energy: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NumericError("resolvent sum is not finite", {"value": self.value})
        if self.tail_estimate < 0:
            raise ValueError("tail estimate must be non-negative")


def tail_estimate(terms) -> float:
    """Geometric extrapolation of the remainder from the last two blocks of terms.

    The terms are split into blocks of ``max(1, K // 10)``; with q the ratio
    of the last block sum to the one before, the remainder is taken as
    ``|last| * q / (1 - q)``.  Returns ``inf`` when the blocks do not shrink.
    """
    terms = list(terms)
    k = len(terms)
    b = max(1, k // 10)
    if k < 2 * b or k < 2:
        return 0.0
    d1 = math.fsum(terms[k - 2 * b : k - b])
    d2 = math.fsum(terms[k - b :])
    if d2 == 0.0:
        return 0.0
    if d1 == 0.0:
        return math.inf
    q = abs(d2 / d1)
    if q >= 1.0:
        return math.inf
    return abs(d2) * q / (1.0 - q)


def primed_sum(a_elements, u_elements, energies, E, tolerance) -> ResolventSum:
    """Sum a_n u_n / (E - E_n) over n, skipping |E - E_n| < tolerance.

    Works on plain arrays so small hand-built models can be checked directly.
    """
    a = np.asarray(a_elements, dtype=float)
    u = np.asarray(u_elements, dtype=float)
    den = E - np.asarray(energies, dtype=float)
    excluded = tuple(int(i) for i in np.nonzero(np.abs(den) < tolerance)[0])
    keep = np.abs(den) >= tolerance
    if not np.any(keep):
        raise DegenerateConfigurationError(
            "every term of the primed sum is degenerate with E",
            {"E": E, "tolerance": tolerance, "terms": len(den)},
        )
    terms = (a[keep] * u[keep] / den[keep]).tolist()
    return ResolventSum(
        value=math.fsum(terms),
        terms_used=len(terms),
        excluded_indices=excluded,
        tail_estimate=tail_estimate(terms),
        energy=float(E),
    )


def degeneracy_threshold(basis: SpectralBasis, E: float) -> float:
    scale = abs(E) if E != 0 else float(np.max(np.abs(basis.energies)))
    return basis.degeneracy_tolerance * max(scale, np.finfo(float).tiny)


def _on_basis(basis: SpectralBasis, probe: RadialState) -> RadialState:
    if basis.grid is not None and probe.kind != GRID:
        return sample(probe, basis.grid)
    return probe


def probe_energy(basis: SpectralBasis, probe: RadialState) -> float:
    """Default expansion energy: the probe's own energy, else <H0> over the basis."""
    if probe.energy is not None:
        return probe.energy
    c = basis.elements(_on_basis(basis, probe))
    w = c * c
    return math.fsum((basis.energies * w).tolist()) / math.fsum(w.tolist())


def cross_resolvent(basis, probe, E, potential_tail, operator=IDENTITY, hbar_c=None) -> ResolventSum:
    """Overline{A G'_E U}: sum'_n <phi|A|phi_n><phi_n|U|phi>/(E - E_n)."""
    probe = _on_basis(basis, probe)
    a = basis.elements(probe, operator, hbar_c)
    if potential_tail is None:
        u = np.zeros(len(basis))
    else:
        u = basis.elements(probe, potential_tail)
    return primed_sum(a, u, basis.energies, E, degeneracy_threshold(basis, E))


def reduced_resolvent_expectation(basis, probe, E, potential_tail) -> ResolventSum:
    """Overline{G'_E U} = sum'_n <phi|phi_n><phi_n|U|phi>/(E - E_n)."""
    return cross_resolvent(basis, probe, E, potential_tail, IDENTITY)


@dataclass(frozen=True)
class NormCorrection:
    norm: float
    shift: float

    @property
    def below_unity(self) -> bool:
        return self.shift < 0


def norm_correction(resolvent: ResolventSum, g: float = 1.0) -> NormCorrection:
    """<psi|psi> = 1 + 2 g Overline{G'_E U1} to first order.

    The shift is kept separately: it can be far below float resolution of 1.
    """
    shift = 2.0 * g * resolvent.value
    return NormCorrection(1.0 + shift, shift)


def corrected_mean(a_bar, a_cross, resolvent_value, g: float = 1.0) -> float:
    """First-order mean of a Hermitian operator A over the corrected state.

    <A> = A_bar + 2 g Overline{A G' U1} - A_bar * 2 g Overline{G' U1}
    where ``a_cross`` is Overline{A G' U1} (real, so the conjugate term doubles it).
    """
    if a_bar is None or a_cross is None or resolvent_value is None:
        raise IncompleteInputError("corrected_mean needs A_bar, the A cross term and the resolvent value")
    return a_bar + 2.0 * g * a_cross - a_bar * 2.0 * g * resolvent_value


def deviation_second_moment_correction(mean, cross_first, cross_second, resolvent_value):
    """R for one observable, per unit coupling.

    mean^2 * 2v - 2 mean * 2 cross_first + 2 cross_second, where cross_first
    and cross_second are Overline{A G' U1} for A and A^2.
    """
    return mean * mean * 2.0 * resolvent_value - 2.0 * mean * 2.0 * cross_first + 2.0 * cross_second


def _rel_diff(approx, exact):
    if exact == 0.0:
        return 0.0 if approx == 0.0 else math.inf
    return abs(approx - exact) / abs(exact)


@dataclass(frozen=True)
class PerturbationReport:
    """First-order corrections for one probe state and energy.

    ``alpha``/``beta``/``R_x``/``R_p`` include the coupling; the ``*_per_g``
    fields are the same quantities per unit g.  ``alpha_approx`` and
    ``beta_approx`` drop R (the mean-value shortcut) and are kept alongside.
    """

    g: float
    resolvent: ResolventSum
    norm: float
    norm_shift: float
    baseline_dx: float
    baseline_dp: float
    alpha: float
    beta: float
    R_x: float
    R_p: float
    corrected_dx: float
    corrected_dp: float
    alpha_approx: float
    beta_approx: float
    alpha_rel_diff: float
    beta_rel_diff: float
    alpha_per_g: float
    beta_per_g: float
    completeness_defect: float
    energy: float

    @property
    def norm_below_unity(self) -> bool:
        return self.norm_shift < 0

    @property
    def resolvent_value(self) -> float:
        return self.resolvent.value

    def to_dict(self) -> dict:
        d = asdict(self)
        res = d.pop("resolvent")
        d["resolvent_value"] = res["value"]
        d["resolvent_terms_used"] = res["terms_used"]
        d["resolvent_excluded_indices"] = list(res["excluded_indices"])
        d["resolvent_tail_estimate"] = res["tail_estimate"]
        d["norm_below_unity"] = self.norm_below_unity
        return d


def deviation_corrections(
    basis: SpectralBasis,
    probe: RadialState,
    E: float | None,
    potential_tail,
    system: TwoBodySystem,
    g: float | None = None,
    pass_threshold: float = 1e-3,
    fail_threshold: float = 1e-1,
) -> PerturbationReport:
    """All first-order corrections to the position/momentum spreads of an s-state.

    Parameters
    ----------
    basis : SpectralBasis
        Unperturbed eigenpairs. Closed-form probes are sampled onto grid bases.
    probe : RadialState
        The unperturbed state; an s-state, so <x> = <p_x> = 0 and the x/p_x
        matrix elements between s-states vanish.
    E : float or None
        Expansion energy (MeV); ``None`` uses :func:`probe_energy`.
    potential_tail : callable
        Unit tail U1(r) in MeV; the physical tail is ``g * U1``.
    system : TwoBodySystem
        Supplies hbar_c and, unless ``g`` is given, the coupling.
    g : float, optional
        Coupling override; must pass :func:`validate_smallness` with the given
        thresholds.
    """
    g = system.g if g is None else g
    diag = validate_smallness(g, None, pass_threshold, fail_threshold)
    if not diag.ok:
        raise PreconditionError(f"coupling g = {g!r} is not small (status {diag.status})")
    hbar_c = system.constants.hbar_c
    probe = _on_basis(basis, probe)
    if E is None:
        E = probe_energy(basis, probe)

    c = basis.elements(probe, IDENTITY)
    if potential_tail is None:
        u = np.zeros(len(basis))
    else:
        u = basis.elements(probe, potential_tail)
    x2 = basis.elements(probe, R2) / 3.0
    p2 = basis.elements(probe, P2, hbar_c) / 3.0
    tol = degeneracy_threshold(basis, E)

    res = primed_sum(c, u, basis.energies, E, tol)
    v = res.value
    cross_x2 = primed_sum(x2, u, basis.energies, E, tol).value
    cross_p2 = primed_sum(p2, u, basis.energies, E, tol).value

    dx2 = matrix_element(probe, probe, R2) / 3.0
    dp2 = matrix_element(probe, probe, P2, hbar_c) / 3.0
    # Odd operators between s-states vanish, so the means and first cross terms are 0.
    rx1 = deviation_second_moment_correction(0.0, 0.0, cross_x2, v)
    rp1 = deviation_second_moment_correction(0.0, 0.0, cross_p2, v)
    beta1 = -dx2 * 2.0 * v + rx1
    alpha1 = -dp2 * 2.0 * v + rp1
    beta, alpha = g * beta1, g * alpha1
    beta_approx = -2.0 * g * dx2 * v
    alpha_approx = -2.0 * g * dp2 * v

    cx2, cp2 = dx2 + beta, dp2 + alpha
    if cx2 < 0 or cp2 < 0:
        raise NumericError(
            "corrected variance is negative; coupling too large for first order",
            {"dx2": cx2, "dp2": cp2, "g": g},
        )
    nc = norm_correction(res, g)
    return PerturbationReport(
        g=g,
        resolvent=res,
        norm=nc.norm,
        norm_shift=nc.shift,
        baseline_dx=math.sqrt(dx2),
        baseline_dp=math.sqrt(dp2),
        alpha=alpha,
        beta=beta,
        R_x=g * rx1,
        R_p=g * rp1,
        corrected_dx=math.sqrt(cx2),
        corrected_dp=math.sqrt(cp2),
        alpha_approx=alpha_approx,
        beta_approx=beta_approx,
        alpha_rel_diff=_rel_diff(-2.0 * dp2 * v, alpha1),
        beta_rel_diff=_rel_diff(-2.0 * dx2 * v, beta1),
        alpha_per_g=alpha1,
        beta_per_g=beta1,
        completeness_defect=basis.completeness_defect(probe),
        energy=float(E),
    )

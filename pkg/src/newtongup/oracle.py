"""Nonperturbative checks of the first-order results.

Two full solutions are available on a finite-difference grid:

``driven``
    Solve (H0 + g U1 - E) psi = (H0 - E) phi for a fixed probe phi and energy
    E.  This is psi = phi + G_E (g U1) psi with the full resolvent, solved
    exactly, so its g -> 0 slope is what the first-order formulas claim to be.
    Requires E away from every eigenvalue of H0.
``eigen``
    Ground eigenpair of H0 + g U1.  With the probe equal to the unperturbed
    ground state and E = E0 the first-order formulas reduce to ordinary
    Rayleigh-Schroedinger theory, which this route checks.

Neither route uses the spectral sums of :mod:`newtongup.resolvent`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from newtongup.constants import TwoBodySystem
from newtongup.errors import DomainError, NumericError, PreconditionError, UnsupportedInputError
from newtongup.resolvent import PerturbationReport, deviation_corrections, probe_energy
from newtongup.spectra import (
    FOUR_PI,
    GRID,
    Grid,
    RadialState,
    ScaledSum,
    on_grid,
    radial_eigensolve,
    sample,
    zero_potential,
)

log = logging.getLogger(__name__)

QUANTITIES = ("norm", "dx2", "dp2")
ROUTES = ("driven", "eigen")
POINTS_PER_SCALE = 20


class ResolutionError(NumericError):
    pass


def check_resolution(grid: Grid, scales) -> None:
    """Require ``POINTS_PER_SCALE`` grid steps across the shortest physical scale."""
    scales = [s for s in scales if s and s > 0]
    if not scales:
        return
    shortest = min(scales)
    if grid.spacing > shortest / POINTS_PER_SCALE:
        needed = int(math.ceil(grid.r_max / (shortest / POINTS_PER_SCALE))) + 1
        raise ResolutionError(
            f"grid spacing {grid.spacing:.4g} fm does not resolve the {shortest:.4g} fm scale",
            {"spacing": grid.spacing, "shortest_scale": shortest, "required_points": needed},
        )


def _inner(grid, a, b):
    return FOUR_PI * grid.spacing * float(np.dot(a, b))


def _tridiagonal(grid, potential, system):
    k = system.kinetic_prefactor
    h = grid.spacing
    diag = 2.0 * k / h**2 + on_grid(potential, grid)
    off = np.full(grid.points - 3, -k / h**2)
    return diag, off


@dataclass(frozen=True)
class FullSolution:
    energy: float
    state: RadialState
    mean_x: float
    mean_x2: float
    mean_p2: float

    @property
    def dx(self) -> float:
        return math.sqrt(self.mean_x2 - self.mean_x**2)

    @property
    def dp(self) -> float:
        return math.sqrt(self.mean_p2)


def _moments(grid, u, hbar_c):
    r = grid.interior
    norm = _inner(grid, u, u)
    x2 = _inner(grid, u, r * r * u) / 3.0 / norm
    p2 = -(hbar_c**2) * _inner(grid, u, grid.laplacian(u)) / 3.0 / norm
    return x2, p2


def solve_full(
    system: TwoBodySystem,
    V: Callable,
    U_tail: Callable | None,
    g: float,
    grid: Grid,
    scales=(),
) -> FullSolution:
    """Ground state of H0 + g U1 on ``grid`` without any expansion in g."""
    check_resolution(grid, scales)
    U = U_tail if U_tail is not None else zero_potential
    basis = radial_eigensolve(ScaledSum(V, U, g), grid, 1, system)
    state = basis.states[0]
    x2, p2 = _moments(grid, state.grid_values, system.constants.hbar_c)
    return FullSolution(float(basis.energies[0]), state, 0.0, x2, p2)


@dataclass(frozen=True)
class OracleSetup:
    """Everything both the perturbative and the full route need."""

    system: TwoBodySystem
    V: Callable
    U_tail: Callable
    grid: Grid
    probe: RadialState | None = None  # None means the unperturbed ground state
    E: float | None = None
    basis_count: int | None = None
    scales: tuple = ()

    def basis(self):
        count = self.basis_count or (self.grid.points - 2)
        return radial_eigensolve(self.V, self.grid, count, self.system)


def _resolved_probe(setup, basis):
    if setup.probe is None:
        return basis.states[0]
    return sample(setup.probe, setup.grid) if setup.probe.kind != GRID else setup.probe


def perturbative_prediction(setup: OracleSetup, basis=None) -> PerturbationReport:
    """First-order report with g = 0, so only the per-unit-g fields carry information."""
    basis = basis or setup.basis()
    probe = _resolved_probe(setup, basis)
    E = setup.E if setup.E is not None else probe_energy(basis, probe)
    return deviation_corrections(basis, probe, E, setup.U_tail, setup.system, g=0.0)


def perturbative_slope(report: PerturbationReport, quantity: str) -> float:
    if quantity == "norm":
        return 2.0 * report.resolvent.value
    if quantity == "dx2":
        return report.beta_per_g
    if quantity == "dp2":
        return report.alpha_per_g
    raise UnsupportedInputError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def driven_changes(setup: OracleSetup, probe: RadialState, E: float, g: float) -> dict:
    """Q(g) - Q(0) for every quantity from the exact driven solution.

    The change is assembled from delta = psi - phi so no large numbers are
    subtracted.
    """
    grid = setup.grid
    hbar_c = setup.system.constants.hbar_c
    diag, off = _tridiagonal(grid, setup.V, setup.system)
    u1 = on_grid(setup.U_tail, grid)
    ab = np.zeros((3, len(diag)))
    ab[0, 1:] = off
    ab[1] = diag + g * u1 - E
    ab[2, :-1] = off
    phi = probe.grid_values
    try:
        delta = solve_banded((1, 1), ab, -g * u1 * phi)
    except (LinAlgError, ValueError) as exc:
        raise NumericError("driven solve failed", {"g": g, "E": E, "reason": str(exc)}) from exc
    r = grid.interior
    d_norm = 2.0 * _inner(grid, phi, delta) + _inner(grid, delta, delta)
    norm = _inner(grid, phi, phi) + d_norm
    out = {"norm": d_norm}
    ops = {
        "dx2": lambda v: r * r * v / 3.0,
        "dp2": lambda v: -(hbar_c**2) * grid.laplacian(v) / 3.0,
    }
    for name, op in ops.items():
        q0 = _inner(grid, phi, op(phi))

        def shifted(v, op=op, q0=q0):
            return op(v) - q0 * v

        num = _inner(grid, phi, shifted(phi)) + 2.0 * _inner(grid, phi, shifted(delta)) + _inner(
            grid, delta, shifted(delta)
        )
        out[name] = num / norm
    return out


def _baseline_values(setup, probe):
    grid = setup.grid
    x2, p2 = _moments(grid, probe.grid_values, setup.system.constants.hbar_c)
    return {"norm": _inner(grid, probe.grid_values, probe.grid_values), "dx2": x2, "dp2": p2}


def eigen_changes(setup: OracleSetup, ground: FullSolution, g: float) -> dict:
    full = solve_full(setup.system, setup.V, setup.U_tail, g, setup.grid)
    return {
        "dx2": full.mean_x2 - ground.mean_x2,
        "dp2": full.mean_p2 - ground.mean_p2,
    }


@dataclass
class SweepResult:
    g_values: list
    quantity_name: str
    full_values: list
    perturbative_slope: float
    fitted_slope: float
    residual_order: float
    route: str = "driven"
    baseline: float = 0.0
    changes: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    dropped: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def slope_rel_error(self) -> float:
        if self.perturbative_slope == 0:
            return 0.0 if self.fitted_slope == 0 else math.inf
        return abs(self.fitted_slope - self.perturbative_slope) / abs(self.perturbative_slope)

    def passes(self, slope_tolerance: float, order_range=(1.5, 2.5)) -> bool:
        return (
            self.slope_rel_error <= slope_tolerance
            and order_range[0] <= self.residual_order <= order_range[1]
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["slope_rel_error"] = self.slope_rel_error
        return d


def _validate_g_values(g_values):
    g = [float(x) for x in g_values]
    if not g or all(x == 0 for x in g):
        raise PreconditionError("a sweep needs non-zero couplings; the slope is undefined at g = 0 alone")
    if any(x <= 0 for x in g):
        raise PreconditionError("sweep couplings must be positive")
    if any(b >= a for a, b in zip(g, g[1:])):
        raise PreconditionError("sweep couplings must be strictly decreasing")
    if len(g) < 2 or g[0] / g[-1] < 100.0 * (1 - 1e-12):
        raise PreconditionError("sweep couplings must span at least two decades")
    return g


def linearity_sweep(
    setup: OracleSetup,
    quantity: str,
    g_values=(1e-3, 1e-4, 1e-5),
    route: str = "driven",
    basis=None,
) -> SweepResult:
    """Compare the first-order slope of ``quantity`` with a fit to full solutions.

    The fitted slope is the intercept of a straight-line fit of
    (Q(g) - Q(0)) / g against g.  ``residual_order`` is the log-log slope of
    |Q(g) - Q(0) - s g| with s the perturbative slope; a correct first-order
    slope leaves an O(g^2) remainder.
    """
    if quantity not in QUANTITIES:
        raise UnsupportedInputError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    if route not in ROUTES:
        raise UnsupportedInputError(f"unknown route {route!r}")
    g = _validate_g_values(g_values)
    check_resolution(setup.grid, setup.scales)
    basis = basis or setup.basis()
    notes = []

    if route == "driven":
        if setup.probe is None:
            raise UnsupportedInputError("the driven route needs a probe that is not an H0 eigenstate")
        probe = _resolved_probe(setup, basis)
        E = setup.E if setup.E is not None else probe_energy(basis, probe)
        full_spectrum = basis if len(basis) == setup.grid.points - 2 else radial_eigensolve(
            setup.V, setup.grid, setup.grid.points - 2, setup.system
        )
        gap = float(np.min(np.abs(full_spectrum.energies - E)))
        if gap < full_spectrum.degeneracy_tolerance * max(abs(E), 1.0):
            raise PreconditionError(
                f"E = {E!r} coincides with an eigenvalue of H0; use the eigen route"
            )
        report = perturbative_prediction(setup, basis)
        baseline = _baseline_values(setup, probe)[quantity]
        changes = [driven_changes(setup, probe, E, x)[quantity] for x in g]
    else:
        if setup.probe is not None:
            raise UnsupportedInputError("the eigen route uses the unperturbed ground state as probe")
        if quantity == "norm":
            raise UnsupportedInputError("for an eigenstate probe the first-order norm change is identically 0")
        report = perturbative_prediction(setup, basis)
        ground = solve_full(setup.system, setup.V, setup.U_tail, 0.0, setup.grid)
        baseline = {"dx2": ground.mean_x2, "dp2": ground.mean_p2}[quantity]
        changes = [eigen_changes(setup, ground, x)[quantity] for x in g]

    slope = perturbative_slope(report, quantity)
    floor = 1e3 * np.finfo(float).eps * abs(baseline)
    kept = []
    dropped = []
    for x, dq in zip(g, changes):
        if abs(dq) < floor:
            dropped.append(x)
            msg = f"g = {x:g} dropped: change {dq:.3g} is below the noise floor {floor:.3g}"
            log.info(msg)
            notes.append(msg)
        else:
            kept.append((x, dq))
    if not kept:
        raise NumericError("every coupling fell below the noise floor", {"floor": floor})
    gx = np.array([k[0] for k in kept])
    dq = np.array([k[1] for k in kept])
    if len(kept) >= 2:
        fitted = float(np.polyfit(gx, dq / gx, 1)[1])
    else:
        fitted = float(dq[0] / gx[0])
    residuals = dq - slope * gx
    nz = np.abs(residuals) > 0
    if np.count_nonzero(nz) >= 2:
        order = float(np.polyfit(np.log(gx[nz]), np.log(np.abs(residuals[nz])), 1)[0])
    else:
        order = math.nan
    mags = np.abs(residuals)
    if np.any(np.diff(mags) >= 0):
        msg = "residuals do not shrink with g: numeric noise floor reached"
        log.warning(msg)
        notes.append(msg)
    return SweepResult(
        g_values=g,
        quantity_name=quantity,
        full_values=[baseline + c for c in changes],
        perturbative_slope=slope,
        fitted_slope=fitted,
        residual_order=order,
        route=route,
        baseline=baseline,
        changes=list(map(float, changes)),
        residuals=residuals.tolist(),
        dropped=dropped,
        warnings=notes,
    )

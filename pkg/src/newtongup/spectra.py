"""Radial s-states, their matrix elements, and a finite-difference eigensolver.

Two families of states live here:

* closed forms (``hydrogenic-1s``, ``well-1s``, ``gaussian-s``) described by a
  decay constant, with matrix elements evaluated analytically where a closed
  form exists and by adaptive quadrature otherwise;
* ``grid`` states, sampled on a uniform radial grid as u(r) = r phi(r) with
  Dirichlet ends, whose matrix elements are plain weighted sums.

All states are s-waves.  Integrals are over d^3r, so a grid norm is
``4 pi h sum(u**2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate
from scipy.linalg import LinAlgError, eigh_tridiagonal

from newtongup.constants import TwoBodySystem
from newtongup.errors import (
    DomainError,
    IncompleteInputError,
    NumericError,
    PreconditionError,
    UnsupportedInputError,
)

HYDROGENIC = "hydrogenic-1s"
WELL = "well-1s"
GAUSSIAN = "gaussian-s"
GRID = "grid"
ANALYTIC_KINDS = (HYDROGENIC, WELL, GAUSSIAN)

IDENTITY = "identity"
R2 = "r2"
P2 = "p2"

NORM_TOLERANCE = 1e-10
QUAD_RTOL = 1e-12

FOUR_PI = 4.0 * math.pi

Operator = Union[str, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class Grid:
    """Uniform radial grid on [0, r_max] including both end points."""

    r_max: float
    points: int

    def __post_init__(self):
        if self.points < 3:
            raise DomainError(f"grid needs at least 3 points, got {self.points}")
        if not self.r_max > 0:
            raise DomainError(f"grid r_max must be positive, got {self.r_max!r}")

    @property
    def spacing(self) -> float:
        return self.r_max / (self.points - 1)

    @property
    def interior(self) -> np.ndarray:
        """Radii of the points where u is free (u(0) = u(r_max) = 0)."""
        return np.arange(1, self.points - 1) * self.spacing

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        """Three-point second derivative of interior samples with zero ends."""
        out = -2.0 * u
        out[1:] += u[:-1]
        out[:-1] += u[1:]
        return out / self.spacing**2


@dataclass(frozen=True, eq=False)
class CutoffCoulomb:
    """Radial potential ``strength * Theta(r - cutoff) / r``.

    With ``strength = -hbar_c`` this is the unit attractive tail; the physical
    tail is this times the coupling g.
    """

    strength: float
    cutoff: float = 0.0

    def __post_init__(self):
        if self.cutoff < 0:
            raise DomainError(f"cutoff radius must be non-negative, got {self.cutoff!r}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r >= self.cutoff, self.strength / r, 0.0)

    def cell_average(self, r, h):
        """Mean over [r - h/2, r + h/2]; exact, so the step costs no accuracy."""
        a = np.maximum(np.asarray(r, dtype=float) - 0.5 * h, self.cutoff)
        b = np.asarray(r, dtype=float) + 0.5 * h
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = np.where(b > a, np.log(b / a), 0.0)
        return self.strength * inside / h


@dataclass(frozen=True, eq=False)
class SquareWell:
    """Attractive well ``-depth`` for r < radius, zero outside."""

    depth: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError(f"well radius must be positive, got {self.radius!r}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.radius, -self.depth, 0.0)

    def cell_average(self, r, h):
        r = np.asarray(r, dtype=float)
        covered = np.clip(self.radius - (r - 0.5 * h), 0.0, h)
        return -self.depth * covered / h


@dataclass(frozen=True, eq=False)
class ScaledSum:
    """``V + g * U`` keeping cell averages when both terms provide them."""

    V: Callable
    U: Callable
    g: float

    def __call__(self, r):
        return np.asarray(self.V(r), dtype=float) + self.g * np.asarray(self.U(r), dtype=float)

    def cell_average(self, r, h):
        return on_grid_values(self.V, r, h) + self.g * on_grid_values(self.U, r, h)


def on_grid_values(potential: Callable, r, h) -> np.ndarray:
    """Potential on grid points: cell averages if available, else point samples."""
    if hasattr(potential, "cell_average"):
        return np.asarray(potential.cell_average(r, h), dtype=float)
    return np.asarray(potential(r), dtype=float)


def on_grid(potential: Callable, grid: Grid) -> np.ndarray:
    """Potential as the finite-difference Hamiltonian sees it on ``grid``.

    Steps (well edge, tail cutoff) are averaged over each cell; point sampling
    there would make the whole scheme first order in the spacing.
    """
    return on_grid_values(potential, grid.interior, grid.spacing)


def zero_potential(r):
    return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True, eq=False)
class RadialState:
    """A normalized s-state.

    ``kappa`` is the decay constant of the exponential kinds and ``width`` the
    Gaussian width.  ``energy`` is attached when it is meaningful (eigenstates,
    or the hydrogenic -(hbar kappa)^2/2m convention); it may be ``None``.
    """

    kind: str
    kappa: float | None = None
    energy: float | None = None
    width: float | None = None
    index: int | None = None
    grid: Grid | None = None
    grid_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind in (HYDROGENIC, WELL) and not (self.kappa and self.kappa > 0):
            raise DomainError(f"{self.kind} state needs kappa > 0, got {self.kappa!r}")
        if self.kind == GAUSSIAN and not (self.width and self.width > 0):
            raise DomainError(f"gaussian state needs width > 0, got {self.width!r}")
        if self.kind == GRID and (self.grid is None or self.grid_values is None):
            raise DomainError("grid state needs a grid and sampled values")
        if self.kind not in ANALYTIC_KINDS + (GRID,):
            raise DomainError(f"unknown state kind {self.kind!r}")

    @property
    def is_analytic(self) -> bool:
        return self.kind in ANALYTIC_KINDS

    @property
    def decay_rate(self) -> float:
        """Inverse length setting the scale of the state (for quadrature)."""
        if self.kind == GAUSSIAN:
            return 1.0 / self.width
        if self.kind == GRID:
            raise UnsupportedInputError("grid states have no decay rate")
        return self.kappa

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        k = self.kappa
        if self.kind == HYDROGENIC:
            return math.sqrt(k**3 / math.pi) * np.exp(-k * r)
        if self.kind == WELL:
            return math.sqrt(k / (2.0 * math.pi)) * np.exp(-k * r) / r
        if self.kind == GAUSSIAN:
            s = self.width
            return (math.pi * s * s) ** -0.75 * np.exp(-0.5 * (r / s) ** 2)
        raise UnsupportedInputError("phi(r) is only defined for closed-form states")

    def dphi(self, r):
        """Radial derivative d(phi)/dr."""
        r = np.asarray(r, dtype=float)
        k = self.kappa
        if self.kind == HYDROGENIC:
            return -k * self.phi(r)
        if self.kind == WELL:
            return -math.sqrt(k / (2.0 * math.pi)) * np.exp(-k * r) * (k * r + 1.0) / r**2
        if self.kind == GAUSSIAN:
            return -r / self.width**2 * self.phi(r)
        raise UnsupportedInputError("dphi(r) is only defined for closed-form states")

    def norm(self) -> float:
        """Integral of |phi|^2 over all space."""
        if self.kind == GRID:
            u = self.grid_values
            return FOUR_PI * self.grid.spacing * float(np.dot(u, u))
        # Closed forms are normalized by construction.
        return 1.0


def _system_energy(kappa, system):
    if system is None:
        return None
    return -((system.constants.hbar_c * kappa) ** 2) / (2.0 * system.reduced_mass)


def hydrogenic_1s(kappa: float, system: TwoBodySystem | None = None) -> RadialState:
    """phi(r) = sqrt(kappa^3/pi) exp(-kappa r); E = -(hbar kappa)^2/2m if a system is given."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa!r}")
    return RadialState(HYDROGENIC, kappa=kappa, energy=_system_energy(kappa, system))


def well_1s(n: int, R: float, system: TwoBodySystem | None = None) -> RadialState:
    """Closed-form stand-in for the n-th square-well state of radius ``R``.

    phi_n(r) = sqrt(kappa_n / 2 pi) exp(-kappa_n r) / r with
    kappa_n = (pi/2) n / R.
    """
    if n < 1:
        raise DomainError(f"well state index must be >= 1, got {n!r}")
    if not R > 0:
        raise DomainError(f"well radius must be positive, got {R!r}")
    kappa = 0.5 * math.pi * n / R
    return RadialState(WELL, kappa=kappa, energy=_system_energy(kappa, system), index=n)


def gaussian_s(width: float) -> RadialState:
    """Isotropic Gaussian (pi s^2)^(-3/4) exp(-r^2 / 2 s^2); saturates dx dp = hbar/2."""
    if not width > 0:
        raise DomainError(f"width must be positive, got {width!r}")
    return RadialState(GAUSSIAN, width=width)


def grid_state(grid: Grid, values: np.ndarray, energy=None, index=None, normalize=False) -> RadialState:
    """Wrap interior samples of u(r) = r phi(r) as a state."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.points - 2,):
        raise DomainError(
            f"expected {grid.points - 2} interior samples, got shape {values.shape}"
        )
    if normalize:
        n = FOUR_PI * grid.spacing * float(np.dot(values, values))
        if not n > 0:
            raise DomainError("cannot normalize a vanishing state")
        values = values / math.sqrt(n)
    return RadialState(GRID, energy=energy, index=index, grid=grid, grid_values=values)


def sample(state: RadialState, grid: Grid) -> RadialState:
    """Sample a closed-form state onto ``grid`` and renormalize by quadrature."""
    if state.kind == GRID:
        if state.grid != grid:
            raise UnsupportedInputError("resampling between grids is not supported")
        return state
    r = grid.interior
    return grid_state(grid, r * state.phi(r), energy=state.energy, index=state.index, normalize=True)


def _check_normalized(state: RadialState):
    n = state.norm()
    if abs(n - 1.0) > NORM_TOLERANCE:
        raise PreconditionError(f"state is not normalized (norm = {n!r})")


# --------------------------------------------------------------------------
# closed-form matrix elements

def _pair(a, b, kind_a, kind_b):
    if a.kind == kind_a and b.kind == kind_b:
        return a, b
    if a.kind == kind_b and b.kind == kind_a:
        return b, a
    return None


def _closed_overlap(a, b):
    if a.kind == HYDROGENIC and b.kind == HYDROGENIC:
        ka, kb = a.kappa, b.kappa
        return 8.0 * (ka * kb) ** 1.5 / (ka + kb) ** 3
    if a.kind == WELL and b.kind == WELL:
        ka, kb = a.kappa, b.kappa
        return 2.0 * math.sqrt(ka * kb) / (ka + kb)
    pair = _pair(a, b, HYDROGENIC, WELL)
    if pair:
        h, w = pair
        k, kn = h.kappa, w.kappa
        return math.sqrt(kn / (2.0 * math.pi)) * math.sqrt(k**3 / math.pi) * FOUR_PI / (k + kn) ** 2
    return None


def _closed_cutoff_inverse_r(a, b, R):
    if a.kind == HYDROGENIC and b.kind == HYDROGENIC:
        ka, kb = a.kappa, b.kappa
        s = ka + kb
        return 4.0 * (ka * kb) ** 1.5 * math.exp(-s * R) * (R / s + 1.0 / s**2)
    pair = _pair(a, b, HYDROGENIC, WELL)
    if pair:
        h, w = pair
        k, kn = h.kappa, w.kappa
        s = k + kn
        return math.sqrt(kn / (2.0 * math.pi)) * math.sqrt(k**3 / math.pi) * FOUR_PI * math.exp(-s * R) / s
    return None


# --------------------------------------------------------------------------
# quadrature

def radial_quad(integrand, lower, rate, upper=math.inf):
    """Integrate ``integrand(r)`` over [lower, upper) in the scaled variable t = rate r.

    Raises :class:`NumericError` when quad reports a problem instead of
    silently returning a poor value.
    """

    def scaled(t):
        return float(integrand(t / rate)) / rate

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(
                scaled, lower * rate, upper * rate, epsabs=0.0, epsrel=QUAD_RTOL, limit=400
            )
        except integrate.IntegrationWarning as exc:
            raise NumericError(
                "radial quadrature did not converge",
                {"lower": lower, "rate": rate, "reason": str(exc)},
            ) from exc
    return value


def _quad_element(a, b, op, lower=0.0):
    rate = a.decay_rate + b.decay_rate
    if op == P2:
        def f(r):
            return FOUR_PI * r * r * a.dphi(r) * b.dphi(r)
    else:
        weight = _weight_function(op)

        def f(r):
            return FOUR_PI * r * r * a.phi(r) * weight(r) * b.phi(r)

    return radial_quad(f, lower, rate)


def _weight_function(op):
    if op == IDENTITY:
        return lambda r: 1.0
    if op == R2:
        return lambda r: r * r
    if callable(op):
        return op
    raise UnsupportedInputError(f"unknown operator {op!r}")


def quadrature_element(a: RadialState, b: RadialState, op: Operator = IDENTITY, hbar_c=None) -> float:
    """Matrix element <a|op|b> of two closed-form states by quadrature only.

    ``op`` is ``IDENTITY``, ``R2``, ``P2`` or a radial function f(r).  For
    ``P2`` the result is in MeV^2 and needs ``hbar_c``; otherwise ``hbar_c`` is
    ignored.
    """
    if not (a.is_analytic and b.is_analytic):
        raise UnsupportedInputError("quadrature_element needs closed-form states")
    lower = op.cutoff if isinstance(op, CutoffCoulomb) else 0.0
    value = _quad_element(a, b, op, lower)
    if op == P2:
        value *= _need_hbar_c(hbar_c) ** 2
    return value


def _need_hbar_c(hbar_c):
    if hbar_c is None:
        raise IncompleteInputError("p^2 matrix elements need hbar_c")
    return hbar_c


def _grid_apply(grid: Grid, u: np.ndarray, op: Operator, hbar_c=None) -> np.ndarray:
    if op == IDENTITY:
        return u
    r = grid.interior
    if op == R2:
        return r * r * u
    if op == P2:
        return -(_need_hbar_c(hbar_c) ** 2) * grid.laplacian(u)
    if callable(op):
        return on_grid(op, grid) * u
    raise UnsupportedInputError(f"unknown operator {op!r}")


def matrix_element(a: RadialState, b: RadialState, op: Operator = IDENTITY, hbar_c=None) -> float:
    """<a|op|b> for two states of the same family.

    Closed forms are used for the overlap and cutoff-1/r elements of
    hydrogenic/well pairs; everything else goes through quadrature (closed
    forms) or weighted sums (grid).
    """
    if a.kind == GRID or b.kind == GRID:
        if a.kind != GRID or b.kind != GRID or a.grid != b.grid:
            raise UnsupportedInputError(
                "grid states can only be paired with grid states on the same grid; "
                "sample closed forms first"
            )
        grid = a.grid
        return FOUR_PI * grid.spacing * float(np.dot(a.grid_values, _grid_apply(grid, b.grid_values, op, hbar_c)))
    if op == IDENTITY:
        closed = _closed_overlap(a, b)
        if closed is not None:
            return closed
    if isinstance(op, CutoffCoulomb):
        closed = _closed_cutoff_inverse_r(a, b, op.cutoff)
        if closed is not None:
            return op.strength * closed
    return quadrature_element(a, b, op, hbar_c)


def overlap(a: RadialState, b: RadialState) -> float:
    """<a|b> of two normalized states."""
    _check_normalized(a)
    _check_normalized(b)
    return matrix_element(a, b, IDENTITY)


def matrix_element_cutoff_inverse_r(a: RadialState, b: RadialState, R: float) -> float:
    """<a| Theta(r - R)/r |b> in fm^-1."""
    if R < 0:
        raise DomainError(f"cutoff radius must be non-negative, got {R!r}")
    _check_normalized(a)
    _check_normalized(b)
    if math.isinf(R):
        return 0.0
    return matrix_element(a, b, CutoffCoulomb(1.0, R))


def second_moment(state: RadialState) -> float:
    """<r^2> over the state."""
    return matrix_element(state, state, R2)


def kinetic_moment(state: RadialState, hbar_c: float) -> float:
    """<p^2> = hbar^2 Int |grad phi|^2 d^3r, in MeV^2."""
    return matrix_element(state, state, P2, hbar_c)


# --------------------------------------------------------------------------
# bases

@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Ordered eigenpairs (E_n, phi_n) of an unperturbed Hamiltonian.

    Grid bases keep the sampled eigenvectors as columns of ``vectors`` so
    that matrix elements against a probe are one matrix-vector product.
    """

    energies: np.ndarray
    states: tuple
    truncation_n: int
    degeneracy_tolerance: float = 1e-9
    grid: Grid | None = None
    vectors: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or len(e) != len(self.states) or len(e) == 0:
            raise DomainError("basis needs one energy per state and at least one pair")
        if np.any(np.diff(e) <= 0):
            raise DomainError("basis energies must be strictly increasing")

    @property
    def pairs(self):
        return list(zip(self.energies.tolist(), self.states))

    def __len__(self):
        return len(self.states)

    def elements(self, probe: RadialState, op: Operator = IDENTITY, hbar_c=None) -> np.ndarray:
        """Array of <phi_n|op|probe> for every basis state, in basis order."""
        if self.vectors is not None:
            if probe.kind != GRID or probe.grid != self.grid:
                raise UnsupportedInputError("probe must be sampled on the basis grid")
            w = _grid_apply(self.grid, probe.grid_values, op, hbar_c)
            return FOUR_PI * self.grid.spacing * (self.vectors.T @ w)
        return np.array([matrix_element(s, probe, op, hbar_c) for s in self.states])

    def completeness_defect(self, probe: RadialState) -> float:
        """|1 - sum_n |<phi_n|probe>|^2|."""
        c = self.elements(probe)
        return abs(1.0 - math.fsum(c * c))

    def orthonormality_error(self) -> float:
        """max |<phi_n|phi_n'> - delta_nn'| over the basis."""
        if self.vectors is not None:
            gram = FOUR_PI * self.grid.spacing * (self.vectors.T @ self.vectors)
        else:
            gram = np.array([[matrix_element(a, b) for b in self.states] for a in self.states])
        return float(np.max(np.abs(gram - np.eye(len(self.states)))))


def analytic_basis(states: Sequence[RadialState], degeneracy_tolerance=1e-9) -> SpectralBasis:
    """Basis from closed-form states with attached energies, sorted by energy."""
    if any(s.energy is None for s in states):
        raise DomainError("every basis state needs an energy")
    ordered = sorted(states, key=lambda s: s.energy)
    energies = np.array([s.energy for s in ordered])
    return SpectralBasis(energies, tuple(ordered), len(ordered), degeneracy_tolerance)


def radial_eigensolve(
    potential: Callable,
    grid: Grid,
    count: int,
    system: TwoBodySystem,
    degeneracy_tolerance: float = 1e-9,
) -> SpectralBasis:
    """Lowest ``count`` s-wave eigenpairs of -(hbar^2/2m) u'' + V u = E u.

    Symmetric three-point finite differences with u(0) = u(r_max) = 0.
    Eigenvectors are returned normalized over d^3r with the sign fixed so the
    largest-magnitude sample is positive.
    """
    n_int = grid.points - 2
    if not 1 <= count <= n_int:
        raise DomainError(f"count must be in [1, {n_int}], got {count}")
    v = on_grid(potential, grid)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential must be finite on the grid interior")
    k = system.kinetic_prefactor
    h = grid.spacing
    diag = 2.0 * k / h**2 + v
    off = np.full(n_int - 1, -k / h**2)
    try:
        energies, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, count - 1), check_finite=True
        )
    except (LinAlgError, ValueError) as exc:
        raise NumericError(
            "tridiagonal eigensolver failed",
            {"points": grid.points, "r_max": grid.r_max, "count": count, "reason": str(exc)},
        ) from exc
    peak = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[peak, np.arange(vecs.shape[1])])
    vecs = vecs * signs / math.sqrt(FOUR_PI * h)
    states = tuple(
        RadialState(GRID, energy=float(energies[i]), index=i + 1, grid=grid, grid_values=vecs[:, i])
        for i in range(count)
    )
    return SpectralBasis(energies, states, count, degeneracy_tolerance, grid=grid, vectors=vecs)


def hamiltonian_apply(grid: Grid, potential: Callable, system: TwoBodySystem, u: np.ndarray) -> np.ndarray:
    """H0 acting on interior samples, consistent with :func:`radial_eigensolve`."""
    return -system.kinetic_prefactor * grid.laplacian(u) + on_grid(potential, grid) * u

"""Scenario execution: constants -> spectra -> resolvent -> gup (-> coulomb).

Reports are deterministic: keys are sorted, floats are written with
``repr`` (shortest round-trip form), non-finite values become the strings
``"inf"``, ``"-inf"`` and ``"nan"``, and nothing depends on the time, the
host, or where the scenario file lives.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from newtongup import __version__
from newtongup.constants import validate_smallness
from newtongup.coulomb import (
    SWEEP_COLUMNS,
    ApproximationDomainError,
    beta_from_gamma,
    coulomb_basis,
    coulomb_probe,
    coulomb_sweep,
    gamma_approx,
    gamma_closed_form,
    gamma_upper_bound,
)
from newtongup.errors import PreconditionError, UnsupportedInputError
from newtongup.gup import GupReport, dx_lower_bound, gup_report
from newtongup.oracle import OracleSetup, linearity_sweep
from newtongup.resolvent import PerturbationReport, deviation_corrections, probe_energy
from newtongup.scenario import COULOMB, Scenario, load
from newtongup.spectra import radial_eigensolve, sample

log = logging.getLogger(__name__)

PLOT_COLUMNS = ("dp_over_hbar", "dx_bound")
GUP_COLUMNS = tuple(f.name for f in fields(GupReport))

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def clean(value):
    """Make ``value`` JSON-safe and platform-independent."""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


def dumps(obj) -> str:
    return json.dumps(clean(obj), sort_keys=True, indent=2) + "\n"


def _cell(value):
    value = clean(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


@dataclass
class RunResult:
    scenario: Scenario
    perturbation: PerturbationReport
    gup: GupReport
    report: dict
    plot_rows: list
    sweep_rows: list | None = None

    def report_json(self) -> str:
        return dumps(self.report)

    def gup_csv(self) -> str:
        return csv_text(GUP_COLUMNS, [self.gup.to_dict()])

    def perturbation_csv(self) -> str:
        d = self.perturbation.to_dict()
        return csv_text(("field", "value"), [{"field": k, "value": d[k]} for k in sorted(d)])

    def plot_csv(self) -> str:
        return csv_text(PLOT_COLUMNS, self.plot_rows)

    def sweep_csv(self) -> str | None:
        if self.sweep_rows is None:
            return None
        return csv_text(SWEEP_COLUMNS, self.sweep_rows)

    def artifacts(self) -> dict:
        """File name -> text for every artifact of this run."""
        out = {
            "report.json": self.report_json(),
            "perturbation.csv": self.perturbation_csv(),
            "gup.csv": self.gup_csv(),
            "gup_curve.csv": self.plot_csv(),
        }
        sweep = self.sweep_csv()
        if sweep is not None:
            out["coulomb_sweep.csv"] = sweep
        return out


def _smallness(sc: Scenario, system):
    diag = validate_smallness(
        system.g,
        system,
        sc.get("smallness.pass_threshold"),
        sc.get("smallness.fail_threshold"),
    )
    if not diag.ok:
        raise PreconditionError(
            f"coupling g = {system.g!r} violates g << 1 (status {diag.status}); "
            "perturbation theory does not apply"
        )
    if diag.status != "pass":
        log.warning("coupling g = %r is only marginally small (status %s)", system.g, diag.status)
    return diag


def curve_rows(beta_prime_value, constants, k_low, k_high, points):
    ks = np.geomspace(k_low, k_high, points)
    return [{"dp_over_hbar": float(k), "dx_bound": dx_lower_bound(float(k), beta_prime_value, constants)} for k in ks]


def _plot(sc, pert, gup, constants):
    # beta' is undefined for a static partner; fall back to the beta' implied by beta.
    if math.isfinite(gup.beta_prime):
        bp = gup.beta_prime
    else:
        beta = pert.beta_approx if gup.coefficients == "approx" else pert.beta
        bp = 2.0 * beta / constants.planck_length**2
    dx = pert.corrected_dx
    k_high = 100.0 / gup.l_min if gup.has_min_length else 100.0 / dx
    return curve_rows(bp, constants, 0.01 / dx, k_high, sc.get("plot.points"))


def _gravity(sc: Scenario):
    system = sc.system()
    diag = _smallness(sc, system)
    grid = sc.grid()
    basis = radial_eigensolve(sc.potential(), grid, sc.basis_count(), system)
    probe = sc.probe()
    probe = basis.states[0] if probe is None else sample(probe, grid)
    E = sc.energy()
    if E is None:
        E = probe_energy(basis, probe)
    pert = deviation_corrections(
        basis, probe, E, sc.unit_tail(), system, None,
        sc.get("smallness.pass_threshold"), sc.get("smallness.fail_threshold"),
    )
    hygiene = {
        "basis_size": len(basis),
        "orthonormality_error": basis.orthonormality_error(),
        "completeness_defect": pert.completeness_defect,
    }
    return system, diag, pert, hygiene, None, None


def _coulomb(sc: Scenario):
    hl = sc.hydrogen_like()
    system = hl.system
    diag = _smallness(sc, system)
    basis = coulomb_basis(hl, sc.get("coulomb.basis_count"))
    probe = coulomb_probe(hl)
    pert = deviation_corrections(
        basis, probe, probe.energy, hl.unit_tail(), system, None,
        sc.get("smallness.pass_threshold"), sc.get("smallness.fail_threshold"),
    )
    gamma = -system.g * pert.resolvent.value
    try:
        approx = gamma_approx(hl)
    except ApproximationDomainError as exc:
        log.warning("%s", exc)
        approx = math.nan
    z_max = sc.get("coulomb.z_max")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bound = gamma_upper_bound(z_max, hl.nu, hl.R, hl.a)
        sweep = coulomb_sweep(z_max, hl.nu, hl.R, hl.a, sc.get("coulomb.basis_count"))
    section = {
        "Z": hl.Z,
        "nu": hl.nu,
        "R_fm": hl.R,
        "a_fm": hl.a,
        "kappa_fm_inv": hl.kappa,
        "lambda": hl.lam,
        "electron_mass_mev": hl.electron_mass,
        "gamma_exact": gamma,
        "gamma_closed_form": gamma_closed_form(hl, sc.get("coulomb.basis_count")),
        "gamma_approx": approx,
        "beta_fm2": beta_from_gamma(gamma, system.lambda_m),
        "upper_bound": asdict(bound),
    }
    hygiene = {
        "basis_size": len(basis),
        "orthonormality_error": basis.orthonormality_error(),
        "completeness_defect": pert.completeness_defect,
    }
    return system, diag, pert, hygiene, section, sweep


def execute(sc: Scenario) -> RunResult:
    """Run a validated scenario and assemble every artifact in memory."""
    if sc.mode == COULOMB:
        system, diag, pert, hygiene, coulomb_section, sweep = _coulomb(sc)
    else:
        system, diag, pert, hygiene, coulomb_section, sweep = _gravity(sc)
    constants = system.constants
    gup = gup_report(
        pert,
        system,
        sc.get("gup.coefficients"),
        sc.get("gup.qm_threshold"),
        (sc.get("gup.qg_low"), sc.get("gup.qg_high")),
    )
    if pert.norm_shift > 0:
        log.warning("norm correction is not negative (shift %r): flagged", pert.norm_shift)
    report = {
        "version": __version__,
        "scenario": {
            "name": sc.name,
            "mode": sc.mode,
            "sha256": sc.digest,
            "inputs": sc.resolved(),
        },
        "constants": constants.as_dict(),
        "system": system.as_dict(),
        "smallness": asdict(diag),
        "perturbation": pert.to_dict(),
        "gup": gup.to_dict(),
        "hygiene": hygiene,
        "checks": {
            "norm_below_unity": pert.norm_below_unity,
            "norm_flag": "ok" if pert.norm_below_unity or pert.norm_shift == 0 else "counterexample",
            "bound_satisfied": gup.bound_satisfied,
        },
    }
    if coulomb_section is not None:
        report["coulomb"] = coulomb_section
    return RunResult(sc, pert, gup, report, _plot(sc, pert, gup, constants), sweep)


def write_artifacts(result: RunResult, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in result.artifacts().items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def run_scenario(path, out_dir=None):
    """Load, execute and (optionally) write a scenario; returns the result."""
    result = execute(load(path))
    if out_dir is not None:
        write_artifacts(result, out_dir)
    return result


def oracle_setup(sc: Scenario) -> OracleSetup:
    if sc.mode == COULOMB:
        raise UnsupportedInputError("the oracle needs a grid scenario (mode = gravity)")
    return OracleSetup(
        system=sc.system(),
        V=sc.potential(),
        U_tail=sc.unit_tail(),
        grid=sc.grid(),
        probe=sc.probe(),
        E=sc.energy(),
        basis_count=sc.basis_count(),
        scales=sc.length_scales(),
    )


def oracle_sweeps(sc: Scenario, quantities=None, g_values=None, route=None) -> list:
    setup = oracle_setup(sc)
    route = route or ("eigen" if setup.probe is None else "driven")
    quantities = quantities or sc.get("oracle.quantities")
    if route == "eigen":
        quantities = [q for q in quantities if q != "norm"] or quantities
    g_values = g_values or sc.get("oracle.g_values")
    basis = setup.basis()
    return [linearity_sweep(setup, q, g_values, route, basis) for q in quantities]

"""Command line interface.

Exit codes: 0 ok, 1 oracle invariant failed, 2 input or validation error
(including a coupling that is not small), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from newtongup import __version__
from newtongup.constants import CODATA, EV_PER_MEV
from newtongup.coulomb import (
    DEFAULT_BASIS_COUNT,
    DEFAULT_BOHR_RADIUS,
    DEFAULT_NUCLEAR_RADIUS,
    SWEEP_COLUMNS,
    HydrogenLikeScenario,
    coulomb_sweep,
    gamma_approx,
    gamma_exact,
)
from newtongup.errors import GupError, NumericError
from newtongup.gup import large_distance_estimate, mass_for_large_distance
from newtongup.pipeline import (
    EXIT_INPUT,
    EXIT_INVARIANT,
    EXIT_NUMERIC,
    EXIT_OK,
    GUP_COLUMNS,
    csv_text,
    dumps,
    execute,
    oracle_sweeps,
    write_artifacts,
)
from newtongup.scenario import bundled, bundled_names, load

log = logging.getLogger("newtongup")

SLOPE_TOLERANCE = {"norm": 0.01, "dx2": 0.05, "dp2": 0.05}
ORDER_RANGE = (1.5, 2.5)


def _scenario(arg):
    """A file path, or the name of a bundled scenario."""
    p = Path(arg)
    if not p.exists():
        candidate = bundled(arg)
        if candidate.exists():
            p = candidate
    return load(p)


def _inverse_mass(dx_cm, l_min):
    m = mass_for_large_distance(dx_cm, l_min)
    return {"dx_cm": dx_cm, "l_min_fm": l_min, "mass_mev": m, "mass_ev": m * EV_PER_MEV}


def cmd_run(args, out):
    result = execute(_scenario(args.scenario))
    if args.out:
        for path in write_artifacts(result, args.out):
            out.write(f"{path}\n")
    else:
        out.write(result.report_json())
    return EXIT_OK


def cmd_gup_report(args, out):
    result = execute(_scenario(args.scenario))
    gup = result.gup.to_dict()
    inverse = None
    if args.inverse_mass is not None:
        l_min = args.l_min_fm or (result.gup.l_min if result.gup.has_min_length else CODATA.planck_length)
        inverse = _inverse_mass(args.inverse_mass, l_min)
    if args.format == "json":
        payload = {"gup": gup, "scenario": result.report["scenario"]["name"]}
        if inverse:
            payload["inverse_mass"] = inverse
        out.write(dumps(payload))
    else:
        columns = GUP_COLUMNS
        row = dict(gup)
        if inverse:
            extra = {f"inverse_{k}": v for k, v in inverse.items()}
            columns = columns + tuple(extra)
            row.update(extra)
        out.write(csv_text(columns, [row]))
    return EXIT_OK


def cmd_gup_estimate(args, out):
    l_min = args.l_min_fm or CODATA.planck_length
    if args.mass_mev is not None:
        payload = {
            "mass_mev": args.mass_mev,
            "l_min_fm": l_min,
            "dx_cm": large_distance_estimate(args.mass_mev, l_min),
        }
    else:
        payload = _inverse_mass(args.distance_cm, l_min)
    out.write(dumps(payload))
    return EXIT_OK


def cmd_resolvent_report(args, out):
    result = execute(_scenario(args.scenario))
    d = result.perturbation.to_dict()
    if args.format == "json":
        out.write(dumps(d))
    else:
        out.write(result.perturbation_csv())
    return EXIT_OK


def cmd_coulomb_gamma(args, out):
    sc = HydrogenLikeScenario(args.Z, args.nu, args.R_fm, args.a_fm)
    if args.approx:
        method, value = "approx", gamma_approx(sc)
    else:
        method, value = "exact", gamma_exact(sc, args.basis_count)
    if args.format == "json":
        out.write(dumps({"Z": args.Z, "nu": args.nu, "R_fm": args.R_fm, "a_fm": args.a_fm,
                         "method": method, "gamma": value, "lambda": sc.lam}))
    else:
        out.write(f"{value!r}\n")
    return EXIT_OK


def cmd_coulomb_sweep(args, out):
    rows = coulomb_sweep(args.z_max, args.nu, args.R_fm, args.a_fm, args.basis_count)
    out.write(csv_text(SWEEP_COLUMNS, rows))
    return EXIT_OK


def cmd_oracle_verify(args, out):
    sc = _scenario(args.scenario)
    quantities = [args.quantity] if args.quantity else None
    g_values = [float(x) for x in args.g_values.split(",")] if args.g_values else None
    sweeps = oracle_sweeps(sc, quantities, g_values, args.route)
    results = []
    ok = True
    for s in sweeps:
        passed = s.passes(SLOPE_TOLERANCE[s.quantity_name], ORDER_RANGE)
        ok = ok and passed
        d = s.to_dict()
        d["passed"] = passed
        d["slope_tolerance"] = SLOPE_TOLERANCE[s.quantity_name]
        d["order_range"] = list(ORDER_RANGE)
        results.append(d)
    out.write(dumps({"scenario": sc.name, "sha256": sc.digest, "passed": ok, "sweeps": results}))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_scenario_validate(args, out):
    sc = load(args.file)
    out.write(f"ok: {sc.name} (mode {sc.mode}, sha256 {sc.digest[:12]})\n")
    return EXIT_OK


def cmd_scenario_list(args, out):
    for name in bundled_names():
        out.write(f"{name}\n")
    return EXIT_OK


def _hydrogen_args(p):
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--R-fm", dest="R_fm", type=float, default=DEFAULT_NUCLEAR_RADIUS)
    p.add_argument("--a-fm", dest="a_fm", type=float, default=DEFAULT_BOHR_RADIUS)
    p.add_argument("--basis-count", type=int, default=DEFAULT_BASIS_COUNT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newtongup", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and emit every artifact")
    p.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p.add_argument("--out", help="output directory (default: report JSON to stdout)")
    p.set_defaults(func=cmd_run)

    gup = sub.add_parser("gup", help="uncertainty-relation reports").add_subparsers(dest="action", required=True)
    p = gup.add_parser("report", help="GUP report for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--inverse-mass", type=float, metavar="DX_CM",
                   help="also give the mass whose spread reaches DX_CM")
    p.add_argument("--l-min-fm", type=float, help="l_min for --inverse-mass (default: the report's)")
    p.set_defaults(func=cmd_gup_report)
    p = gup.add_parser("estimate", help="large-distance spread for a mass, or the inverse")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mass-mev", type=float)
    g.add_argument("--distance-cm", type=float)
    p.add_argument("--l-min-fm", type=float, help="default: the Planck length")
    p.set_defaults(func=cmd_gup_estimate)

    res = sub.add_parser("resolvent", help="first-order corrections").add_subparsers(dest="action", required=True)
    p = res.add_parser("report")
    p.add_argument("--scenario", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_resolvent_report)

    cou = sub.add_parser("coulomb", help="hydrogen-like atom estimates").add_subparsers(dest="action", required=True)
    p = cou.add_parser("gamma", help="norm-correction addition for one Z")
    p.add_argument("--Z", type=int, required=True)
    _hydrogen_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="sum over the basis (default)")
    g.add_argument("--approx", action="store_true", help="small-lambda closed form")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_coulomb_gamma)
    p = cou.add_parser("sweep", help="CSV table over Z = 1..z_max")
    p.add_argument("--z-max", type=int, default=10)
    _hydrogen_args(p)
    p.set_defaults(func=cmd_coulomb_sweep)

    orc = sub.add_parser("oracle", help="nonperturbative checks").add_subparsers(dest="action", required=True)
    p = orc.add_parser("verify")
    p.add_argument("--scenario", required=True)
    p.add_argument("--quantity", choices=tuple(SLOPE_TOLERANCE))
    p.add_argument("--route", choices=("driven", "eigen"))
    p.add_argument("--g-values", help="comma-separated couplings (default: from the scenario)")
    p.set_defaults(func=cmd_oracle_verify)

    scn = sub.add_parser("scenario", help="scenario files").add_subparsers(dest="action", required=True)
    p = scn.add_parser("validate")
    p.add_argument("file")
    p.set_defaults(func=cmd_scenario_validate)
    p = scn.add_parser("list", help="bundled scenarios")
    p.set_defaults(func=cmd_scenario_list)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args, out)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for k in sorted(exc.diagnostics):
            print(f"  {k} = {exc.diagnostics[k]!r}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GupError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

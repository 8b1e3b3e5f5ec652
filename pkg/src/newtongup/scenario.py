"""Scenario files: flat ``dotted.key = value`` text.

Grammar, one entry per line::

    # comment (also allowed after a value)
    mode = gravity
    system.m1_mev = 938.272
    oracle.g_values = 1e-3, 1e-4, 1e-5

Blank lines are ignored, keys may appear once, and unknown keys are rejected
with the line they appear on.  Floats accept ``inf``.  See ``KEYS`` for the
full list with defaults.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from newtongup.constants import PhysicalConstants, TwoBodySystem
from newtongup.coulomb import HydrogenLikeScenario
from newtongup.errors import DomainError, ScenarioError
from newtongup.spectra import (
    CutoffCoulomb,
    Grid,
    SquareWell,
    gaussian_s,
    hydrogenic_1s,
    zero_potential,
)

GRAVITY = "gravity"
COULOMB = "coulomb"


def _float(text):
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not a valid input")
    return value


def _int(text):
    return int(text)


def _float_list(text):
    return tuple(_float(t) for t in text.split(",") if t.strip())


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _quantity_list(text):
    pick = _choice("norm", "dx2", "dp2")
    return tuple(pick(t.strip()) for t in text.split(",") if t.strip())


def _energy(text):
    return "auto" if text == "auto" else _float(text)


# key -> (parser, default); None means "not set".
KEYS = {
    "mode": (_choice(GRAVITY, COULOMB), None),
    "name": (str, None),
    "system.m1_mev": (_float, None),
    "system.m2_mev": (_float, None),
    "system.g_override": (_float, None),
    "constants.hbar_c_mev_fm": (_float, None),
    "constants.planck_length_fm": (_float, None),
    "constants.planck_mass_mev": (_float, None),
    "grid.r_max_fm": (_float, 20.0),
    "grid.points": (_int, 1200),
    "basis.count": (_int, None),
    "potential.kind": (_choice("square_well", "none"), "none"),
    "potential.depth_mev": (_float, None),
    "potential.radius_fm": (_float, None),
    "tail.cutoff_fm": (_float, None),
    "probe.kind": (_choice("ground", "gaussian", "hydrogenic"), "ground"),
    "probe.width_fm": (_float, None),
    "probe.kappa_fm_inv": (_float, None),
    "E": (_energy, "auto"),
    "gup.coefficients": (_choice("approx", "exact"), "approx"),
    "gup.qm_threshold": (_float, 0.1),
    "gup.qg_low": (_float, 0.5),
    "gup.qg_high": (_float, 2.0),
    "smallness.pass_threshold": (_float, 1e-3),
    "smallness.fail_threshold": (_float, 1e-1),
    "coulomb.Z": (_int, None),
    "coulomb.nu": (_int, 1),
    "coulomb.R_fm": (_float, 2.0),
    "coulomb.a_fm": (_float, 5.3e4),
    "coulomb.basis_count": (_int, 30),
    "coulomb.z_max": (_int, 10),
    "oracle.g_values": (_float_list, (1e-3, 1e-4, 1e-5)),
    "oracle.quantities": (_quantity_list, ("norm", "dx2", "dp2")),
    "plot.points": (_int, 200),
}

POSITIVE = {
    "system.m1_mev",
    "system.m2_mev",
    "constants.hbar_c_mev_fm",
    "constants.planck_length_fm",
    "constants.planck_mass_mev",
    "grid.r_max_fm",
    "potential.depth_mev",
    "potential.radius_fm",
    "probe.width_fm",
    "probe.kappa_fm_inv",
    "coulomb.nu",
    "coulomb.R_fm",
    "coulomb.a_fm",
    "coulomb.basis_count",
    "coulomb.z_max",
    "plot.points",
}
NON_NEGATIVE = {"system.g_override", "tail.cutoff_fm", "coulomb.Z"}


def parse_text(text: str, path=None) -> tuple[dict, dict]:
    """Parse scenario text into ``(values, lines)``; ``lines`` maps key -> line number."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            raise ScenarioError(f"unknown key {key!r}", lineno, path)
        if key in values:
            raise ScenarioError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno, path)
        if not value:
            raise ScenarioError(f"missing value for {key!r}", lineno, path)
        parser = KEYS[key][0]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ScenarioError(f"bad value for {key!r}: {exc}", lineno, path) from None
        if key in POSITIVE and not parsed > 0:
            raise ScenarioError(f"{key} must be positive", lineno, path)
        if key in NON_NEGATIVE and not parsed >= 0:
            raise ScenarioError(f"{key} must be non-negative", lineno, path)
        values[key] = parsed
        lines[key] = lineno
    return values, lines


@dataclass(frozen=True)
class Scenario:
    """A validated scenario.  ``get`` falls back to the ``KEYS`` defaults."""

    values: dict
    lines: dict = field(default_factory=dict)
    path: str | None = None
    digest: str = ""

    def get(self, key):
        return self.values.get(key, KEYS[key][1])

    @property
    def mode(self) -> str:
        return self.values["mode"]

    @property
    def name(self) -> str:
        if "name" in self.values:
            return self.values["name"]
        return Path(self.path).stem if self.path else "scenario"

    def _error(self, message, key=None):
        return ScenarioError(message, self.lines.get(key), self.path)

    def resolved(self) -> dict:
        """Every key with its effective value, in sorted order."""
        return {k: self.get(k) for k in sorted(KEYS)}

    # builders

    def constants(self) -> PhysicalConstants:
        try:
            return PhysicalConstants.from_overrides(
                self.get("constants.hbar_c_mev_fm"),
                self.get("constants.planck_length_fm"),
                self.get("constants.planck_mass_mev"),
            )
        except DomainError as exc:
            raise self._error(str(exc), "constants.planck_mass_mev") from None

    def system(self) -> TwoBodySystem:
        if self.mode == COULOMB:
            return self.hydrogen_like().system
        return TwoBodySystem(
            self.get("system.m1_mev"),
            self.get("system.m2_mev"),
            constants=self.constants(),
            coupling_override=self.get("system.g_override"),
        )

    def hydrogen_like(self) -> HydrogenLikeScenario:
        return HydrogenLikeScenario(
            self.get("coulomb.Z"),
            self.get("coulomb.nu"),
            self.get("coulomb.R_fm"),
            self.get("coulomb.a_fm"),
            self.constants(),
        )

    def grid(self) -> Grid:
        return Grid(self.get("grid.r_max_fm"), self.get("grid.points"))

    def potential(self):
        if self.get("potential.kind") == "square_well":
            return SquareWell(self.get("potential.depth_mev"), self.get("potential.radius_fm"))
        return zero_potential

    def tail_cutoff(self) -> float:
        cutoff = self.get("tail.cutoff_fm")
        if cutoff is None:
            cutoff = self.get("potential.radius_fm") or 0.0
        return cutoff

    def unit_tail(self) -> CutoffCoulomb:
        return CutoffCoulomb(-self.constants().hbar_c, self.tail_cutoff())

    def probe(self):
        """Analytic probe, or ``None`` for the ground state of the numeric basis."""
        kind = self.get("probe.kind")
        if kind == "gaussian":
            return gaussian_s(self.get("probe.width_fm"))
        if kind == "hydrogenic":
            return hydrogenic_1s(self.get("probe.kappa_fm_inv"), self.system())
        return None

    def energy(self):
        e = self.get("E")
        return None if e == "auto" else e

    def basis_count(self) -> int:
        count = self.get("basis.count")
        return count if count is not None else self.get("grid.points") - 2

    def length_scales(self) -> tuple:
        scales = [self.get("potential.radius_fm"), self.get("probe.width_fm")]
        kappa = self.get("probe.kappa_fm_inv")
        if kappa:
            scales.append(1.0 / kappa)
        cutoff = self.tail_cutoff()
        if cutoff > 0:
            scales.append(cutoff)
        return tuple(s for s in scales if s)


_REQUIRED = {
    GRAVITY: ("system.m1_mev", "system.m2_mev"),
    COULOMB: ("coulomb.Z",),
}


def validate(values: dict, lines: dict, path=None, digest="") -> Scenario:
    """Check mode-dependent requirements and cross-key consistency."""
    if "mode" not in values:
        raise ScenarioError("missing required key 'mode'", None, path)
    sc = Scenario(values, lines, path, digest)
    for key in _REQUIRED[sc.mode]:
        if key not in values:
            raise ScenarioError(f"mode {sc.mode} requires key {key!r}", lines.get("mode"), path)
    if sc.get("potential.kind") == "square_well":
        for key in ("potential.depth_mev", "potential.radius_fm"):
            if key not in values:
                raise ScenarioError(f"square_well potential requires {key!r}", lines.get("potential.kind"), path)
    kind = sc.get("probe.kind")
    need = {"gaussian": "probe.width_fm", "hydrogenic": "probe.kappa_fm_inv"}.get(kind)
    if need and need not in values:
        raise ScenarioError(f"probe kind {kind} requires {need!r}", lines.get("probe.kind"), path)
    if sc.mode == GRAVITY and sc.get("grid.points") < 4:
        raise ScenarioError("grid.points must be at least 4", lines.get("grid.points"), path)
    count = sc.get("basis.count")
    if count is not None and not 1 <= count <= sc.get("grid.points") - 2:
        raise ScenarioError("basis.count must lie in 1..grid.points-2", lines.get("basis.count"), path)
    g_values = sc.get("oracle.g_values")
    if any(g <= 0 for g in g_values):
        raise ScenarioError("oracle.g_values must be positive", lines.get("oracle.g_values"), path)
    low, high = sc.get("gup.qg_low"), sc.get("gup.qg_high")
    if not 0 < low <= 1 <= high:
        raise ScenarioError("need 0 < gup.qg_low <= 1 <= gup.qg_high", lines.get("gup.qg_low"), path)
    sc.constants()  # consistency of overrides
    return sc


def loads(text: str, path=None) -> Scenario:
    values, lines = parse_text(text, path)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return validate(values, lines, path, digest)


def load(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, str(p)) from None
    return loads(text, str(p))


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package (``.scenario`` may be omitted)."""
    if not name.endswith(".scenario"):
        name += ".scenario"
    return Path(str(resources.files("newtongup").joinpath("scenarios", name)))


def bundled_names() -> list:
    folder = resources.files("newtongup").joinpath("scenarios")
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".scenario"))

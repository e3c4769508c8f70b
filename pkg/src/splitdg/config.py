"""Flat ``key = value`` run configuration files.

Grammar (one entry per line)::

    line    := blank | comment | entry
    comment := "#" anything
    entry   := key "=" value [ "#" anything ]

Keys are case-insensitive.  Recognized keys and their value syntax:

=====================  ==================================================  ========
key                    value                                               default
=====================  ==================================================  ========
case                   density_wave_1d | density_wave_2d |                 required
                       isentropic_vortex | inviscid_tgv
flux                   central | kg | ducros | keep_pe | mkep              required
surface_dissipation    none | lax_friedrichs                               none
degree                 integer >= 1                                        required
cells                  ``8`` or ``8,8`` (also ``8x8``)                     required
domain                 ``lo,hi`` applied to every axis                     per case
cfl                    float > 0                                           0.2
t_final                float >= 0                                          required
amplitude              float >= 0 (density-wave velocity perturbation)     0
mach                   float > 0 (vortex / TGV)                            per case
gamma                  float > 1                                           1.4
diagnostic_interval    float > 0, time between CSV rows                    0.01
output_path            file path for the CSV                               none
seed                   integer                                             0
=====================  ==================================================  ========
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .cases import Case, CaseSpec
from .fluxes import FluxScheme
from .solver import SolverConfig

REQUIRED = ("case", "flux", "degree", "cells", "t_final")
KNOWN = REQUIRED + (
    "surface_dissipation",
    "domain",
    "cfl",
    "amplitude",
    "mach",
    "gamma",
    "diagnostic_interval",
    "output_path",
    "seed",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig
    output_path: Path | None = None
    seed: int = 0
    source: dict = dataclasses.field(default_factory=dict, compare=False)

    def replace(self, **entries) -> "RunConfig":
        """Copy with some raw entries overridden (used by sweeps)."""
        raw = dict(self.source)
        raw.update({k: str(v) for k, v in entries.items()})
        return build_config(raw)


def parse_text(text: str) -> tuple[dict[str, str], dict[str, int]]:
    entries: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in KNOWN:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        entries[key] = value
        lines[key] = lineno
    return entries, lines


def _ints(value: str) -> tuple[int, ...]:
    parts = [p for p in value.replace("x", ",").split(",") if p.strip()]
    return tuple(int(p) for p in parts)


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(p) for p in value.split(",") if p.strip())


def build_config(entries: dict[str, str], lines: dict[str, int] | None = None) -> RunConfig:
    lines = lines or {}

    def where(key):
        n = lines.get(key)
        return f"line {n}: " if n else ""

    for key in REQUIRED:
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}")

    def convert(key, fn, default=None):
        if key not in entries:
            return default
        try:
            return fn(entries[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where(key)}bad value for {key!r}: {exc}") from None

    case = convert("case", Case.parse)
    spec_kw = {"amplitude": convert("amplitude", float, 0.0)}
    mach = convert("mach", float)
    if mach is not None:
        spec_kw["mach"] = mach
    try:
        spec = CaseSpec(case, **spec_kw)
        scheme = FluxScheme.parse(entries["flux"], entries.get("surface_dissipation", "none"))
    except ValueError as exc:
        key = "flux" if "flux" in str(exc) else "case"
        raise ConfigError(f"{where(key)}{exc}") from None

    cells = convert("cells", _ints)
    if len(cells) not in (1, case.dim):
        raise ConfigError(f"{where('cells')}{case.value} needs 1 or {case.dim} cell counts, got {len(cells)}")
    if len(cells) == 1:
        cells = cells * case.dim

    domain = convert("domain", _floats)
    if domain is not None and len(domain) != 2:
        raise ConfigError(f"{where('domain')}domain must be 'lo,hi'")

    try:
        solver = SolverConfig(
            case=spec,
            degree=convert("degree", int),
            scheme=scheme,
            cells=cells,
            cfl=convert("cfl", float, 0.2),
            t_final=convert("t_final", float),
            diagnostic_interval=convert("diagnostic_interval", float, 0.01),
            gamma=convert("gamma", float, 1.4),
            domain=domain,
        )
        solver.mesh()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    out = entries.get("output_path")
    return RunConfig(
        solver=solver,
        output_path=Path(out) if out else None,
        seed=convert("seed", int, 0),
        source=dict(entries),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    entries, lines = parse_text(text)
    return build_config(entries, lines)


def format_config(entries: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in entries.items())

"""Declarative run configuration: TOML parsing, validation, object building.

A run file names a unit system, a stack (materials by name, layers by
thickness), one mode (scattering | initial-value | time-reconstruction)
and the sweep/grid parameters for that mode.  ``validate_raw`` performs
the full structural and semantic check without touching the solver and
returns a list of diagnostics; building library objects from a config
that validated cleanly cannot fail.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .errors import ConfigError
from .medium import (ConstantSusceptibility, CouplingSusceptibility,
                     LorentzPole, PoleSusceptibility, ScalarEnvelopeCoupling,
                     Susceptibility, VACUUM, isotropic_dielectric)
from .stack import Layer, LayerStack
from .units import Units, units_by_name

MODES = ("scattering", "initial-value", "time-reconstruction")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    message: str

    def line(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


@dataclass(frozen=True)
class RunConfig:
    """Validated run description plus the raw dictionary it came from."""

    raw: Dict[str, Any]
    path: Optional[Path]
    units: Units
    mode: str
    seed: Optional[int] = None

    @property
    def output_basename(self) -> str:
        return self.raw.get("output", {}).get("basename", "run")

    @property
    def output_directory(self) -> str:
        return self.raw.get("output", {}).get("directory", "out")


def load_raw(path) -> Dict[str, Any]:
    with open(path, "rb") as fh:
        return _toml.load(fh)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _tensor_ok(value) -> bool:
    if _is_number(value):
        return True
    if isinstance(value, list) and len(value) == 3:
        return all(isinstance(row, list) and len(row) == 3
                   and all(_is_number(v) for v in row) for row in value)
    return False


def _complex_ok(value) -> bool:
    if _is_number(value):
        return True
    return (isinstance(value, list) and len(value) == 2
            and all(_is_number(v) for v in value))


def _validate_material(name: str, spec, diags: List[Diagnostic]) -> None:
    path = f"materials.{name}"
    if not isinstance(spec, dict):
        diags.append(Diagnostic("error", path, "material must be a table"))
        return
    mtype = spec.get("type")
    if mtype == "vacuum":
        return
    if mtype == "isotropic":
        if not _complex_ok(spec.get("n")):
            diags.append(Diagnostic("error", f"{path}.n",
                                    "refractive index must be a number or [re, im]"))
        elif _parse_complex(spec["n"]) == 0:
            diags.append(Diagnostic("error", f"{path}.n", "refractive index is zero"))
        return
    if mtype == "poles":
        any_channel = False
        for channel in ("ee", "me", "mb"):
            poles = spec.get(channel, [])
            if not isinstance(poles, list):
                diags.append(Diagnostic("error", f"{path}.{channel}",
                                        "pole channel must be an array of tables"))
                continue
            for i, pole in enumerate(poles):
                any_channel = True
                ppath = f"{path}.{channel}[{i}]"
                if not isinstance(pole, dict):
                    diags.append(Diagnostic("error", ppath, "pole must be a table"))
                    continue
                if not _tensor_ok(pole.get("amplitude")):
                    diags.append(Diagnostic("error", f"{ppath}.amplitude",
                                            "amplitude must be a number or 3x3 array"))
                if not (_is_number(pole.get("omega0")) and pole["omega0"] >= 0):
                    diags.append(Diagnostic("error", f"{ppath}.omega0",
                                            "resonance frequency must be >= 0"))
                if not _is_number(pole.get("gamma")):
                    diags.append(Diagnostic("error", f"{ppath}.gamma",
                                            "damping must be a number"))
                elif pole["gamma"] < 0:
                    diags.append(Diagnostic("warning", f"{ppath}.gamma",
                                            "negative damping describes an active medium"))
        if not any_channel:
            diags.append(Diagnostic("warning", path, "pole material has no poles"))
        return
    if mtype == "coupling":
        if not (_is_number(spec.get("corner")) and spec["corner"] > 0):
            diags.append(Diagnostic("error", f"{path}.corner",
                                    "envelope corner frequency must be > 0"))
        for key in ("f1", "f2", "g1", "g2"):
            if key in spec and not _tensor_ok(spec[key]):
                diags.append(Diagnostic("error", f"{path}.{key}",
                                        "coupling tensor must be a number or 3x3 array"))
        return
    if mtype == "constant":
        for key in ("ee", "me", "mb"):
            if key in spec and not _tensor_ok(spec[key]):
                diags.append(Diagnostic("error", f"{path}.{key}",
                                        "tensor must be a number or 3x3 array"))
        return
    diags.append(Diagnostic("error", f"{path}.type",
                            f"unknown susceptibility model {mtype!r}"))


def _validate_grid(section, path: str, diags: List[Diagnostic],
                   minimum_count: int = 1) -> None:
    if not isinstance(section, dict):
        diags.append(Diagnostic("error", path, "expected a {min, max, count} table"))
        return
    for key in ("min", "max"):
        if not _is_number(section.get(key)):
            diags.append(Diagnostic("error", f"{path}.{key}", "must be a number"))
    count = section.get("count")
    if not (isinstance(count, int) and count >= minimum_count):
        diags.append(Diagnostic("error", f"{path}.count",
                                f"must be an integer >= {minimum_count}"))
    if _is_number(section.get("min")) and _is_number(section.get("max")) \
            and not section["max"] >= section["min"]:
        diags.append(Diagnostic("error", path, "max must be >= min"))


def _validate_pulse(section, path: str, diags: List[Diagnostic]) -> None:
    if not isinstance(section, dict):
        diags.append(Diagnostic("error", path, "expected a pulse table"))
        return
    for key in ("center", "sigma", "amplitude"):
        if not _is_number(section.get(key)):
            diags.append(Diagnostic("error", f"{path}.{key}", "must be a number"))
    if _is_number(section.get("sigma")) and section["sigma"] <= 0:
        diags.append(Diagnostic("error", f"{path}.sigma", "must be > 0"))
    if _is_number(section.get("center")) and _is_number(section.get("sigma")):
        if section["center"] + 8.0 * section["sigma"] > 0:
            diags.append(Diagnostic(
                "error", path,
                "pulse support (center + 8 sigma) must stay left of the first "
                "interface at z = 0"))


def validate_raw(raw: Dict[str, Any]) -> List[Diagnostic]:
    """Full structural and semantic validation; never runs the solver."""
    diags: List[Diagnostic] = []

    units_name = raw.get("units", "normalized")
    if units_name not in ("normalized", "si"):
        diags.append(Diagnostic("error", "units",
                                f"unknown unit system {units_name!r}"))

    mode = raw.get("mode")
    if mode not in MODES:
        diags.append(Diagnostic("error", "mode",
                                f"mode must be one of {MODES}, got {mode!r}"))

    materials = raw.get("materials", {})
    if not isinstance(materials, dict):
        diags.append(Diagnostic("error", "materials", "must be a table of tables"))
        materials = {}
    for name, spec in materials.items():
        _validate_material(name, spec, diags)

    known = set(materials) | {"vacuum"}
    stack = raw.get("stack")
    if not isinstance(stack, dict):
        diags.append(Diagnostic("error", "stack", "missing stack table"))
    else:
        for side in ("left", "right"):
            ref = stack.get(side, "vacuum")
            if ref not in known:
                diags.append(Diagnostic("error", f"stack.{side}",
                                        f"unknown material {ref!r}"))
        layers = stack.get("layers", [])
        if not isinstance(layers, list):
            diags.append(Diagnostic("error", "stack.layers",
                                    "must be an array of tables"))
            layers = []
        for i, lay in enumerate(layers):
            lpath = f"stack.layers[{i}]"
            if not isinstance(lay, dict):
                diags.append(Diagnostic("error", lpath, "layer must be a table"))
                continue
            if not (_is_number(lay.get("thickness")) and lay["thickness"] > 0):
                diags.append(Diagnostic("error", f"{lpath}.thickness",
                                        "thickness must be a positive number"))
            if lay.get("material") not in known:
                diags.append(Diagnostic("error", f"{lpath}.material",
                                        f"unknown material {lay.get('material')!r}"))
        if mode == "scattering":
            for side in ("left", "right"):
                if stack.get(side, "vacuum") != "vacuum":
                    diags.append(Diagnostic("error", f"stack.{side}",
                                            "scattering mode needs vacuum half-spaces"))

    if mode == "scattering":
        sweep = raw.get("sweep")
        if not isinstance(sweep, dict):
            diags.append(Diagnostic("error", "sweep", "missing sweep table"))
        else:
            if "omega" in sweep:
                _validate_grid(sweep["omega"], "sweep.omega", diags)
            elif not (isinstance(sweep.get("omega_list"), list)
                      and len(sweep["omega_list"]) >= 1
                      and all(_is_number(w) and w > 0 for w in sweep["omega_list"])):
                diags.append(Diagnostic("error", "sweep.omega",
                                        "need omega {min,max,count} or a positive omega_list"))
            angles = sweep.get("angles_deg", [0.0])
            if not (isinstance(angles, list) and len(angles) >= 1
                    and all(_is_number(a) and 0 <= a < 90 for a in angles)):
                diags.append(Diagnostic("error", "sweep.angles_deg",
                                        "angles must be numbers in [0, 90) degrees"))
    elif mode == "initial-value":
        section = raw.get("initial_value")
        if not isinstance(section, dict):
            diags.append(Diagnostic("error", "initial_value", "missing section"))
        else:
            _validate_pulse(section.get("pulse"), "initial_value.pulse", diags)
            _validate_grid(section.get("zgrid"), "initial_value.zgrid", diags, 2)
            olist = section.get("omega_list")
            if not (isinstance(olist, list) and len(olist) >= 1
                    and all(_is_number(w) for w in olist)):
                diags.append(Diagnostic("error", "initial_value.omega_list",
                                        "need at least one omega sample"))
    elif mode == "time-reconstruction":
        section = raw.get("time_reconstruction")
        if not isinstance(section, dict):
            diags.append(Diagnostic("error", "time_reconstruction", "missing section"))
        else:
            _validate_pulse(section.get("pulse"), "time_reconstruction.pulse", diags)
            _validate_grid(section.get("zgrid"), "time_reconstruction.zgrid", diags, 2)
            if not (_is_number(section.get("omega_max")) and section["omega_max"] > 0):
                diags.append(Diagnostic("error", "time_reconstruction.omega_max",
                                        "must be a positive number"))
            count = section.get("omega_count")
            if not (isinstance(count, int) and count >= 3 and count % 2 == 1):
                diags.append(Diagnostic("error", "time_reconstruction.omega_count",
                                        "must be an odd integer >= 3 (symmetric grid)"))
            _validate_grid(section.get("times"), "time_reconstruction.times", diags)

    seed = raw.get("seed")
    if seed is not None and not isinstance(seed, int):
        diags.append(Diagnostic("error", "seed", "seed must be an integer"))

    return diags


def load_config(path, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Parse and validate a config file; raise ConfigError on any error."""
    raw = load_raw(path)
    if overrides:
        raw = dict(raw)
        raw.update({k: v for k, v in overrides.items() if v is not None})
    diags = validate_raw(raw)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ConfigError(
            f"configuration invalid ({len(errors)} error(s))", diagnostics=diags)
    return RunConfig(raw=raw, path=Path(path), units=units_by_name(raw.get("units", "normalized")),
                     mode=raw["mode"], seed=raw.get("seed"))


# ---------------------------------------------------------------------------
# object building (assumes a validated config)
# ---------------------------------------------------------------------------

def _parse_complex(value) -> complex:
    if isinstance(value, list):
        return complex(value[0], value[1])
    return complex(value)


def _parse_tensor(value) -> np.ndarray:
    if _is_number(value):
        return float(value) * np.eye(3)
    return np.asarray(value, dtype=float)


def build_material(name: str, spec: Dict[str, Any], units: Units) -> Susceptibility:
    mtype = spec.get("type")
    if mtype == "vacuum":
        return VACUUM
    if mtype == "isotropic":
        return isotropic_dielectric(_parse_complex(spec["n"]), units.eps0, label=name)
    if mtype == "poles":
        def channel(key):
            return [LorentzPole(amplitude=_parse_tensor(p["amplitude"]) + 0j,
                                omega0=float(p["omega0"]), gamma=float(p["gamma"]))
                    for p in spec.get(key, [])]
        return PoleSusceptibility(ee_poles=channel("ee"), me_poles=channel("me"),
                                  mb_poles=channel("mb"), label=name)
    if mtype == "coupling":
        model = ScalarEnvelopeCoupling(
            corner=float(spec["corner"]),
            f1=_parse_tensor(spec["f1"]) if "f1" in spec else None,
            f2=_parse_tensor(spec["f2"]) if "f2" in spec else None,
            g1=_parse_tensor(spec["g1"]) if "g1" in spec else None,
            g2=_parse_tensor(spec["g2"]) if "g2" in spec else None)
        return CouplingSusceptibility(model, label=name)
    if mtype == "constant":
        return ConstantSusceptibility(
            ee=_parse_tensor(spec["ee"]) if "ee" in spec else None,
            me=_parse_tensor(spec["me"]) if "me" in spec else None,
            mb=_parse_tensor(spec["mb"]) if "mb" in spec else None,
            label=name)
    raise ConfigError(f"unknown susceptibility model {mtype!r} for material {name!r}")


def build_stack(config: RunConfig) -> LayerStack:
    raw = config.raw
    materials = {"vacuum": VACUUM}
    for name, spec in raw.get("materials", {}).items():
        materials[name] = build_material(name, spec, config.units)
    stack_raw = raw["stack"]
    layers = tuple(Layer(thickness=float(l["thickness"]),
                         medium=materials[l["material"]])
                   for l in stack_raw.get("layers", []))
    return LayerStack(left=materials[stack_raw.get("left", "vacuum")],
                      layers=layers,
                      right=materials[stack_raw.get("right", "vacuum")])


def grid_values(section: Dict[str, Any]) -> np.ndarray:
    return np.linspace(float(section["min"]), float(section["max"]),
                       int(section["count"]))


def omega_values(config: RunConfig) -> np.ndarray:
    sweep = config.raw["sweep"]
    if "omega" in sweep:
        return grid_values(sweep["omega"])
    return np.asarray(sweep["omega_list"], dtype=float)

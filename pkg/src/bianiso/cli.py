"""Batch command-line front end.

Reads a declarative TOML config, runs the requested sweep through the
solver pipeline, and writes a CSV table plus a JSON metadata sidecar.
Outputs are deterministic: rows are ordered by sweep index regardless of
the worker-pool size, floats are formatted with round-trip precision,
and the sidecar carries the config hash instead of timestamps.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import (Diagnostic, RunConfig, build_stack, grid_values,
                     load_config, load_raw, omega_values, validate_raw)
from .em_system import Direction, SourceJ
from .errors import BianisoError, ConfigError
from .stack import (LayerStack, TIE_BREAK_EPS, scattering_matrices,
                    solve_with_sources)
from .synthesis import FULL_COMPONENTS, field_profile, time_reconstruct

ENV_PREFIX = "BIANISO_"

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parallel_map(fn: Callable, items: Sequence, threads: int) -> List:
    """Order-preserving map over independent sweep points."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# mode runners: each returns (header, rows)
# ---------------------------------------------------------------------------

def scattering_table(config: RunConfig, stack: LayerStack, threads: int):
    units = config.units
    sweep = config.raw["sweep"]
    omegas = omega_values(config)
    angles = np.asarray(sweep.get("angles_deg", [0.0]), dtype=float)
    azimuth = np.radians(float(sweep.get("azimuth_deg", 0.0)))

    points = [(float(w), float(a)) for w in omegas for a in angles]

    def solve(point):
        omega, angle = point
        theta = np.radians(angle)
        kmag = omega * np.sqrt(units.eps0 * units.mu0) * np.sin(theta)
        kpar = (kmag * np.cos(azimuth), kmag * np.sin(azimuth))
        try:
            res = scattering_matrices(stack, kpar, omega, units)
        except BianisoError as exc:
            raise BianisoError(
                f"solver failed at omega={omega}, kpar={kpar}: "
                f"{type(exc).__name__}: {exc}") from exc
        row = [omega, angle, kpar[0], kpar[1]]
        for mat in (res.r, res.t):
            for i in range(2):
                for j in range(2):
                    row.extend([mat[i, j].real, mat[i, j].imag])
        row.extend([res.reflect_flux[0], res.reflect_flux[1],
                    res.transmit_flux[0], res.transmit_flux[1]])
        return row

    header = ["omega", "theta_deg", "k_x", "k_y"]
    for mat in ("r", "t"):
        for i, outp in enumerate("ps"):
            for j, inp in enumerate("ps"):
                header.extend([f"re_{mat}_{outp}{inp}", f"im_{mat}_{outp}{inp}"])
    header.extend(["R_flux_p", "R_flux_s", "T_flux_p", "T_flux_s"])
    return header, _parallel_map(solve, points, threads)


def _pulse_profile(section):
    center = float(section["center"])
    sigma = float(section["sigma"])
    amp = float(section["amplitude"])

    def g(z):
        return amp * np.exp(-((np.asarray(z) - center) ** 2) / (2.0 * sigma ** 2))

    support = (center - 8.0 * sigma, center + 8.0 * sigma)
    return g, support, sigma


def _pulse_source(g, s: complex, direction: Direction, units) -> SourceJ:
    # right-moving tangential pulse: Ex = Hy = g at t = 0; works on z arrays
    def b0(z):
        val = np.asarray(units.mu0 * g(z), dtype=complex)
        zero = np.zeros_like(val)
        return np.stack([zero, val, zero], axis=-1)

    def d0(z):
        val = np.asarray(units.eps0 * g(z), dtype=complex)
        zero = np.zeros_like(val)
        return np.stack([zero + val, zero, zero], axis=-1)

    return SourceJ.vacuum(b0, d0, s=s, direction=direction, mu0=units.mu0)


def _field_rows(prefix_vals, frame_values, zgrid):
    rows = []
    for iz, z in enumerate(zgrid):
        row = list(prefix_vals) + [float(z)]
        for c in range(frame_values.shape[-1]):
            v = frame_values[iz, c]
            row.extend([v.real, v.imag])
        rows.append(row)
    return rows


_FIELD_HEADER = [h for name in FULL_COMPONENTS for h in (f"re_{name}", f"im_{name}")]


def initial_value_table(config: RunConfig, stack: LayerStack, threads: int):
    units = config.units
    section = config.raw["initial_value"]
    g, support, sigma = _pulse_profile(section["pulse"])
    zgrid = grid_values(section["zgrid"])
    omegas = [float(w) for w in section["omega_list"]]
    kpar = (0.0, 0.0)

    def solve(omega):
        s = -1j * omega + TIE_BREAK_EPS * max(abs(omega), 1.0)
        src = _pulse_source(g, s, Direction.FORWARD, units)
        sol = solve_with_sources(
            stack, kpar, s, Direction.FORWARD, units,
            sources=[src] + [None] * (stack.nregions - 1),
            support=[support] + [None] * (stack.nregions - 1),
            max_step=sigma / 2.0)
        frame = field_profile(sol, zgrid)
        return _field_rows([omega], frame.values, zgrid)

    header = ["omega", "z"] + _FIELD_HEADER
    chunks = _parallel_map(solve, omegas, threads)
    return header, [row for chunk in chunks for row in chunk]


def time_reconstruction_table(config: RunConfig, stack: LayerStack, threads: int):
    units = config.units
    section = config.raw["time_reconstruction"]
    g, support, sigma = _pulse_profile(section["pulse"])
    zgrid = grid_values(section["zgrid"])
    times = grid_values(section["times"])
    wmax = float(section["omega_max"])
    nw = int(section["omega_count"])
    omegas = np.linspace(-wmax, wmax, nw)
    kpar = (0.0, 0.0)

    def solve(point):
        omega, direction = point
        if direction is Direction.FORWARD:
            s = -1j * omega + TIE_BREAK_EPS * max(abs(omega), 1.0)
        else:
            s = 1j * omega + TIE_BREAK_EPS * max(abs(omega), 1.0)
        src = _pulse_source(g, s, direction, units)
        sol = solve_with_sources(
            stack, kpar, s, direction, units,
            sources=[src] + [None] * (stack.nregions - 1),
            support=[support] + [None] * (stack.nregions - 1),
            max_step=sigma / 2.0)
        return field_profile(sol, zgrid).values

    points = [(float(w), d) for d in (Direction.FORWARD, Direction.BACKWARD)
              for w in omegas]
    values = _parallel_map(solve, points, threads)
    fwd = np.stack(values[:nw])
    bwd = np.stack(values[nw:])

    frame = time_reconstruct(omegas, fwd, bwd, kpar, (0.0, 0.0), times,
                             components=FULL_COMPONENTS, zgrid=zgrid)
    rows = []
    for it, t in enumerate(times):
        rows.extend(_field_rows([float(t)], frame.values[it], zgrid))
    header = ["t", "z"] + _FIELD_HEADER
    return header, rows


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

def write_outputs(config: RunConfig, header, rows, outdir: Path,
                  seed: Optional[int]) -> List[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    base = config.output_basename
    csv_path = outdir / f"{base}.csv"
    meta_path = outdir / f"{base}.meta.json"

    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])

    digest = ""
    if config.path is not None and config.path.exists():
        digest = hashlib.sha256(config.path.read_bytes()).hexdigest()
    meta = {
        "columns": header,
        "config_sha256": digest,
        "mode": config.mode,
        "rows": len(rows),
        "seed": seed,
        "tolerances": {"tie_break_eps": TIE_BREAK_EPS},
        "units": config.units.name,
        "version": __version__,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, meta_path]


def run(config: RunConfig, outdir: Path, threads: int,
        seed: Optional[int] = None) -> List[Path]:
    """Run one configured sweep and write its outputs."""
    stack = build_stack(config)
    if config.mode == "scattering":
        header, rows = scattering_table(config, stack, threads)
    elif config.mode == "initial-value":
        header, rows = initial_value_table(config, stack, threads)
    else:
        header, rows = time_reconstruction_table(config, stack, threads)
    return write_outputs(config, header, rows, outdir, seed)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bianiso",
        description="Multilayer bi-anisotropic field solver (batch front end)")
    parser.add_argument("--config", default=_env("CONFIG"),
                        help="path to the TOML run configuration")
    parser.add_argument("--output", default=_env("OUTPUT"),
                        help="output directory (default: from the config)")
    parser.add_argument("--mode", default=_env("MODE"),
                        help="override the config's mode")
    parser.add_argument("--threads", type=int,
                        default=int(_env("THREADS") or "1"),
                        help="worker pool size for sweep points")
    parser.add_argument("--validate-only", action="store_true",
                        default=(_env("VALIDATE_ONLY") or "").lower() in ("1", "true"),
                        help="validate the config and exit")
    parser.add_argument("--seed", type=int,
                        default=int(_env("SEED")) if _env("SEED") else None,
                        help="seed recorded for randomized scenario generation")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    try:
        raw = load_raw(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.seed is not None:
        overrides["seed"] = args.seed
    raw_checked = dict(raw)
    raw_checked.update(overrides)

    diagnostics = validate_raw(raw_checked)
    for d in diagnostics:
        print(d.line(), file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return EXIT_INVALID_CONFIG
    if args.validate_only:
        print("configuration valid")
        return EXIT_OK

    try:
        config = load_config(args.config, overrides=overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    outdir = Path(args.output) if args.output else Path(config.output_directory)
    try:
        paths = run(config, outdir, max(1, args.threads), seed=args.seed or config.seed)
    except BianisoError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Field synthesis: free-space drives, z profiles, and time reconstruction.

Free-space initial data enters through classical complex amplitudes
a(lambda, k) standing in for the initial plane-wave mode operators;
their conjugates appear wherever the adjoint amplitudes would.  The
drive integrals reduce the amplitudes to the initial-field spectra
B(kpar, z), D(kpar, z) on one transverse-wavevector line and then to the
4-component tangential drive of the free-space propagation system.

Time reconstruction inverts both one-sided transforms on a symmetric
frequency grid: the forward term carries e^{+i kpar.rpar} and covers
t > 0, the backward term carries e^{-i kpar.rpar} and covers t < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .em_system import Direction
from .errors import ResolutionError
from .modes import ModeBasis
from .stack import StackSolution, general_solution
from .units import NORMALIZED, Units

TANGENTIAL_COMPONENTS = ("Ex", "Ey", "Hx", "Hy")
FULL_COMPONENTS = ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz")

_EDGE_CONTENT_LIMIT = 1e-3

_trapz = getattr(np, "trapezoid", None) or np.trapz


def polarization_basis(kvec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic orthonormal triad (e1, e2, e3) with e3 = k/|k|."""
    k = np.asarray(kvec, dtype=float)
    norm = np.linalg.norm(k)
    if norm == 0:
        raise ValueError("polarization basis undefined at k = 0")
    e3 = k / norm
    zhat = np.array([0.0, 0.0, 1.0])
    cross = np.cross(zhat, e3)
    cnorm = np.linalg.norm(cross)
    if cnorm < 1e-12:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = cross / cnorm
    e2 = np.cross(e3, e1)
    return e1, e2, e3


@dataclass(frozen=True)
class PlaneWaveMode:
    """One discrete classical mode amplitude at (polarization, k)."""

    polarization: int
    k: np.ndarray
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float))
        if self.polarization not in (1, 2):
            raise ValueError("polarization index must be 1 or 2")
        if self.k.shape != (3,):
            raise ValueError("mode wavevector must be a 3-vector")

    def unit_vector(self) -> np.ndarray:
        basis = polarization_basis(self.k)
        return basis[self.polarization - 1]


class FreeSpaceAmplitudes:
    """Classical mode amplitudes, either discrete modes or a sampled density.

    Discrete modes behave as Dirac masses in k_z on their transverse
    line; a continuous density is integrated by the trapezoid rule over
    ``kz_grid`` with a coarse-grid error estimate.
    """

    def __init__(self, modes: Sequence[PlaneWaveMode] = (),
                 amplitude_fn: Optional[Callable[[int, np.ndarray], complex]] = None,
                 kz_grid: Optional[np.ndarray] = None):
        self.modes = tuple(modes)
        self.amplitude_fn = amplitude_fn
        self.kz_grid = None if kz_grid is None else np.asarray(kz_grid, dtype=float)
        if amplitude_fn is not None:
            if self.kz_grid is None or self.kz_grid.size < 5:
                raise ValueError("a continuous amplitude needs a kz grid (>= 5 points)")
            if np.any(np.diff(self.kz_grid) <= 0):
                raise ValueError("kz grid must be strictly increasing")

    @classmethod
    def discrete(cls, modes: Sequence[PlaneWaveMode]) -> "FreeSpaceAmplitudes":
        return cls(modes=modes)

    @classmethod
    def continuous(cls, amplitude_fn, kz_grid) -> "FreeSpaceAmplitudes":
        return cls(amplitude_fn=amplitude_fn, kz_grid=kz_grid)


@dataclass(frozen=True)
class FreeSpaceDrive:
    """Reduced drive and initial-field spectra at one (kpar, s, z)."""

    g: np.ndarray
    b: np.ndarray
    d: np.ndarray


def _mode_terms(amps: FreeSpaceAmplitudes, kpar, direction: Direction, c: float):
    """Per-mode (phase rate, B contribution, D contribution) on one line.

    Each discrete mode enters twice: once through its amplitude and once
    through the conjugate amplitude at the mirrored wavevector; which
    transverse line it feeds depends on the transform direction.
    """
    kx, ky = float(kpar[0]), float(kpar[1])
    sgn = direction.sign
    terms = []
    for m in amps.modes:
        kappa = m.k
        omega_k = c * np.linalg.norm(kappa)
        if omega_k == 0:
            raise ValueError("zero-frequency mode in free-space amplitudes")
        evec = m.unit_vector()
        root_b = np.sqrt(1.0 / (4.0 * np.pi * omega_k))
        root_d = np.sqrt(omega_k / (4.0 * np.pi))
        # direct amplitude: feeds the +kpar line forward, -kpar backward
        if np.allclose([sgn * kx, sgn * ky], kappa[:2], atol=1e-12):
            bterm = root_b * (1j * np.cross(kappa, evec)) * m.amplitude
            dterm = 1j * root_d * m.amplitude * evec
            terms.append((kappa[2], bterm, dterm))
        # conjugate amplitude: mirrored wavevector line
        if np.allclose([-sgn * kx, -sgn * ky], kappa[:2], atol=1e-12):
            bterm = -root_b * (1j * np.cross(kappa, evec)) * np.conj(m.amplitude)
            dterm = -1j * root_d * np.conj(m.amplitude) * evec
            terms.append((-kappa[2], bterm, dterm))
    return terms


def initial_spectra(amps: FreeSpaceAmplitudes, kpar, z: float,
                    direction: Direction = Direction.FORWARD,
                    units: Units = NORMALIZED):
    """Initial-field spectra B(kpar, z), D(kpar, z) from mode amplitudes."""
    c = units.c
    if amps.modes:
        b = np.zeros(3, dtype=complex)
        d = np.zeros(3, dtype=complex)
        for rate, bterm, dterm in _mode_terms(amps, kpar, direction, c):
            phase = np.exp(1j * rate * z)
            b += bterm * phase
            d += dterm * phase
        return b, d
    if amps.amplitude_fn is None:
        return np.zeros(3, dtype=complex), np.zeros(3, dtype=complex)

    kx, ky = float(kpar[0]), float(kpar[1])
    sgn = direction.sign
    grid = amps.kz_grid

    def integrand(kz: float):
        # signed wavevector: the direct amplitude lives at +-(kpar, kz)
        kp = sgn * np.array([kx, ky, kz])
        omega_k = c * np.linalg.norm(kp)
        if omega_k == 0:
            return np.zeros(3, dtype=complex), np.zeros(3, dtype=complex)
        e1, e2, _ = polarization_basis(kp)
        em1, em2, _ = polarization_basis(-kp)
        root_b = np.sqrt(1.0 / (4.0 * np.pi * omega_k))
        root_d = np.sqrt(omega_k / (4.0 * np.pi))
        phase = np.exp(1j * kp[2] * z)
        bsum = np.zeros(3, dtype=complex)
        dsum = np.zeros(3, dtype=complex)
        for lam, (ev, emv) in enumerate(((e1, em1), (e2, em2)), start=1):
            a_k = amps.amplitude_fn(lam, kp)
            a_mk = amps.amplitude_fn(lam, -kp)
            bsum += root_b * (1j * np.cross(kp, ev)) * a_k
            bsum += root_b * (1j * np.cross(kp, emv)) * np.conj(a_mk)
            dsum += 1j * root_d * (a_k * ev - np.conj(a_mk) * emv)
        return bsum * phase, dsum * phase

    bvals = np.empty((grid.size, 3), dtype=complex)
    dvals = np.empty((grid.size, 3), dtype=complex)
    for i, kz in enumerate(grid):
        bvals[i], dvals[i] = integrand(float(kz))
    b = _trapz(bvals, grid, axis=0)
    d = _trapz(dvals, grid, axis=0)

    bc = _trapz(bvals[::2], grid[::2], axis=0)
    dc = _trapz(dvals[::2], grid[::2], axis=0)
    scale = max(np.max(np.abs(b)), np.max(np.abs(d)), 1e-300)
    err = max(np.max(np.abs(b - bc)), np.max(np.abs(d - dc)))
    # trapezoid halving error ratio ~ 4; be conservative about the estimate
    if err / 3.0 > 1e-6 * scale:
        raise ResolutionError(
            f"kz grid too coarse for the drive integrals "
            f"(estimated relative error {err / (3.0 * scale):.2e})")
    return b, d


def free_space_drive(amps: FreeSpaceAmplitudes, kpar, s: complex, z: float,
                     direction: Direction = Direction.FORWARD,
                     units: Units = NORMALIZED) -> FreeSpaceDrive:
    """Free-space tangential drive from classical mode amplitudes.

    Combines the initial-field spectra with the closed-form free-space
    reduction (the generic source reduction gives the same values; the
    two paths are cross-checked in the tests).
    """
    b, d = initial_spectra(amps, kpar, z, direction, units)
    kx, ky = complex(kpar[0]), complex(kpar[1])
    sgn = direction.sign
    se = s * units.eps0
    sm = s * units.mu0
    g = np.array([
        sgn * b[1] + sgn * (1j * kx / se) * d[2],
        -sgn * b[0] + sgn * (1j * ky / se) * d[2],
        -sgn * d[1] + sgn * (1j * kx / sm) * b[2],
        sgn * d[0] + sgn * (1j * ky / sm) * b[2],
    ], dtype=complex)
    return FreeSpaceDrive(g=g, b=b, d=d)


# ---------------------------------------------------------------------------
# sampled field frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldFrame:
    """Field components sampled on a rectangular grid.

    ``values`` has shape (*grid lengths, len(components)).
    """

    axes: Tuple[str, ...]
    grids: Tuple[np.ndarray, ...]
    components: Tuple[str, ...]
    values: np.ndarray
    kpar: tuple = (0.0, 0.0)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.grids:
            g = np.asarray(g)
            if g.ndim != 1 or (g.size > 1 and np.any(np.diff(g) <= 0)):
                raise ValueError("field frame grids must be 1-D and increasing")
        expected = tuple(len(g) for g in self.grids) + (len(self.components),)
        if tuple(self.values.shape) != expected:
            raise ValueError(
                f"values shape {self.values.shape} does not match grids {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field frame contains non-finite samples")

    def component(self, name: str) -> np.ndarray:
        return self.values[..., self.components.index(name)]


def field_profile(solution: StackSolution, zgrid) -> FieldFrame:
    """Evaluate the stack solution on a z grid, including Ez and Hz.

    Points exactly on an interface are attributed to the region on the
    left; the tangential components are continuous there while the
    longitudinal ones may jump.
    """
    zs = np.asarray(zgrid, dtype=float)
    if zs.ndim != 1 or (zs.size > 1 and np.any(np.diff(zs) <= 0)):
        raise ValueError("zgrid must be a 1-D increasing array")
    lam, ez, hz = solution.evaluate(zs)
    values = np.empty((zs.size, 6), dtype=complex)
    values[:, 0:2] = lam[:, 0:2]
    values[:, 2] = ez
    values[:, 3:5] = lam[:, 2:4]
    values[:, 5] = hz
    return FieldFrame(axes=("z",), grids=(zs,), components=FULL_COMPONENTS,
                      values=values, kpar=solution.kpar,
                      meta={"s": solution.s, "direction": solution.direction.value})


def raised_cosine_window(omega: np.ndarray) -> np.ndarray:
    wmax = float(np.max(np.abs(omega)))
    return 0.5 * (1.0 + np.cos(np.pi * omega / wmax))


def time_reconstruct(omega_grid, forward_values, backward_values, kpar, rpar,
                     times, window: Optional[str] = None,
                     components: Tuple[str, ...] = TANGENTIAL_COMPONENTS,
                     zgrid=None) -> FieldFrame:
    """Invert both one-sided transforms on a symmetric frequency grid.

    ``forward_values``/``backward_values`` sample the two transform
    branches at s = -i*omega + 0+ and s = +i*omega + 0+ respectively,
    shaped (n_omega, ..., n_components).  The quadrature is a plain
    trapezoid rule; ``window="raised-cosine"`` tapers the band edges
    (this changes amplitudes and is off by default).  The result covers
    one transverse-wavevector line at transverse position ``rpar``.
    """
    omega = np.asarray(omega_grid, dtype=float)
    fwd = np.asarray(forward_values, dtype=complex)
    bwd = np.asarray(backward_values, dtype=complex)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if omega.ndim != 1 or omega.size < 2:
        raise ValueError("omega grid must be a 1-D array with >= 2 samples")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("omega grid must be strictly increasing")
    if np.max(np.abs(omega + omega[::-1])) > 1e-9 * np.max(np.abs(omega)):
        raise ValueError("omega grid must be symmetric about zero")
    if fwd.shape != bwd.shape or fwd.shape[0] != omega.size:
        raise ValueError("transform samples must share the omega grid")
    if fwd.shape[-1] != len(components):
        raise ValueError("last axis must hold the field components")

    dmax = float(np.max(np.diff(omega)))
    if float(np.max(np.abs(ts))) * dmax > np.pi:
        raise ResolutionError(
            "requested times exceed the alias-free range of the omega grid")

    win = np.ones_like(omega)
    if window == "raised-cosine":
        win = raised_cosine_window(omega)
    elif window is not None:
        raise ValueError(f"unknown window {window!r}")

    kx, ky = complex(kpar[0]), complex(kpar[1])
    x, y = float(rpar[0]), float(rpar[1])
    phase_f = np.exp(1j * (kx * x + ky * y))
    phase_b = np.exp(-1j * (kx * x + ky * y))
    spectral = phase_f * fwd + phase_b * bwd

    # bandwidth check on the combined integrand: the 1/omega tails of the
    # two one-sided branches cancel in the sum, which is what is inverted
    scale = max(float(np.max(np.abs(spectral))), 1e-300)
    edge = float(np.max(np.abs(spectral[[0, -1]])))
    if edge > _EDGE_CONTENT_LIMIT * scale:
        raise ResolutionError(
            f"signal bandwidth exceeds the omega grid "
            f"(edge content {edge / scale:.2e} of peak)")
    spectral = spectral * win.reshape((-1,) + (1,) * (spectral.ndim - 1))

    out = np.empty(ts.shape + fwd.shape[1:], dtype=complex)
    for i, t in enumerate(ts):
        kernel = np.exp(-1j * omega * t).reshape((-1,) + (1,) * (spectral.ndim - 1))
        out[i] = _trapz(kernel * spectral, omega, axis=0) / (2.0 * np.pi)

    if out.ndim == 2:
        return FieldFrame(axes=("t",), grids=(ts,), components=tuple(components),
                          values=out, kpar=(kx, ky))
    if zgrid is None:
        raise ValueError("zgrid is required for z-resolved reconstruction")
    return FieldFrame(axes=("t", "z"), grids=(ts, np.asarray(zgrid, dtype=float)),
                      components=tuple(components), values=out, kpar=(kx, ky))

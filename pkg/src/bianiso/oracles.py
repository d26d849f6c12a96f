"""Independent reference results for tests and acceptance runs.

Nothing here shares code with the solver path: the slab coefficients
come from textbook interface formulas composed by the Airy summation,
the layer propagation from a hand-written fixed-step RK4 integrator, and
the six-equation residual from hand-expanded entries with
finite-difference z derivatives.  Keep it that way; the point of this
module is that it can disagree with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .em_system import Direction
from .errors import ResolutionError, StiffnessError
from .units import NORMALIZED, Units


# ---------------------------------------------------------------------------
# Fresnel-Airy slab closed form
# ---------------------------------------------------------------------------

def _medium_cosine(n: complex, sin_theta: complex) -> complex:
    # n*cos(theta_t) with the branch decaying into an absorbing medium
    nc = np.sqrt(n * n - sin_theta * sin_theta)
    if nc.imag < 0:
        nc = -nc
    return nc


def fresnel_airy(n: complex, d: float, omega: complex, theta: float, pol: str,
                 units: Units = NORMALIZED):
    """Reflection and transmission of an isotropic slab in vacuum.

    Conventions: s entries are E_y ratios, p entries are H_y ratios
    (time factor e^{-i omega t}); reflection is referenced to the entry
    interface and transmission to the exit interface.  ``omega`` may be
    complex (analytic continuation off the real axis).

    Returns (r, t).
    """
    n = complex(n)
    if n == 0:
        raise ValueError("refractive index must be nonzero")
    if pol not in ("s", "p"):
        raise ValueError(f"polarization must be 's' or 'p', got {pol!r}")
    cos_i = np.cos(theta)
    if abs(cos_i) < 1e-12:
        raise ValueError("grazing incidence is outside the oracle's domain")
    sin_i = np.sin(theta)
    k0 = complex(omega) * np.sqrt(units.eps0 * units.mu0)
    ncos = _medium_cosine(n, sin_i)

    if pol == "s":
        r12 = (cos_i - ncos) / (cos_i + ncos)
        t12 = 2.0 * cos_i / (cos_i + ncos)
        t21 = 2.0 * ncos / (cos_i + ncos)
    else:
        r12 = (n * n * cos_i - ncos) / (n * n * cos_i + ncos)
        t12 = 2.0 * n * n * cos_i / (n * n * cos_i + ncos)
        t21 = 2.0 * ncos / (n * n * cos_i + ncos)
    r21 = -r12

    beta = k0 * ncos * d
    phase = np.exp(1j * beta)
    denom = 1.0 + r12 * r21 * phase * phase
    r = (r12 + r21 * phase * phase) / denom
    t = t12 * t21 * phase / denom
    return r, t


# ---------------------------------------------------------------------------
# direct ODE integration of the tangential system
# ---------------------------------------------------------------------------

_MAX_STEPS = 1 << 21


def integrate_layer(theta: np.ndarray, g: Optional[Callable], lam0, z0: float,
                    z1: float, direction: Direction = Direction.FORWARD,
                    tol: float = 1e-10):
    """Propagate dL/dz +- theta L = G from z0 to z1 by fixed-step RK4.

    The step count doubles until two successive integrations agree to
    ``tol`` relative to the solution scale; failure to converge before
    the step underflows raises.
    """
    theta = np.asarray(theta, dtype=complex)
    lam0 = np.asarray(lam0, dtype=complex)
    span = z1 - z0
    if not np.isfinite(span):
        raise ValueError("integration span must be finite")
    if span == 0:
        return lam0.copy()
    sg = direction.sign

    def rhs(z: float, y: np.ndarray) -> np.ndarray:
        out = -sg * (theta @ y)
        if g is not None:
            out = out + np.asarray(g(z), dtype=complex)
        return out

    def run(nsteps: int) -> np.ndarray:
        h = span / nsteps
        y = lam0.astype(complex)
        z = z0
        for _ in range(nsteps):
            k1 = rhs(z, y)
            k2 = rhs(z + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(z + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(z + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            z += h
        return y

    nsteps = 64
    prev = run(nsteps)
    while True:
        nsteps *= 2
        if nsteps > _MAX_STEPS or abs(span / nsteps) < 1e-13 * max(abs(z0), abs(z1), 1.0):
            raise StiffnessError(
                f"RK4 failed to reach tol={tol} before step underflow "
                f"({nsteps} steps over span {span})")
        cur = run(nsteps)
        scale = max(float(np.max(np.abs(cur))), 1.0)
        if float(np.max(np.abs(cur - prev))) <= tol * scale:
            return cur
        prev = cur


# ---------------------------------------------------------------------------
# six-equation residual with finite-difference z derivatives
# ---------------------------------------------------------------------------

def maxwell_residual(zgrid, efield, hfield, eta, kpar, s: complex,
                     direction: Direction = Direction.FORWARD,
                     units: Units = NORMALIZED,
                     jfun: Optional[Callable] = None) -> float:
    """Max-norm residual of all six reduced field equations on a z grid.

    ``efield``/``hfield`` are (n, 3) samples including the longitudinal
    components; derivatives use a centered fourth-order stencil on the
    uniform grid (two boundary points are skipped on each side).  The
    entries are written out by hand on purpose; do not replace them with
    the assembly code they are meant to check.
    """
    z = np.asarray(zgrid, dtype=float)
    e = np.asarray(efield, dtype=complex)
    h = np.asarray(hfield, dtype=complex)
    if z.ndim != 1 or z.size < 7:
        raise ResolutionError("residual stencil needs at least 7 grid points")
    steps = np.diff(z)
    dz = steps[0]
    if np.max(np.abs(steps - dz)) > 1e-9 * abs(dz):
        raise ValueError("residual check requires a uniform z grid")
    if e.shape != (z.size, 3) or h.shape != (z.size, 3):
        raise ValueError("fields must be sampled as (n, 3) arrays")

    def ddz(f: np.ndarray) -> np.ndarray:
        # 4th-order centered first derivative on interior points
        return (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * dz)

    sl = slice(2, -2)
    kx, ky = complex(kpar[0]), complex(kpar[1])
    sg = direction.sign
    s = complex(s)
    eps0, mu0 = units.eps0, units.mu0

    ex, ey, ez = e[sl, 0], e[sl, 1], e[sl, 2]
    hx, hy, hz = h[sl, 0], h[sl, 1], h[sl, 2]
    dey, dex = ddz(e[:, 1]), ddz(e[:, 0])
    dhy, dhx = ddz(h[:, 1]), ddz(h[:, 0])

    emat = e[sl].T
    hmat = h[sl].T
    me_e = eta.me @ emat
    mh_h = (np.eye(3) + eta.mh) @ hmat
    pe_e = (eps0 * np.eye(3) + eta.pe) @ emat
    ph_h = eta.ph @ hmat

    if jfun is None:
        jrows = np.zeros((6, ex.size), dtype=complex)
    else:
        jrows = np.column_stack([np.asarray(jfun(zz), dtype=complex)
                                 for zz in z[sl]])

    res = np.empty((6, ex.size), dtype=complex)
    # electric-curl rows
    res[0] = (sg * 1j * ky * ez - dey) + sg * mu0 * s * (me_e[0] + mh_h[0]) - jrows[0]
    res[1] = (dex - sg * 1j * kx * ez) + sg * mu0 * s * (me_e[1] + mh_h[1]) - jrows[1]
    res[2] = (-sg * 1j * ky * ex + sg * 1j * kx * ey) \
        + sg * mu0 * s * (me_e[2] + mh_h[2]) - jrows[2]
    # magnetic-curl rows
    res[3] = (sg * 1j * ky * hz - dhy) - sg * s * (pe_e[0] + ph_h[0]) - jrows[3]
    res[4] = (dhx - sg * 1j * kx * hz) - sg * s * (pe_e[1] + ph_h[1]) - jrows[4]
    res[5] = (-sg * 1j * ky * hx + sg * 1j * kx * hy) \
        - sg * s * (pe_e[2] + ph_h[2]) - jrows[5]
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# comparison bookkeeping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleReport:
    """One oracle-vs-solver comparison with its verdict."""

    scenario: str
    oracle_value: complex
    solver_value: complex
    tolerance: float
    mode: str = "abs"

    @property
    def abs_error(self) -> float:
        return abs(self.solver_value - self.oracle_value)

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.oracle_value), 1e-300)
        return self.abs_error / scale

    @property
    def passed(self) -> bool:
        err = self.abs_error if self.mode == "abs" else self.rel_error
        return err <= self.tolerance

    def line(self) -> str:
        err = self.abs_error if self.mode == "abs" else self.rel_error
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.scenario}: {self.mode} error {err:.3e}"
                f" (tolerance {self.tolerance:.1e})")


def compare(scenario: str, oracle_value, solver_value, tolerance: float,
            mode: str = "abs") -> OracleReport:
    return OracleReport(scenario=scenario, oracle_value=complex(oracle_value),
                        solver_value=complex(solver_value),
                        tolerance=float(tolerance), mode=mode)

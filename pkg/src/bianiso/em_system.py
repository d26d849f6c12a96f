"""Fourier-reduced Maxwell block system and its longitudinal elimination.

For a stratified medium the transformed Maxwell equations close into six
coupled equations for (Ex, Ey, Ez, Hx, Hy, Hz) of the form

    (D d/dz + K(kpar, s)) F = J(kpar, z, s)

where D is a fixed sparse pattern holding the z-derivatives of the curls
and K collects the transverse wavevector and the effective medium
response.  The third and sixth rows are algebraic; solving them for
(Ez, Hz) and substituting reduces the system to a first-order ODE

    d/dz L  +- Theta L = G

for the tangential state L = (Ex, Ey, Hx, Hy), with the upper sign for
the forward transform direction.  The elimination here is performed
generically (2x2 Schur solve of the algebraic rows); the hand-expanded
entry formulas live in the test suite as an independent oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import LongitudinalPivotError
from .medium import EffectiveResponse, NoiseSources
from .units import NORMALIZED, Units

# component layout of the 6-vector F
F_COMPONENTS = ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz")
TANGENTIAL = (0, 1, 4, 5)  # note: tangential state order is (Ex, Ey, Hx, Hy)
_TAU = (0, 1, 3, 4)        # F-indices of (Ex, Ey, Hx, Hy)
_LONG = (2, 5)             # F-indices of (Ez, Hz)

# (F-row, tangential target, sign) of the four dynamic rows: each row
# carries exactly one z-derivative, e.g. row 0 is -d/dz Ey + K[0,:] F = J[0].
_DYNAMIC_ROWS = ((0, 1, +1.0), (1, 0, -1.0), (3, 3, +1.0), (4, 2, -1.0))

_PIVOT_RTOL = 1e-300  # absolute floor; relative check uses entry scale


class Direction(enum.Enum):
    """Transform direction: forward covers t > 0, backward covers t < 0."""

    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.FORWARD else -1.0


def derivative_pattern() -> np.ndarray:
    """The constant d/dz coefficient pattern D (curl positions only)."""
    d = np.zeros((6, 6))
    d[0, 1] = -1.0
    d[1, 0] = +1.0
    d[3, 4] = -1.0
    d[4, 3] = +1.0
    return d


@dataclass(frozen=True)
class MaxwellBlockSystem:
    """Algebraic part K of the reduced six-equation system, plus context.

    Rows/columns follow ``F_COMPONENTS``; the z-derivative pattern is
    ``derivative_pattern()`` and is identical for every medium.
    """

    kmat: np.ndarray
    kpar: tuple
    s: complex
    direction: Direction
    units: Units

    @property
    def pivot(self) -> complex:
        k = self.kmat
        return k[2, 2] * k[5, 5] - k[2, 5] * k[5, 2]


def assemble_blocks(eta: EffectiveResponse, kpar, s: complex,
                    direction: Direction = Direction.FORWARD,
                    units: Units = NORMALIZED) -> MaxwellBlockSystem:
    """Build the 6x6 algebraic matrix K for one medium at (kpar, s).

    The transverse derivatives are replaced by +-i kx, +-i ky according to
    the direction's plane-wave convention (upper sign forward); the medium
    enters through the effective (E, H)-form tensors.
    """
    kx, ky = (complex(kpar[0]), complex(kpar[1]))
    s = complex(s)
    sg = direction.sign
    eps0, mu0 = units.eps0, units.mu0

    curl = np.array([
        [0.0, 0.0, sg * 1j * ky],
        [0.0, 0.0, -sg * 1j * kx],
        [-sg * 1j * ky, sg * 1j * kx, 0.0],
    ], dtype=complex)

    eye = np.eye(3)
    k = np.zeros((6, 6), dtype=complex)
    k[:3, :3] = curl + sg * mu0 * s * eta.me
    k[:3, 3:] = sg * mu0 * s * (eye + eta.mh)
    k[3:, :3] = -sg * s * (eps0 * eye + eta.pe)
    k[3:, 3:] = curl - sg * s * eta.ph
    return MaxwellBlockSystem(kmat=k, kpar=(kx, ky), s=s,
                              direction=direction, units=units)


@dataclass(frozen=True)
class LongitudinalCoeffs:
    """Scalars expressing (Ez, Hz) through the tangential state and sources.

    Ez = alpha1 Ex + beta1 Ey + gamma1 Hx + delta1 Hy + [source_map row 0] . (J3, J6)
    Hz = alpha2 Ex + beta2 Ey + gamma2 Hx + delta2 Hy + [source_map row 1] . (J3, J6)
    """

    alpha1: complex
    beta1: complex
    gamma1: complex
    delta1: complex
    alpha2: complex
    beta2: complex
    gamma2: complex
    delta2: complex
    source_map: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.array([
            [self.alpha1, self.beta1, self.gamma1, self.delta1],
            [self.alpha2, self.beta2, self.gamma2, self.delta2],
        ], dtype=complex)


@dataclass(frozen=True)
class PropagationSystem:
    """The 4x4 tangential ODE generator at one (kpar, s) point.

    The tangential state obeys dL/dz +- matrix @ L = G with the upper
    sign for the forward direction; ``coeffs`` recovers (Ez, Hz).
    """

    matrix: np.ndarray
    coeffs: LongitudinalCoeffs
    kpar: tuple
    s: complex
    direction: Direction
    units: Units
    blocks: MaxwellBlockSystem
    source: Optional[Callable[[float], np.ndarray]] = None

    def with_source(self, g: Callable[[float], np.ndarray]) -> "PropagationSystem":
        return PropagationSystem(self.matrix, self.coeffs, self.kpar, self.s,
                                 self.direction, self.units, self.blocks, g)


def _pivot_inverse(k: np.ndarray):
    a00, a01 = k[2, 2], k[2, 5]
    a10, a11 = k[5, 2], k[5, 5]
    pivot = a00 * a11 - a01 * a10
    scale = max(abs(a00 * a11), abs(a01 * a10), abs(k).max() ** 2, 1e-300)
    if abs(pivot) <= 1e-14 * scale:
        raise LongitudinalPivotError(
            f"longitudinal elimination pivot vanishes (pivot={pivot!r})",
            pivot=pivot)
    ainv = np.array([[a11, -a01], [-a10, a00]], dtype=complex) / pivot
    return ainv


def eliminate_longitudinal(blocks: MaxwellBlockSystem) -> PropagationSystem:
    """Reduce the six-equation system to the tangential 4x4 ODE generator.

    Solves the two algebraic rows for (Ez, Hz), substitutes into the four
    dynamic rows, and reorders into the (Ex, Ey, Hx, Hy) state.  The
    resulting matrix is even in the transform direction; the direction's
    sign enters the ODE as dL/dz +- matrix L = G.
    """
    k = blocks.kmat
    ainv = _pivot_inverse(k)
    tau = list(_TAU)
    b = k[np.ix_(list(_LONG), tau)]
    coeff = -ainv @ b

    coeffs = LongitudinalCoeffs(
        alpha1=coeff[0, 0], beta1=coeff[0, 1], gamma1=coeff[0, 2], delta1=coeff[0, 3],
        alpha2=coeff[1, 0], beta2=coeff[1, 1], gamma2=coeff[1, 2], delta2=coeff[1, 3],
        source_map=ainv)

    mhat = np.zeros((4, 4), dtype=complex)
    for row, target, sign in _DYNAMIC_ROWS:
        reduced = k[row, tau] + k[row, list(_LONG)] @ coeff
        mhat[target, :] = sign * reduced
    theta = -blocks.direction.sign * mhat

    return PropagationSystem(matrix=theta, coeffs=coeffs, kpar=blocks.kpar,
                             s=blocks.s, direction=blocks.direction,
                             units=blocks.units, blocks=blocks)


def source_reduction_matrix(blocks: MaxwellBlockSystem) -> np.ndarray:
    """The 4x6 linear map taking the raw source to the tangential drive."""
    k = blocks.kmat
    ainv = _pivot_inverse(k)
    smat = np.zeros((4, 6), dtype=complex)
    for row, target, sign in _DYNAMIC_ROWS:
        smat[target, list(_LONG)] = sign * (k[row, list(_LONG)] @ ainv)
        smat[target, row] -= sign
    return smat


def reduce_source(blocks: MaxwellBlockSystem, jvec) -> np.ndarray:
    """Reduce a 6-component source to the 4-component tangential drive G."""
    j = np.asarray(jvec, dtype=complex)
    if j.shape != (6,):
        raise ValueError(f"expected a 6-component source, got shape {j.shape}")
    return source_reduction_matrix(blocks) @ j


def recover_longitudinal(system: PropagationSystem, lam, jvec=None):
    """Recover (Ez, Hz) from the tangential state and the raw source.

    ``jvec`` is the 6-component source at the same z (None means zero).
    """
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (4,):
        raise ValueError(f"expected a 4-component tangential state, got {lam.shape}")
    c = system.coeffs
    ez = c.alpha1 * lam[0] + c.beta1 * lam[1] + c.gamma1 * lam[2] + c.delta1 * lam[3]
    hz = c.alpha2 * lam[0] + c.beta2 * lam[1] + c.gamma2 * lam[2] + c.delta2 * lam[3]
    if jvec is not None:
        j = np.asarray(jvec, dtype=complex)
        src = c.source_map @ j[list(_LONG)]
        ez += src[0]
        hz += src[1]
    return ez, hz


@dataclass(frozen=True)
class SourceJ:
    """The 6-component source of the block system in (kpar, z, s) form.

    Stacks the primed noise polarizations against the initial-field
    spectra: the top three components are -+mu0*s*M' +- B(., 0), the
    bottom three +-s*P' -+ D(., 0), upper signs for the forward direction.
    """

    noise: NoiseSources
    b0: Callable[[float], np.ndarray]
    d0: Callable[[float], np.ndarray]
    s: complex
    direction: Direction
    mu0: float = 1.0

    @classmethod
    def zero(cls, s: complex, direction: Direction,
             mu0: float = 1.0) -> "SourceJ":
        z = np.zeros(3, dtype=complex)
        return cls(noise=NoiseSources.zero(), b0=lambda _: z, d0=lambda _: z,
                   s=s, direction=direction, mu0=mu0)

    @classmethod
    def vacuum(cls, b0, d0, s: complex, direction: Direction,
               mu0: float = 1.0) -> "SourceJ":
        """Vacuum source: initial-field spectra only (no noise polarization)."""
        from .medium import _as_profile
        return cls(noise=NoiseSources.zero(), b0=_as_profile(b0),
                   d0=_as_profile(d0), s=s, direction=direction, mu0=mu0)

    def at(self, z: float) -> np.ndarray:
        sg = self.direction.sign
        p, m = self.noise.at(z)
        b = np.asarray(self.b0(z), dtype=complex)
        d = np.asarray(self.d0(z), dtype=complex)
        top = -sg * self.mu0 * self.s * m + sg * b
        bottom = sg * self.s * p - sg * d
        return np.concatenate([top, bottom])

    def at_many(self, zs) -> np.ndarray:
        """Source samples on many z points, (n, 6).

        Vectorizes when the underlying profiles accept arrays, falling
        back to a per-point loop otherwise.
        """
        zs = np.asarray(zs, dtype=float)

        def tryvec(fn):
            out = np.asarray(fn(zs), dtype=complex)
            if out.shape == (zs.size, 3):
                return out
            if out.shape == (3, zs.size):
                return out.T
            raise ValueError(out.shape)

        try:
            b = tryvec(self.b0)
            d = tryvec(self.d0)
            p = tryvec(self.noise.p)
            m = tryvec(self.noise.m)
        except Exception:
            return np.stack([self.at(float(z)) for z in zs])
        sg = self.direction.sign
        top = -sg * self.mu0 * self.s * m + sg * b
        bottom = sg * self.s * p - sg * d
        return np.concatenate([top, bottom], axis=1)


def tangential_drive(system: PropagationSystem, j: SourceJ) -> Callable[[float], np.ndarray]:
    """The reduced 4-component drive G(z) for a propagation system.

    The callable accepts scalar z (4-vector) or an array ((n, 4)).
    """
    smat = source_reduction_matrix(system.blocks)

    def g(z):
        zs = np.asarray(z, dtype=float)
        if zs.ndim == 0:
            return smat @ j.at(float(zs))
        return j.at_many(zs) @ smat.T

    return g

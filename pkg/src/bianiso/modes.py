"""Eigenmode decomposition of the 4x4 propagation generator.

Layer solutions are superpositions of modes R_j exp(-+Omega_j z) (upper
sign forward), so each eigenvalue's real-part sign decides toward which
infinity the forward factor decays.  Vacuum admits closed forms used both
as fast paths and as oracles for the general eigensolver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .em_system import Direction
from .errors import BranchPointError, ModeDegeneracyError
from .units import NORMALIZED, Units

# eigenvector matrices worse conditioned than this are treated as defective
_DEFECTIVE_COND = 1e12
# |Re Omega| below this fraction of the matrix scale is marginal
_MARGINAL_RTOL = 1e-9
_PHASE_TOL = 1e-8


class DecayClass(enum.Enum):
    """Decay direction of the forward factor exp(-Omega z)."""

    TOWARD_PLUS_INF = "decays_toward_+inf"   # Re Omega > 0
    TOWARD_MINUS_INF = "decays_toward_-inf"  # Re Omega < 0
    MARGINAL = "marginal"


@dataclass(frozen=True)
class ModeBasis:
    """Eigenvalues, eigenvectors (columns) and decay tags at one (kpar, s)."""

    omegas: np.ndarray
    vectors: np.ndarray
    tags: Tuple[DecayClass, ...]
    kpar: tuple
    s: complex

    def indices(self, tag: DecayClass) -> List[int]:
        return [i for i, t in enumerate(self.tags) if t is tag]

    def residual(self, matrix: np.ndarray) -> float:
        """Max mode-equation residual, relative to the matrix scale."""
        scale = max(float(np.max(np.abs(matrix))), 1e-300)
        res = matrix @ self.vectors - self.vectors * self.omegas[None, :]
        return float(np.max(np.abs(res))) / scale


def _classify(re_omega: float, tol: float) -> DecayClass:
    if re_omega > tol:
        return DecayClass.TOWARD_PLUS_INF
    if re_omega < -tol:
        return DecayClass.TOWARD_MINUS_INF
    return DecayClass.MARGINAL


def _normalize_columns(vectors: np.ndarray) -> np.ndarray:
    out = np.array(vectors, dtype=complex)
    for j in range(out.shape[1]):
        col = out[:, j]
        peak = np.max(np.abs(col))
        if peak == 0:
            continue
        col = col / peak
        for comp in col:
            if abs(comp) > _PHASE_TOL:
                col = col * (comp.conjugate() / abs(comp))
                break
        out[:, j] = col
    return out


def eigenmodes(matrix: np.ndarray, kpar=(0.0, 0.0), s: complex = 0.0) -> ModeBasis:
    """Full eigendecomposition of a 4x4 propagation matrix.

    Eigenvalues are sorted by (Re, Im); eigenvectors are scaled to unit
    maximum component with the first significant component rotated to
    positive real phase, so the output is deterministic.  Near-defective
    matrices (eigenvector condition above 1e12) raise.
    """
    theta = np.asarray(matrix, dtype=complex)
    if theta.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("propagation matrix contains non-finite entries")

    w, v = np.linalg.eig(theta)
    cond = float(np.linalg.cond(v))
    if not np.isfinite(cond) or cond > _DEFECTIVE_COND:
        raise ModeDegeneracyError(
            f"propagation matrix is defective or near-defective "
            f"(eigenvector condition {cond:.3e})")

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = _normalize_columns(v[:, order])

    scale = float(np.max(np.abs(theta)))
    tol = _MARGINAL_RTOL * scale
    tags = tuple(_classify(om.real, tol) for om in w)
    return ModeBasis(omegas=w, vectors=v, tags=tags, kpar=tuple(kpar), s=complex(s))


def vacuum_propagation_matrix(kpar, s: complex,
                              units: Units = NORMALIZED,
                              direction: Direction = Direction.FORWARD) -> np.ndarray:
    """Closed-form free-space propagation matrix.

    The reduction is even in the transform direction, so ``direction``
    does not change the result; it is accepted for interface symmetry.
    """
    s = complex(s)
    if s == 0:
        raise ValueError("propagation matrix undefined at s = 0")
    kx, ky = complex(kpar[0]), complex(kpar[1])
    eps0, mu0 = units.eps0, units.mu0
    se = s * eps0
    sm = s * mu0
    return np.array([
        [0.0, 0.0, -kx * ky / se, mu0 * s + kx * kx / se],
        [0.0, 0.0, -mu0 * s - ky * ky / se, kx * ky / se],
        [kx * ky / sm, -eps0 * s - kx * kx / sm, 0.0, 0.0],
        [eps0 * s + ky * ky / sm, -kx * ky / sm, 0.0, 0.0],
    ], dtype=complex)


def vacuum_modes(kpar, s: complex, units: Units = NORMALIZED) -> ModeBasis:
    """Closed-form free-space mode basis.

    Eigenvalues are -+sqrt(kx^2 + ky^2 + s^2 eps0 mu0), each doubly
    degenerate; the eigenvectors keep their closed-form normalization
    (third or fourth component equal to one), which downstream interface
    matching and the scattering polarization conventions rely on.
    """
    s = complex(s)
    if s == 0:
        raise ValueError("vacuum modes undefined at s = 0")
    kx, ky = complex(kpar[0]), complex(kpar[1])
    eps0, mu0 = units.eps0, units.mu0
    arg = kx * kx + ky * ky + s * s * eps0 * mu0
    if arg == 0:
        raise BranchPointError(
            f"vacuum eigenvalue branch point at kpar={kpar}, s={s}")
    root = np.sqrt(arg)
    se_root = s * eps0 * root

    r1 = np.array([-(kx * kx + s * s * eps0 * mu0) / se_root,
                   -kx * ky / se_root, 0.0, 1.0], dtype=complex)
    r2 = np.array([kx * ky / se_root,
                   (ky * ky + s * s * eps0 * mu0) / se_root, 1.0, 0.0], dtype=complex)
    r3 = np.array([(kx * kx + s * s * eps0 * mu0) / se_root,
                   kx * ky / se_root, 0.0, 1.0], dtype=complex)
    r4 = np.array([-kx * ky / se_root,
                   -(ky * ky + s * s * eps0 * mu0) / se_root, 1.0, 0.0], dtype=complex)

    omegas = np.array([-root, -root, root, root], dtype=complex)
    vectors = np.column_stack([r1, r2, r3, r4])

    scale = float(np.max(np.abs(vacuum_propagation_matrix(kpar, s, units))))
    tol = _MARGINAL_RTOL * scale
    tags = tuple(_classify(om.real, tol) for om in omegas)
    return ModeBasis(omegas=omegas, vectors=vectors, tags=tags,
                     kpar=(kx, ky), s=s)


def spectral_projectors(basis: ModeBasis, group_rtol: float = 1e-8):
    """Projectors onto (possibly degenerate) eigenvalue groups.

    Degenerate eigenvectors are basis-arbitrary, so comparisons between
    two decompositions must go through these projectors.
    """
    w = basis.omegas
    vinv = np.linalg.inv(basis.vectors)
    scale = max(1.0, float(np.max(np.abs(w))))
    tol = group_rtol * scale

    groups: List[List[int]] = []
    for i in range(len(w)):
        for g in groups:
            if abs(w[i] - w[g[0]]) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])

    out = []
    for g in groups:
        proj = basis.vectors[:, g] @ vinv[g, :]
        out.append((complex(np.mean(w[g])), proj))
    out.sort(key=lambda p: (p[0].real, p[0].imag))
    return out

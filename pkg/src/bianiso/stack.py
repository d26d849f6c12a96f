"""Multilayer geometry, layer solutions, interface matching and scattering.

A stack is two half-spaces around N >= 0 finite layers, with the first
interface at z = 0.  Per (kpar, s) each region contributes a 4x4
propagation system; the general solution of a region is a superposition
of modes R_j exp(-+Omega_j (z - a_j)) anchored per mode at the interface
it decays away from (so no stored number exceeds exp of the layer
optical thickness), plus a particular solution driven by sources.

Matching enforces continuity of the tangential state at every interface
and decay into the half-spaces; all interface conditions are assembled
into one dense linear system (4N + 4 unknowns) and solved by partial
pivoting, which is algebraically identical to sequential substitution
but stays well conditioned for thick layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .em_system import (Direction, PropagationSystem, SourceJ, assemble_blocks,
                        eliminate_longitudinal, recover_longitudinal,
                        tangential_drive)
from .errors import (EvanescentIncidenceError, ExponentOverflowError,
                     MatchingError, StackGeometryError)
from .medium import EffectiveResponse, Susceptibility, eliminate_magnetization
from .modes import DecayClass, ModeBasis, eigenmodes, vacuum_modes
from .units import NORMALIZED, Units

_EXP_GUARD = 700.0
_MATCH_COND_LIMIT = 1e13
_GL_ORDER = 12

# realization of the 0+ limit for harmonic (scattering) evaluation
TIE_BREAK_EPS = 1e-8


@dataclass(frozen=True)
class Layer:
    """One finite layer: thickness and its susceptibility."""

    thickness: float
    medium: Susceptibility

    def __post_init__(self):
        if not (self.thickness > 0):
            raise StackGeometryError(
                f"layer thickness must be positive, got {self.thickness}")


@dataclass(frozen=True)
class LayerStack:
    """Half-space / finite layers / half-space geometry, first interface at z=0."""

    left: Susceptibility
    layers: Tuple[Layer, ...]
    right: Susceptibility

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def nregions(self) -> int:
        return len(self.layers) + 2

    def interfaces(self) -> np.ndarray:
        th = [lay.thickness for lay in self.layers]
        return np.concatenate([[0.0], np.cumsum(th)])

    def media(self) -> Tuple[Susceptibility, ...]:
        return (self.left,) + tuple(lay.medium for lay in self.layers) + (self.right,)


def region_system(medium: Susceptibility, kpar, s: complex,
                  direction: Direction = Direction.FORWARD,
                  units: Units = NORMALIZED) -> PropagationSystem:
    """Assemble and reduce one region's propagation system at (kpar, s)."""
    if medium.is_vacuum:
        eta = EffectiveResponse.zero()
    else:
        eta = eliminate_magnetization(medium.values(s), units.mu0)
    blocks = assemble_blocks(eta, kpar, s, direction, units)
    return eliminate_longitudinal(blocks)


def _mode_rates(basis: ModeBasis, direction: Direction) -> np.ndarray:
    # z-dependence of mode j is exp(rate_j * (z - anchor_j))
    return -direction.sign * basis.omegas


def general_solution(basis: ModeBasis, coeffs, z, direction: Direction,
                     anchors=None):
    """Homogeneous layer solution sum_j C_j R_j exp(-+Omega_j (z - a_j)).

    ``anchors`` shifts each mode's phase reference (default 0, the plain
    closed form).  z may be a scalar or an array.
    """
    c = np.asarray(coeffs, dtype=complex)
    rates = _mode_rates(basis, direction)
    a = np.zeros(4) if anchors is None else np.asarray(anchors, dtype=float)
    zs = np.asarray(z, dtype=float)
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs)

    expo = rates[None, :] * (zs[:, None] - a[None, :])
    if np.any(np.abs(expo.real) > _EXP_GUARD):
        raise ExponentOverflowError(
            "mode exponential exceeds double range; evaluate with anchors "
            "or restrict the z range")
    out = np.exp(expo) * c[None, :] @ basis.vectors.T
    return out[0] if scalar else out


def _eval_drive(g: Callable, nodes: np.ndarray) -> np.ndarray:
    """Evaluate a 4-component drive on many z points, (n, 4)."""
    try:
        vals = np.asarray(g(nodes), dtype=complex)
        if vals.shape == (nodes.size, 4):
            return vals
        if vals.shape == (4, nodes.size):
            return vals.T
    except Exception:
        pass
    out = np.empty((nodes.size, 4), dtype=complex)
    for i, zp in enumerate(nodes):
        out[i] = np.asarray(g(float(zp)), dtype=complex)
    return out


def particular_solution(system: PropagationSystem, g: Callable, domain,
                        z, basis: Optional[ModeBasis] = None,
                        max_step: Optional[float] = None):
    """Driven layer solution satisfying dL/dz +- matrix L = G on the domain.

    The resolvent kernel is evaluated analytically per eigenmode: each
    mode integrates its drive against a one-sided exponential running
    from the side the mode decays away from, so the kernel never grows.
    Scalar z uses adaptive quadrature; array z uses panel Gauss-Legendre
    with multiplicative recurrences between panel edges.
    """
    z0, z1 = float(domain[0]), float(domain[1])
    if not z1 > z0:
        raise ValueError(f"empty integration domain ({z0}, {z1})")
    if basis is None:
        basis = eigenmodes(system.matrix, system.kpar, system.s)
    rates = _mode_rates(basis, direction=system.direction)
    vinv = np.linalg.inv(basis.vectors)

    zs = np.asarray(z, dtype=float)
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs)
    tol = 1e-12 * max(1.0, z1 - z0)
    if np.any(zs < z0 - tol) or np.any(zs > z1 + tol):
        raise ValueError("evaluation points must lie within the source domain")

    if scalar and zs.size == 1:
        lam = _particular_scalar(rates, basis.vectors, vinv, g, z0, z1, float(zs[0]))
        return lam
    mat = _particular_grid(rates, basis.vectors, vinv, g, z0, z1, zs, max_step)
    return mat[0] if scalar else mat


def _particular_scalar(rates, vectors, vinv, g, z0, z1, z):
    amps = np.zeros(4, dtype=complex)
    for j in range(4):
        rho = rates[j]

        def mode_component(zp: float) -> complex:
            gt = vinv[j, :] @ np.asarray(g(zp), dtype=complex)
            return np.exp(rho * (z - zp)) * gt

        if rho.real <= 0:
            lo, hi, sign = z0, z, 1.0
        else:
            lo, hi, sign = z, z1, -1.0
        if hi - lo <= 0:
            continue
        re = quad(lambda zp: mode_component(zp).real, lo, hi,
                  epsabs=1e-12, epsrel=1e-10, limit=400)[0]
        im = quad(lambda zp: mode_component(zp).imag, lo, hi,
                  epsabs=1e-12, epsrel=1e-10, limit=400)[0]
        amps[j] = sign * (re + 1j * im)
    return vectors @ amps


def _panel_edges(z0, z1, zs, rates, max_step):
    h_rate = 0.5 / max(float(np.max(np.abs(rates))), 1e-300)
    h = min(h_rate, (z1 - z0) / 16.0)
    if max_step is not None:
        h = min(h, float(max_step))
    edges = set(np.round(np.asarray([z0, z1]), 15))
    edges.update(np.round(zs, 15))
    edges = np.array(sorted(edges))
    fine = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil((b - a) / h)))
        fine.extend(a + (b - a) * np.arange(1, n + 1) / n)
    return np.asarray(fine)


def _particular_grid(rates, vectors, vinv, g, z0, z1, zs, max_step):
    edges = _panel_edges(z0, z1, zs, rates, max_step)
    npan = edges.size - 1
    gx, gw = leggauss(_GL_ORDER)

    # all panel nodes at once: (npan, order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = mid[:, None] + half[:, None] * gx[None, :]
    weights = half[:, None] * gw[None, :]

    drive = _eval_drive(g, nodes.ravel())           # (npan*order, 4)
    gtil = (vinv @ drive.T).reshape(4, npan, _GL_ORDER)

    # edge values of the per-mode convolution integrals
    ivals = np.zeros((4, edges.size), dtype=complex)
    for j in range(4):
        rho = rates[j]
        if rho.real <= 0:
            # integrate from the left edge; propagator |exp(rho*h)| <= 1
            acc = 0.0 + 0.0j
            for p in range(npan):
                a, b = edges[p], edges[p + 1]
                pan = np.sum(weights[p] * np.exp(rho * (b - nodes[p])) * gtil[j, p])
                acc = np.exp(rho * (b - a)) * acc + pan
                ivals[j, p + 1] = acc
        else:
            acc = 0.0 + 0.0j
            for p in range(npan - 1, -1, -1):
                a, b = edges[p], edges[p + 1]
                pan = np.sum(weights[p] * np.exp(rho * (a - nodes[p])) * gtil[j, p])
                acc = np.exp(rho * (a - b)) * acc - pan
                ivals[j, p] = acc

    idx = np.searchsorted(edges, zs)
    idx = np.clip(idx, 0, edges.size - 1)
    # snap to the nearest edge (all requested z are edges by construction)
    left_ok = np.abs(edges[np.maximum(idx - 1, 0)] - zs) < np.abs(edges[idx] - zs)
    idx = np.where(left_ok, np.maximum(idx - 1, 0), idx)
    amps = ivals[:, idx]
    return (vectors @ amps).T


@dataclass(frozen=True)
class IncidentAmplitudes:
    """Prescribed amplitudes on the non-decaying half-space modes.

    Entries follow the half-space mode-basis order restricted to the
    prescribed subset (ascending mode index); amplitudes are referenced
    to the adjacent interface plane.
    """

    left: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=complex))
    right: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "left", np.asarray(self.left, dtype=complex))
        object.__setattr__(self, "right", np.asarray(self.right, dtype=complex))


@dataclass(frozen=True)
class StackSolution:
    """Per-region mode coefficients and everything needed to evaluate fields."""

    stack: LayerStack
    kpar: tuple
    s: complex
    direction: Direction
    units: Units
    systems: Tuple[PropagationSystem, ...]
    bases: Tuple[ModeBasis, ...]
    coefficients: Tuple[np.ndarray, ...]
    anchors: Tuple[np.ndarray, ...]
    interfaces: np.ndarray
    particular: Tuple[Optional[Callable], ...]
    sources: Tuple[Optional[SourceJ], ...]
    solved_modes: Tuple[Tuple[int, ...], ...]
    condition: float

    def region_of(self, z: float) -> int:
        return int(np.searchsorted(self.interfaces, z, side="left"))

    def tangential(self, z: float, region: Optional[int] = None) -> np.ndarray:
        r = self.region_of(z) if region is None else region
        lam = general_solution(self.bases[r], self.coefficients[r], z,
                               self.direction, anchors=self.anchors[r])
        if self.particular[r] is not None:
            lam = lam + np.asarray(self.particular[r](z), dtype=complex).reshape(4)
        return lam

    def field(self, z: float, region: Optional[int] = None):
        """Full (E, H) 3-vectors at z, including the longitudinal parts."""
        r = self.region_of(z) if region is None else region
        lam = self.tangential(z, region=r)
        jvec = self.sources[r].at(z) if self.sources[r] is not None else None
        ez, hz = recover_longitudinal(self.systems[r], lam, jvec)
        e = np.array([lam[0], lam[1], ez], dtype=complex)
        h = np.array([lam[2], lam[3], hz], dtype=complex)
        return e, h

    def evaluate(self, zgrid):
        """Tangential state and recovered (Ez, Hz) on a z array.

        Grid points are grouped per region so layer evaluations stay
        vectorized; returns (lam (n, 4), ez (n,), hz (n,)).
        """
        zs = np.asarray(zgrid, dtype=float)
        lam = np.empty((zs.size, 4), dtype=complex)
        ez = np.empty(zs.size, dtype=complex)
        hz = np.empty(zs.size, dtype=complex)
        regions = np.searchsorted(self.interfaces, zs, side="left")
        for r in np.unique(regions):
            idx = np.nonzero(regions == r)[0]
            sub = zs[idx]
            lr = general_solution(self.bases[r], self.coefficients[r], sub,
                                  self.direction, anchors=self.anchors[r])
            if self.particular[r] is not None:
                lr = lr + np.asarray(self.particular[r](sub),
                                     dtype=complex).reshape(sub.size, 4)
            longi = self.systems[r].coeffs.matrix @ lr.T
            if self.sources[r] is not None:
                jm = self.sources[r].at_many(sub)
                longi = longi + self.systems[r].coeffs.source_map @ jm[:, [2, 5]].T
            lam[idx] = lr
            ez[idx] = longi[0]
            hz[idx] = longi[1]
        return lam, ez, hz

    def interface_mismatch(self) -> float:
        """Max tangential jump across all interfaces (diagnostic)."""
        worst = 0.0
        for i, zi in enumerate(self.interfaces):
            a = self.tangential(zi, region=i)
            b = self.tangential(zi, region=i + 1)
            worst = max(worst, float(np.max(np.abs(a - b))))
        return worst

    def slab_mode_matrix(self) -> np.ndarray:
        """Eigenvector array of the single finite layer (columns R_1..R_4)."""
        if len(self.stack.layers) != 1:
            raise StackGeometryError("slab matrices defined for exactly one layer")
        return self.bases[1].vectors.copy()

    def slab_exit_matrix(self) -> Optional[np.ndarray]:
        """Columns R_j exp(-+Omega_j d) at the exit interface, None on overflow."""
        if len(self.stack.layers) != 1:
            raise StackGeometryError("slab matrices defined for exactly one layer")
        d = self.stack.layers[0].thickness
        expo = -self.direction.sign * self.bases[1].omegas * d
        if np.any(np.abs(expo.real) > _EXP_GUARD):
            return None
        return self.bases[1].vectors * np.exp(expo)[None, :]


def _half_space_sets(basis: ModeBasis, direction: Direction, side: str):
    """(allowed, prescribed) mode indices for a half-space."""
    plus = basis.indices(DecayClass.TOWARD_PLUS_INF)
    minus = basis.indices(DecayClass.TOWARD_MINUS_INF)
    if len(plus) != 2 or len(minus) != 2:
        raise StackGeometryError(
            f"{side} half-space modes do not split 2/2 "
            f"(tags: {[t.value for t in basis.tags]})")
    # forward factor exp(-Omega z): TOWARD_MINUS decays at -inf.  The
    # backward factor exp(+Omega z) swaps the roles.
    if direction is Direction.FORWARD:
        toward_minus, toward_plus = minus, plus
    else:
        toward_minus, toward_plus = plus, minus
    if side == "left":
        return toward_minus, toward_plus
    return toward_plus, toward_minus


def _layer_anchors(basis: ModeBasis, direction: Direction,
                   zl: float, zr: float) -> np.ndarray:
    rates = _mode_rates(basis, direction)
    return np.where(rates.real <= 0, zl, zr)


def match_slab(stack: LayerStack, kpar, s: complex,
               direction: Direction = Direction.FORWARD,
               units: Units = NORMALIZED,
               particular: Optional[Sequence[Optional[Callable]]] = None,
               sources: Optional[Sequence[Optional[SourceJ]]] = None,
               incident: Optional[IncidentAmplitudes] = None,
               systems: Optional[Sequence[PropagationSystem]] = None,
               bases: Optional[Sequence[ModeBasis]] = None) -> StackSolution:
    """Solve the interface-matching problem for one (kpar, s) point.

    ``particular`` holds per-region particular solutions (callables of z,
    or None); ``incident`` prescribes amplitudes on the non-decaying
    half-space modes.  Continuity of the tangential state is enforced at
    every interface and the decay conditions zero the forbidden
    half-space coefficients exactly.
    """
    nreg = stack.nregions
    media = stack.media()
    zifc = stack.interfaces()
    kx, ky = complex(kpar[0]), complex(kpar[1])

    if systems is None:
        systems = [region_system(m, (kx, ky), s, direction, units) for m in media]
    systems = list(systems)
    if bases is None:
        bases = [eigenmodes(sys.matrix, (kx, ky), s) for sys in systems]
    bases = list(bases)
    if particular is None:
        particular = [None] * nreg
    particular = list(particular)
    if sources is None:
        sources = [None] * nreg
    sources = list(sources)
    inc = incident or IncidentAmplitudes()

    for r in range(1, nreg - 1):
        tags = bases[r].tags
        if any(t is DecayClass.MARGINAL for t in tags):
            raise StackGeometryError(
                f"marginal mode in layer {r} (tags: {[t.value for t in tags]})")

    left_allowed, left_prescribed = _half_space_sets(bases[0], direction, "left")
    right_allowed, right_prescribed = _half_space_sets(bases[-1], direction, "right")

    anchors: List[np.ndarray] = [np.full(4, zifc[0])]
    for r in range(1, nreg - 1):
        anchors.append(_layer_anchors(bases[r], direction, zifc[r - 1], zifc[r]))
    anchors.append(np.full(4, zifc[-1]))

    # coefficient bookkeeping: prescribed amplitudes fixed, rest unknown
    coeffs = [np.zeros(4, dtype=complex) for _ in range(nreg)]
    coeffs[0][left_prescribed] = inc.left
    coeffs[-1][right_prescribed] = inc.right

    unknowns: List[Tuple[int, int]] = [(0, j) for j in left_allowed]
    for r in range(1, nreg - 1):
        unknowns.extend((r, j) for j in range(4))
    unknowns.extend((nreg - 1, j) for j in right_allowed)
    col_of = {key: i for i, key in enumerate(unknowns)}
    ncols = len(unknowns)
    nrows = 4 * len(zifc)
    if ncols != nrows:
        raise StackGeometryError(
            f"matching system is not square ({nrows} conditions, {ncols} unknowns)")

    amat = np.zeros((nrows, ncols), dtype=complex)
    rhs = np.zeros(nrows, dtype=complex)
    rates = [_mode_rates(b, direction) for b in bases]

    def mode_column(r: int, j: int, zi: float) -> np.ndarray:
        expo = rates[r][j] * (zi - anchors[r][j])
        if abs(expo.real) > _EXP_GUARD:
            raise ExponentOverflowError(
                f"interface factor overflow in region {r} mode {j}")
        return bases[r].vectors[:, j] * np.exp(expo)

    for i, zi in enumerate(zifc):
        rows = slice(4 * i, 4 * i + 4)
        for r, sgn in ((i, +1.0), (i + 1, -1.0)):
            for j in range(4):
                colvec = sgn * mode_column(r, j, zi)
                key = (r, j)
                if key in col_of:
                    amat[rows, col_of[key]] += colvec
                elif coeffs[r][j] != 0:
                    rhs[rows] -= coeffs[r][j] * colvec
        if particular[i] is not None:
            rhs[rows] -= np.asarray(particular[i](zi), dtype=complex).reshape(4)
        if particular[i + 1] is not None:
            rhs[rows] += np.asarray(particular[i + 1](zi), dtype=complex).reshape(4)

    try:
        cond = float(np.linalg.cond(amat))
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > _MATCH_COND_LIMIT:
        raise MatchingError(
            f"interface matching system ill-conditioned (cond={cond:.3e})",
            condition=cond)
    x = np.linalg.solve(amat, rhs)
    for (r, j), xi in zip(unknowns, x):
        coeffs[r][j] = xi

    return StackSolution(
        stack=stack, kpar=(kx, ky), s=complex(s), direction=direction,
        units=units, systems=tuple(systems), bases=tuple(bases),
        coefficients=tuple(coeffs), anchors=tuple(anchors),
        interfaces=zifc, particular=tuple(particular), sources=tuple(sources),
        solved_modes=tuple((tuple(j for (rr, j) in unknowns if rr == r))
                           for r in range(nreg)),
        condition=cond)


def solve_with_sources(stack: LayerStack, kpar, s: complex,
                       direction: Direction = Direction.FORWARD,
                       units: Units = NORMALIZED,
                       sources: Optional[Sequence[Optional[SourceJ]]] = None,
                       support: Optional[Sequence[Optional[tuple]]] = None,
                       incident: Optional[IncidentAmplitudes] = None,
                       max_step: Optional[float] = None) -> StackSolution:
    """Source-driven matching: builds each region's drive and particular part.

    ``support`` gives (zmin, zmax) bounds per region outside of which its
    source vanishes; required for half-space regions with sources.
    """
    nreg = stack.nregions
    media = stack.media()
    zifc = stack.interfaces()
    sources = list(sources) if sources is not None else [None] * nreg
    support = list(support) if support is not None else [None] * nreg

    systems = [region_system(m, kpar, s, direction, units) for m in media]
    bases = [eigenmodes(sys.matrix, kpar, s) for sys in systems]

    lam_p: List[Optional[Callable]] = [None] * nreg
    for r, src in enumerate(sources):
        if src is None:
            continue
        if r == 0:
            if support[r] is None:
                raise StackGeometryError(
                    "a left half-space source needs explicit support bounds")
            dom = (float(support[r][0]), float(zifc[0]))
        elif r == nreg - 1:
            if support[r] is None:
                raise StackGeometryError(
                    "a right half-space source needs explicit support bounds")
            dom = (float(zifc[-1]), float(support[r][1]))
        else:
            dom = (float(zifc[r - 1]), float(zifc[r]))
        g = tangential_drive(systems[r], src)
        basis_r = bases[r]
        sys_r = systems[r]

        def lam(z, _sys=sys_r, _g=g, _dom=dom, _b=basis_r):
            zs = np.asarray(z, dtype=float)
            if zs.ndim == 0:
                # the panel path reuses vectorized drive evaluation
                return particular_solution(_sys, _g, _dom, np.atleast_1d(zs),
                                           basis=_b, max_step=max_step)[0]
            return particular_solution(_sys, _g, _dom, zs, basis=_b,
                                       max_step=max_step)

        lam_p[r] = lam

    return match_slab(stack, kpar, s, direction, units, particular=lam_p,
                      sources=sources, incident=incident, systems=systems,
                      bases=bases)


# ---------------------------------------------------------------------------
# classical harmonic scattering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScatterResult:
    """Reflection/transmission matrices over the (p, s) vacuum polarizations.

    Entries are field-amplitude ratios (H_y ratio for p, E_y ratio for s)
    referenced to the entry interface for reflection and the exit
    interface for transmission.  ``reflect_flux``/``transmit_flux`` are
    z-Poynting-normalized power fractions per incident polarization.
    """

    r: np.ndarray
    t: np.ndarray
    reflect_flux: np.ndarray
    transmit_flux: np.ndarray
    kpar: tuple
    omega: float
    s: complex
    polarizations: Tuple[str, str] = ("p", "s")

    def energy_sums(self) -> np.ndarray:
        return self.reflect_flux + self.transmit_flux


def _poynting_z(v: np.ndarray) -> float:
    # time-averaged z flux of a tangential mode vector (Ex, Ey, Hx, Hy)
    return 0.5 * float(np.real(v[0] * np.conj(v[3]) - v[1] * np.conj(v[2])))


def scattering_basis(kpar, s: complex, units: Units = NORMALIZED) -> ModeBasis:
    """Vacuum mode basis rotated to the plane of incidence.

    Within each degenerate vacuum eigenvalue pair the columns are
    combined into a TM mode (in-plane magnetic field perpendicular to
    kpar) and a TE mode (electric field perpendicular to kpar), ordered
    (p-, s-, p+, s+), each normalized to unit polarization amplitude.
    TM/TE cross terms then carry no z flux, which makes the power
    bookkeeping exact.  At kpar = 0 the closed-form columns already have
    that structure.
    """
    vm = vacuum_modes(kpar, s, units)
    kx, ky = vm.kpar
    knorm = float(np.hypot(abs(kx), abs(ky)))
    if knorm == 0:
        shat = np.array([0.0 + 0.0j, 1.0 + 0.0j])
        cols = [vm.vectors[:, j].copy() for j in range(4)]
    else:
        shat = np.array([-ky, kx], dtype=complex) / knorm
        v = vm.vectors
        cols = [kx * v[:, 0] - ky * v[:, 1],   # TM, decaying toward -inf
                ky * v[:, 0] + kx * v[:, 1],   # TE
                kx * v[:, 2] - ky * v[:, 3],   # TM, decaying toward +inf
                ky * v[:, 2] + kx * v[:, 3]]   # TE

    def amp(vec: np.ndarray, pol: str) -> complex:
        pair = vec[2:4] if pol == "p" else vec[0:2]
        return shat[0] * pair[0] + shat[1] * pair[1]

    pols = ("p", "s", "p", "s")
    for j, (vec, pol) in enumerate(zip(cols, pols)):
        cols[j] = vec / amp(vec, pol)
    vectors = np.column_stack(cols)
    return ModeBasis(omegas=vm.omegas.copy(), vectors=vectors, tags=vm.tags,
                     kpar=vm.kpar, s=vm.s)


def scattering_matrices(stack: LayerStack, kpar, omega: float,
                        units: Units = NORMALIZED,
                        tie_break: float = TIE_BREAK_EPS) -> ScatterResult:
    """R and T of a stack for a propagating harmonic wave from the left.

    The harmonic limit is realized at s = -i*omega + eps with
    eps = tie_break * max(omega, 1), which strictly splits every mode's
    decay direction; two matching solves (unit incident field amplitude
    on each vacuum polarization) populate the columns.  At finite eps the
    fields grow slowly in time, so lossless flux sums sit below one by
    O(eps); the exact identity holds in the tie_break -> 0 limit.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if not (stack.left.is_vacuum and stack.right.is_vacuum):
        raise StackGeometryError(
            "scattering matrices require vacuum half-spaces")
    kx, ky = float(np.real(kpar[0])), float(np.real(kpar[1]))
    k2 = kx * kx + ky * ky
    kvac2 = omega * omega * units.eps0 * units.mu0
    if k2 >= kvac2:
        raise EvanescentIncidenceError(
            f"evanescent incidence (|kpar|^2={k2:.6g} >= (omega/c)^2={kvac2:.6g})")

    eps = tie_break * max(omega, 1.0)
    s = -1j * omega + eps
    direction = Direction.FORWARD

    media = stack.media()
    systems = [region_system(m, (kx, ky), s, direction, units) for m in media]
    vac_basis = scattering_basis((kx, ky), s, units)
    bases = [vac_basis if m.is_vacuum
             else eigenmodes(sys.matrix, (kx, ky), s)
             for m, sys in zip(media, systems)]

    refl_idx = (0, 1)   # (p, s) decaying toward -inf
    inc_idx = (2, 3)    # (p, s) incident from the left
    win = [abs(_poynting_z(vac_basis.vectors[:, j])) for j in range(4)]

    rmat = np.zeros((2, 2), dtype=complex)
    tmat = np.zeros((2, 2), dtype=complex)
    rflux = np.zeros(2)
    tflux = np.zeros(2)

    for col, jinc in enumerate(inc_idx):
        amps = np.zeros(2, dtype=complex)
        amps[col] = 1.0                      # unit incident polarization amplitude
        sol = match_slab(stack, (kx, ky), s, direction, units,
                         incident=IncidentAmplitudes(left=amps),
                         systems=systems, bases=bases)
        for row, jout in enumerate(refl_idx):
            a = sol.coefficients[0][jout]
            rmat[row, col] = a
            rflux[col] += win[jout] * abs(a) ** 2 / win[jinc]
        for row, jout in enumerate(inc_idx):
            a = sol.coefficients[-1][jout]
            tmat[row, col] = a
            tflux[col] += win[jout] * abs(a) ** 2 / win[jinc]

    return ScatterResult(r=rmat, t=tmat, reflect_flux=rflux, transmit_flux=tflux,
                         kpar=(kx, ky), omega=float(omega), s=s)

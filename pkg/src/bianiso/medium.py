"""Material response: coupling models, susceptibilities, and the H-form elimination.

A layer is described by four 3x3 susceptibility kernels acting on (E, B):

    P = P_N + chi_ee * E + chi_eb * B
    M = M_N + chi_me * E + chi_mb * B

The kernels are built from oscillator-bath coupling tensors by a sine
transform over the bath frequency, or specified directly as Lorentz pole
sums or constants.  In the Laplace domain the magnetization is eliminated
in favour of H = B/mu0 - M, producing the effective tensors used by the
field equations:

    P = P'_N + pe * E + ph * H
    M = M'_N + me * E + mh * H
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import EliminationError, QuadratureError

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8
_QUAD_LIMIT = 400

# condition number above which (I - mu0*chi_mb) is treated as singular
_SINGULAR_COND = 1e14

_PRODUCT_KINDS = ("ff", "gg", "fg")
_KIND_TO_NAME = {"ff": "chi_ee", "gg": "chi_mb", "fg": "chi_eb"}


def _as_tensor(a) -> np.ndarray:
    t = np.asarray(a, dtype=float)
    if t.shape != (3, 3):
        raise ValueError(f"expected a 3x3 tensor, got shape {t.shape}")
    return t


# ---------------------------------------------------------------------------
# coupling models
# ---------------------------------------------------------------------------

class CouplingModel:
    """Oscillator-bath coupling tensors f1, f2, g1, g2 as functions of omega.

    Subclasses provide ``product_density(kind, omega)`` returning the 3x3
    integrand tensor for kind "ff" (f1.f1^T + f2.f2^T), "gg" (g-analog)
    or "fg" (f1.g1^T + f2.g2^T), and ``scale`` giving a characteristic
    frequency used to map the semi-infinite quadrature range.
    """

    scale: float = 1.0
    breakpoints = None

    def product_density(self, kind: str, omega: float) -> np.ndarray:
        raise NotImplementedError

    def factorized(self, kind: str):
        """Optional (envelope(omega), constant 3x3) factorization, else None."""
        return None

    def _validate(self) -> None:
        # A density that does not decay makes the transform integrals
        # diverge (the oscillatory rule would silently Abel-sum them),
        # so check the large-omega falloff directly, then probe the
        # actual kernels once.
        far = 1e3 * max(self.scale, 1.0)
        for kind, name in _KIND_TO_NAME.items():
            near = np.abs(self.product_density(kind, self.scale))
            tail = np.abs(self.product_density(kind, far)) / (1.0 + far * far)
            ref = max(float(near.max()), 1e-300)
            if float(tail.max()) > 1e-6 * ref:
                i, j = np.unravel_index(int(np.argmax(tail)), (3, 3))
                raise QuadratureError(
                    f"{name}[{i},{j}]: spectral density does not decay fast "
                    f"enough for the transform integrals to converge")
        susceptibility_time(self, 1.0)
        susceptibility_laplace(self, 1.0 + 0.0j)


class ScalarEnvelopeCoupling(CouplingModel):
    """Couplings sqrt(envelope(omega)) times constant direction tensors.

    The shared envelope is the normalized Lorentzian (2a/pi)/(omega^2 + a^2),
    so every product density is envelope(omega) times a constant tensor and
    the sine/Laplace transforms have closed forms (exposed for use as test
    oracles via :meth:`closed_form_time` and :meth:`closed_form_laplace`).
    """

    def __init__(self, corner: float, f1=None, f2=None, g1=None, g2=None,
                 validate: bool = True):
        if corner <= 0:
            raise ValueError(f"envelope corner frequency must be > 0, got {corner}")
        self.corner = float(corner)
        zero = np.zeros((3, 3))
        self.f1 = _as_tensor(f1) if f1 is not None else zero
        self.f2 = _as_tensor(f2) if f2 is not None else zero
        self.g1 = _as_tensor(g1) if g1 is not None else zero
        self.g2 = _as_tensor(g2) if g2 is not None else zero
        self.scale = self.corner
        self._products = {
            "ff": self.f1 @ self.f1.T + self.f2 @ self.f2.T,
            "gg": self.g1 @ self.g1.T + self.g2 @ self.g2.T,
            "fg": self.f1 @ self.g1.T + self.f2 @ self.g2.T,
        }
        if validate:
            self._validate()

    def envelope(self, omega: float) -> float:
        a = self.corner
        return (2.0 * a / np.pi) / (omega * omega + a * a)

    def product_density(self, kind: str, omega: float) -> np.ndarray:
        return self.envelope(omega) * self._products[kind]

    def factorized(self, kind: str):
        return self.envelope, self._products[kind]

    # closed forms of the shared scalar kernel, for oracle comparisons
    def closed_form_time(self, t: float) -> "SusceptibilityValues":
        a = self.corner
        k = (1.0 - np.exp(-a * t)) / a
        return self._bundle(k)

    def closed_form_laplace(self, s: complex) -> "SusceptibilityValues":
        a = self.corner
        k = 1.0 / (s * (s + a))
        return self._bundle(k)

    def _bundle(self, k) -> "SusceptibilityValues":
        eb = k * self._products["fg"]
        return SusceptibilityValues(
            ee=k * self._products["ff"], eb=eb, me=eb.T.copy(),
            mb=k * self._products["gg"])


class TabulatedCoupling(CouplingModel):
    """Coupling tensors sampled on an omega grid, linearly interpolated.

    The densities are treated as compactly supported: zero outside the
    tabulated range.
    """

    def __init__(self, omega: Sequence[float], f1, f2=None, g1=None, g2=None,
                 validate: bool = True):
        self.omega = np.asarray(omega, dtype=float)
        if self.omega.ndim != 1 or self.omega.size < 2:
            raise ValueError("omega grid must be a 1-D array with at least 2 samples")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if self.omega[0] < 0:
            raise ValueError("omega grid must be non-negative")
        n = self.omega.size
        zero = np.zeros((n, 3, 3))

        def shape(a):
            if a is None:
                return zero
            t = np.asarray(a, dtype=float)
            if t.shape != (n, 3, 3):
                raise ValueError(f"coupling samples must have shape ({n}, 3, 3)")
            return t

        self.f1, self.f2 = shape(f1), shape(f2)
        self.g1, self.g2 = shape(g1), shape(g2)
        self.scale = float(self.omega[-1]) / 2.0
        self.breakpoints = self.omega
        if validate:
            self._validate()

    def _interp(self, samples: np.ndarray, omega: float) -> np.ndarray:
        if omega <= self.omega[0] or omega >= self.omega[-1]:
            if omega == self.omega[0] or omega == self.omega[-1]:
                idx = 0 if omega == self.omega[0] else -1
                return samples[idx]
            return np.zeros((3, 3))
        i = np.searchsorted(self.omega, omega) - 1
        w = (omega - self.omega[i]) / (self.omega[i + 1] - self.omega[i])
        return (1.0 - w) * samples[i] + w * samples[i + 1]

    def product_density(self, kind: str, omega: float) -> np.ndarray:
        if kind == "ff":
            a, b = self._interp(self.f1, omega), self._interp(self.f2, omega)
            return a @ a.T + b @ b.T
        if kind == "gg":
            a, b = self._interp(self.g1, omega), self._interp(self.g2, omega)
            return a @ a.T + b @ b.T
        f1, f2 = self._interp(self.f1, omega), self._interp(self.f2, omega)
        g1, g2 = self._interp(self.g1, omega), self._interp(self.g2, omega)
        return f1 @ g1.T + f2 @ g2.T


# ---------------------------------------------------------------------------
# susceptibility evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SusceptibilityValues:
    """The four 3x3 response tensors of one layer at a single t or s.

    ``ee``/``eb`` act on (E, B) to give P; ``me``/``mb`` give M.
    The structural identity eb = me^T holds by construction.
    """

    ee: np.ndarray
    eb: np.ndarray
    me: np.ndarray
    mb: np.ndarray
    label: str = ""

    @classmethod
    def zero(cls, label: str = "vacuum") -> "SusceptibilityValues":
        z = np.zeros((3, 3), dtype=complex)
        return cls(ee=z, eb=z.copy(), me=z.copy(), mb=z.copy(), label=label)

    def is_zero(self) -> bool:
        return not (self.ee.any() or self.eb.any() or self.me.any() or self.mb.any())


def _quad_checked(f, a, b, what: str, points=None, weight=None, wvar=None) -> float:
    limit = _QUAD_LIMIT if points is None else max(_QUAD_LIMIT, 2 * len(points) + 50)
    kwargs = dict(epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=limit,
                  full_output=1)
    if points is not None:
        kwargs["points"] = points
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
    out = quad(f, a, b, **kwargs)
    val, err = out[0], out[1]
    if not np.isfinite(val) or err > max(QUAD_ABS_TOL * 1e3, abs(val) * 1e-5):
        raise QuadratureError(
            f"quadrature failed for {what}: value={val!r}, error estimate={err!r}")
    return val


def _quad_complex(f, a, b, what: str, points=None) -> complex:
    re = _quad_checked(lambda x: f(x).real, a, b, what, points=points)
    im = _quad_checked(lambda x: f(x).imag, a, b, what, points=points)
    return re + 1j * im


def _inner_points(breakpoints, a, b):
    if breakpoints is None:
        return None
    pts = [float(p) for p in breakpoints if a < p < b]
    return pts or None


def _sine_transform(rho: Callable[[float], float], t: float, scale: float,
                    what: str, breakpoints=None) -> float:
    """Integral of rho(omega) sin(omega t)/omega over [0, inf).

    The finite head is integrated directly (the 0/0 limit is t); the
    oscillatory tail uses the sin-weighted rule so large t stays cheap.
    """
    cut = 4.0 * scale

    def head(om: float) -> float:
        return rho(om) * (t if om == 0.0 else np.sin(om * t) / om)

    val = _quad_checked(head, 0.0, cut, what,
                        points=_inner_points(breakpoints, 0.0, cut))
    val += _quad_checked(lambda om: rho(om) / om, cut, np.inf, what,
                         weight="sin", wvar=t)
    return val


def _laplace_transform(rho: Callable[[float], float], s: complex, scale: float,
                       what: str, breakpoints=None) -> complex:
    """Integral of rho(omega) / (s^2 + omega^2) over [0, inf).

    The kernel has poles at omega = +-sqrt(-s^2).  When the right-hand
    pole sits close to the positive real axis (|s| nearly imaginary, the
    0+ limit) the resonant spike is split off analytically: the kernel
    is partial-fractioned, rho is subtracted at the resonance, and the
    remaining simple-pole integral is a closed-form logarithm.  The
    integration path never crosses the log branch cut because the pole
    keeps a fixed side of the axis.
    """
    cut = 4.0 * max(scale, abs(s), 1.0)
    pts = _inner_points(breakpoints, 0.0, cut)

    def kernel(om: float) -> complex:
        d = s * s + om * om
        if d == 0:
            raise QuadratureError(
                f"{what}: kernel singular at resonant omega={om} for s={s}")
        return rho(om) / d

    pole = np.sqrt(-(s * s) + 0j)
    if pole.real < 0:
        pole = -pole
    near_axis = pole.real > 1e-12 and abs(pole.imag) < 0.5 * pole.real

    if not near_axis:
        head = _quad_complex(kernel, 0.0, cut, what, points=pts)
    else:
        w = pole.real
        rho_res = complex(rho(w))

        def subtracted(om: float) -> complex:
            return (rho(om) - rho_res) / (om - pole)

        def mirror(om: float) -> complex:
            return rho(om) / (om + pole)

        try:
            isub = _quad_complex(subtracted, 0.0, cut, what, points=pts)
            imir = _quad_complex(mirror, 0.0, cut, what, points=pts)
        except QuadratureError as exc:
            raise QuadratureError(
                f"{exc} (resonant omega near {w:.6g})") from None
        ilog = rho_res * (np.log(cut - pole) - np.log(-pole))
        head = (isub + ilog - imir) / (2.0 * pole)

    def tail(u: float) -> complex:
        om = cut + scale * u / (1.0 - u)
        jac = scale / (1.0 - u) ** 2
        return kernel(om) * jac

    return head + _quad_complex(tail, 0.0, 1.0 - 1e-16, what)


def _transform_product(model: CouplingModel, kind: str, transform,
                       what: str) -> np.ndarray:
    """Apply a scalar transform to every component of a product density."""
    fact = model.factorized(kind)
    if fact is not None:
        envelope, const = fact
        if not const.any():
            return np.zeros((3, 3), dtype=complex)
        return transform(envelope, what) * const

    out = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            comp = f"{what}[{i},{j}]"
            out[i, j] = transform(
                lambda om: model.product_density(kind, om)[i, j], comp)
    return out


def susceptibility_time(model: CouplingModel, t: float) -> SusceptibilityValues:
    """Time-domain susceptibility tensors at t >= 0.

    Each tensor is the bath integral of (sin(omega t)/omega) times the
    corresponding coupling product density, evaluated by adaptive
    quadrature (head interval plus sin-weighted tail).
    """
    if not np.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if t < 0:
        raise ValueError(f"causal response only defined for t >= 0, got {t}")
    if t == 0:
        return SusceptibilityValues.zero(label="t=0")

    breaks = getattr(model, "breakpoints", None)

    def transform(rho, what):
        return _sine_transform(rho, t, model.scale, what, breakpoints=breaks)

    ee = _transform_product(model, "ff", transform, "chi_ee")
    eb = _transform_product(model, "fg", transform, "chi_eb")
    mb = _transform_product(model, "gg", transform, "chi_mb")
    return SusceptibilityValues(ee=ee.real, eb=eb.real, me=eb.real.T.copy(),
                                mb=mb.real)


def susceptibility_laplace(model: CouplingModel, s: complex) -> SusceptibilityValues:
    """Laplace-domain susceptibility tensors at Re s > 0.

    Term-by-term transform of the sine kernel: each tensor is the bath
    integral of product_density(omega) / (s^2 + omega^2).
    """
    s = complex(s)
    if s.real < 0:
        raise ValueError(f"Laplace evaluation requires Re s >= 0, got {s}")

    breaks = getattr(model, "breakpoints", None)

    def transform(rho, what):
        return _laplace_transform(rho, s, model.scale, what, breakpoints=breaks)

    ee = _transform_product(model, "ff", transform, "chi_ee")
    eb = _transform_product(model, "fg", transform, "chi_eb")
    mb = _transform_product(model, "gg", transform, "chi_mb")
    return SusceptibilityValues(ee=ee, eb=eb, me=eb.T.copy(), mb=mb)


# ---------------------------------------------------------------------------
# susceptibility function objects (layer materials)
# ---------------------------------------------------------------------------

class Susceptibility:
    """A layer material: susceptibility tensors as functions of s (and t)."""

    label: str = ""

    def values(self, s: complex) -> SusceptibilityValues:
        raise NotImplementedError

    def time_values(self, t: float) -> SusceptibilityValues:
        raise NotImplementedError(f"{type(self).__name__} has no time-domain form")

    @property
    def is_vacuum(self) -> bool:
        return False


class VacuumSusceptibility(Susceptibility):
    label = "vacuum"

    def values(self, s: complex) -> SusceptibilityValues:
        return SusceptibilityValues.zero(label=self.label)

    def time_values(self, t: float) -> SusceptibilityValues:
        return SusceptibilityValues.zero(label=self.label)

    @property
    def is_vacuum(self) -> bool:
        return True


VACUUM = VacuumSusceptibility()


class CouplingSusceptibility(Susceptibility):
    """Susceptibility evaluated from a coupling model by quadrature."""

    def __init__(self, model: CouplingModel, label: str = ""):
        self.model = model
        self.label = label

    def values(self, s: complex) -> SusceptibilityValues:
        v = susceptibility_laplace(self.model, s)
        return SusceptibilityValues(v.ee, v.eb, v.me, v.mb, label=self.label)

    def time_values(self, t: float) -> SusceptibilityValues:
        v = susceptibility_time(self.model, t)
        return SusceptibilityValues(v.ee, v.eb, v.me, v.mb, label=self.label)


@dataclass(frozen=True)
class LorentzPole:
    """One resonance amplitude/(s^2 + gamma s + omega0^2) with 3x3 amplitude."""

    amplitude: np.ndarray
    omega0: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "amplitude", np.asarray(self.amplitude, dtype=complex))
        if self.amplitude.shape != (3, 3):
            raise ValueError("pole amplitude must be a 3x3 tensor")
        if self.omega0 < 0:
            raise ValueError(f"pole frequency must be >= 0, got {self.omega0}")

    def at(self, s: complex) -> np.ndarray:
        return self.amplitude / (s * s + self.gamma * s + self.omega0 ** 2)

    def at_time(self, t: float) -> np.ndarray:
        # damped-sine inverse transform of 1/(s^2 + gamma s + omega0^2)
        hg = 0.5 * self.gamma
        disc = self.omega0 ** 2 - hg * hg
        if disc > 0:
            nu = np.sqrt(disc)
            k = np.exp(-hg * t) * np.sin(nu * t) / nu
        elif disc == 0:
            k = np.exp(-hg * t) * t
        else:
            nu = np.sqrt(-disc)
            k = np.exp(-hg * t) * np.sinh(nu * t) / nu
        return self.amplitude * k


class PoleSusceptibility(Susceptibility):
    """Susceptibility given directly as Lorentz pole sums per channel.

    Only the ee, me and mb channels are specified; eb is derived as me^T
    so the structural transpose identity holds by construction.
    """

    def __init__(self, ee_poles: Sequence[LorentzPole] = (),
                 me_poles: Sequence[LorentzPole] = (),
                 mb_poles: Sequence[LorentzPole] = (),
                 label: str = ""):
        self.ee_poles = tuple(ee_poles)
        self.me_poles = tuple(me_poles)
        self.mb_poles = tuple(mb_poles)
        self.label = label

    @staticmethod
    def _sum(poles, s):
        out = np.zeros((3, 3), dtype=complex)
        for p in poles:
            out += p.at(s)
        return out

    def values(self, s: complex) -> SusceptibilityValues:
        me = self._sum(self.me_poles, s)
        return SusceptibilityValues(
            ee=self._sum(self.ee_poles, s), eb=me.T.copy(), me=me,
            mb=self._sum(self.mb_poles, s), label=self.label)

    def time_values(self, t: float) -> SusceptibilityValues:
        if t < 0:
            raise ValueError("causal response only defined for t >= 0")

        def tsum(poles):
            out = np.zeros((3, 3), dtype=complex)
            for p in poles:
                out += p.at_time(t)
            return out

        me = tsum(self.me_poles)
        return SusceptibilityValues(ee=tsum(self.ee_poles), eb=me.T.copy(),
                                    me=me, mb=tsum(self.mb_poles), label=self.label)


class ConstantSusceptibility(Susceptibility):
    """s-independent tensors (instantaneous response), for test media.

    eb is derived as me^T.  A nondispersive dielectric of index n in a
    unit system with permittivity eps0 has ee = (n^2 - 1) * eps0 * I.
    """

    def __init__(self, ee=None, me=None, mb=None, label: str = ""):
        zero = np.zeros((3, 3), dtype=complex)
        self.ee = np.asarray(ee, dtype=complex) if ee is not None else zero
        self.me = np.asarray(me, dtype=complex) if me is not None else zero.copy()
        self.mb = np.asarray(mb, dtype=complex) if mb is not None else zero.copy()
        self.label = label

    def values(self, s: complex) -> SusceptibilityValues:
        return SusceptibilityValues(ee=self.ee, eb=self.me.T.copy(),
                                    me=self.me, mb=self.mb, label=self.label)


def isotropic_dielectric(n: complex, eps0: float = 1.0,
                         label: str = "") -> ConstantSusceptibility:
    """Nondispersive isotropic dielectric of refractive index n."""
    if n == 0:
        raise ValueError("refractive index must be nonzero")
    ee = (complex(n) ** 2 - 1.0) * eps0 * np.eye(3)
    return ConstantSusceptibility(ee=ee, label=label or f"n={n}")


# ---------------------------------------------------------------------------
# magnetization elimination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveResponse:
    """Effective tensors relating (P, M) to (E, H) after eliminating M.

    ``convention`` records whether the tensors come from the direct
    elimination ("derived", the solver default) or from the alternative
    closed formulas kept for comparison reporting ("printed").
    ``condition`` is the condition number of the eliminated matrix.
    """

    pe: np.ndarray
    ph: np.ndarray
    me: np.ndarray
    mh: np.ndarray
    convention: str = "derived"
    condition: float = 1.0

    @classmethod
    def zero(cls) -> "EffectiveResponse":
        z = np.zeros((3, 3), dtype=complex)
        return cls(pe=z, ph=z.copy(), me=z.copy(), mh=z.copy())

    def is_zero(self) -> bool:
        return not (self.pe.any() or self.ph.any() or self.me.any() or self.mh.any())


def _inverted(core: np.ndarray, mu0: float, what: str):
    eye = np.eye(3)
    mat = eye - mu0 * core
    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > _SINGULAR_COND:
        raise EliminationError(
            f"(I - mu0*{what}) is numerically singular (cond={cond:.3e})",
            condition=cond)
    return np.linalg.inv(mat), cond


def eliminate_magnetization(chi: SusceptibilityValues, mu0: float = 1.0,
                            convention: str = "derived") -> EffectiveResponse:
    """Eliminate M from the B-form constitutive relations at one s.

    With B = mu0*(H + M), solving the M relation for M and substituting
    into the P relation gives

        me = (I - mu0*chi_mb)^-1 chi_me
        mh = mu0 (I - mu0*chi_mb)^-1 chi_mb
        pe = chi_ee + mu0 chi_eb (I - mu0*chi_mb)^-1 chi_me
        ph = mu0 chi_eb (I - mu0*chi_mb)^-1

    convention="printed" instead returns the alternative closed formulas
    (which invert I - mu0*chi_me and swap the chi_me/chi_mb roles); they
    are kept only for discrepancy reporting and fail the residual identity
    whenever chi_me != chi_mb.
    """
    if convention not in ("derived", "printed"):
        raise ValueError(f"unknown elimination convention {convention!r}")

    if convention == "derived":
        if not (chi.eb.any() or chi.me.any() or chi.mb.any()):
            z = np.zeros((3, 3), dtype=complex)
            return EffectiveResponse(pe=chi.ee.copy(), ph=z, me=z.copy(),
                                     mh=z.copy(), convention=convention)
        inv, cond = _inverted(chi.mb, mu0, "chi_mb")
        me = inv @ chi.me
        mh = mu0 * (inv @ chi.mb)
        ph = mu0 * (chi.eb @ inv)
        pe = chi.ee + mu0 * (chi.eb @ (inv @ chi.me))
        return EffectiveResponse(pe=pe, ph=ph, me=me, mh=mh,
                                 convention=convention, condition=cond)

    inv, cond = _inverted(chi.me, mu0, "chi_me")
    me = inv @ chi.mb
    mh = mu0 * (chi.me @ inv)
    ph = mu0 * (chi.eb @ inv)
    pe = chi.ee + mu0 * (chi.eb @ (inv @ chi.mb))
    return EffectiveResponse(pe=pe, ph=ph, me=me, mh=mh,
                             convention=convention, condition=cond)


def elimination_comparison(chi: SusceptibilityValues, mu0: float = 1.0) -> dict:
    """Entrywise discrepancy report between the two elimination conventions."""
    derived = eliminate_magnetization(chi, mu0, "derived")
    printed = eliminate_magnetization(chi, mu0, "printed")
    report = {"convention_pair": ("derived", "printed")}
    for name in ("pe", "ph", "me", "mh"):
        d = getattr(derived, name)
        p = getattr(printed, name)
        diff = float(np.max(np.abs(d - p)))
        report[name] = {"max_abs_difference": diff,
                        "derived_norm": float(np.linalg.norm(d)),
                        "printed_norm": float(np.linalg.norm(p))}
    report["agree"] = all(report[n]["max_abs_difference"] < 1e-14
                          for n in ("pe", "ph", "me", "mh"))
    return report


# ---------------------------------------------------------------------------
# noise sources
# ---------------------------------------------------------------------------

def _as_profile(value) -> Callable[[float], np.ndarray]:
    if callable(value):
        return value
    vec = np.asarray(value, dtype=complex)
    if vec.shape != (3,):
        raise ValueError("noise source must be a 3-vector or a z-callable")

    def profile(z):
        zs = np.asarray(z)
        if zs.ndim == 0:
            return vec
        return np.broadcast_to(vec, (zs.size, 3))

    return profile


@dataclass(frozen=True)
class NoiseSources:
    """Classical amplitude fields standing in for the noise polarizations.

    ``p`` and ``m`` map z to complex 3-vectors in the (kpar, z, s)
    representation; both are identically zero in vacuum regions.
    """

    p: Callable[[float], np.ndarray]
    m: Callable[[float], np.ndarray]
    primed: bool = False

    @classmethod
    def zero(cls) -> "NoiseSources":
        return cls.constant(np.zeros(3, dtype=complex), np.zeros(3, dtype=complex))

    @classmethod
    def constant(cls, p, m) -> "NoiseSources":
        return cls(p=_as_profile(p), m=_as_profile(m))

    def at(self, z: float):
        return np.asarray(self.p(z), dtype=complex), np.asarray(self.m(z), dtype=complex)


def transform_noise_sources(chi: SusceptibilityValues, raw: NoiseSources,
                            mu0: float = 1.0,
                            convention: str = "derived") -> NoiseSources:
    """Map raw noise polarizations to their primed (H-form) counterparts.

    Uses the same eliminated matrix as :func:`eliminate_magnetization`:
    m' = (I - mu0*chi_mb)^-1 m and p' = p + mu0 chi_eb (I - mu0*chi_mb)^-1 m.
    """
    if convention not in ("derived", "printed"):
        raise ValueError(f"unknown elimination convention {convention!r}")
    core = chi.mb if convention == "derived" else chi.me
    if not (core.any() or chi.eb.any()):
        return NoiseSources(p=raw.p, m=raw.m, primed=True)
    inv, _ = _inverted(core, mu0, "chi_mb" if convention == "derived" else "chi_me")
    cross = mu0 * (chi.eb @ inv)

    def primed_m(z: float) -> np.ndarray:
        return inv @ np.asarray(raw.m(z), dtype=complex)

    def primed_p(z: float) -> np.ndarray:
        return np.asarray(raw.p(z), dtype=complex) + cross @ np.asarray(
            raw.m(z), dtype=complex)

    return NoiseSources(p=primed_p, m=primed_m, primed=True)

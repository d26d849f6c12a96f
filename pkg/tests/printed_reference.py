"""Hand-expanded entry formulas for the longitudinal reduction.

These duplicate, scalar by scalar, the closed-form coefficients and the
16 entries of the reduced 4x4 generator, plus the reduced source terms.
They exist as an independent check of the generic Schur elimination in
``bianiso.em_system``; keep them hand-written and do not refactor them
to share code with the package.

All entries below are the forward-direction (upper-sign) values; the
production code's direction parity is tested separately.
"""

import numpy as np


def underlined_blocks(eta, kx, ky, s, eps0=1.0, mu0=1.0):
    """Algebraic parts of the T, Y, Z, W blocks (forward signs)."""
    ik_x, ik_y = 1j * kx, 1j * ky
    t = np.zeros((3, 3), dtype=complex)
    w = np.zeros((3, 3), dtype=complex)
    # curl entries that survive the transverse Fourier transform
    t[0, 2], t[2, 0] = ik_y, -ik_y
    t[1, 2], t[2, 1] = -ik_x, ik_x
    w[0, 2], w[2, 0] = ik_y, -ik_y
    w[1, 2], w[2, 1] = -ik_x, ik_x
    for i in range(3):
        for j in range(3):
            t[i, j] += mu0 * s * eta.me[i, j]
            w[i, j] -= s * eta.ph[i, j]
    y = mu0 * s * (np.eye(3) + eta.mh)
    z = -s * (eps0 * np.eye(3) + eta.pe)
    return t, y, z, w


def printed_coefficients(eta, kx, ky, s, eps0=1.0, mu0=1.0):
    """The eight closed-form elimination scalars (alpha1 ... delta2)."""
    t, y, z, w = underlined_blocks(eta, kx, ky, s, eps0, mu0)
    piv = t[2, 2] * w[2, 2] - z[2, 2] * y[2, 2]
    alpha1 = (y[2, 2] * z[2, 0] - w[2, 2] * t[2, 0]) / piv
    beta1 = (y[2, 2] * z[2, 1] - w[2, 2] * t[2, 1]) / piv
    gamma1 = (y[2, 2] * w[2, 0] - w[2, 2] * y[2, 0]) / piv
    delta1 = (y[2, 2] * w[2, 1] - w[2, 2] * y[2, 1]) / piv
    alpha2 = (z[2, 2] * t[2, 0] - t[2, 2] * z[2, 0]) / piv
    beta2 = (z[2, 2] * t[2, 1] - t[2, 2] * z[2, 1]) / piv
    gamma2 = (z[2, 2] * y[2, 0] - t[2, 2] * w[2, 0]) / piv
    delta2 = (z[2, 2] * y[2, 1] - t[2, 2] * w[2, 1]) / piv
    return (alpha1, beta1, gamma1, delta1, alpha2, beta2, gamma2, delta2)


def printed_theta(eta, kx, ky, s, eps0=1.0, mu0=1.0):
    """The closed-form reduced 4x4 generator, entry by entry.

    The leading term of the (4, 4) entry is +s*eta.ph[0, 1]; the sign
    follows the row pattern shared with the (2, 2) and (3, 3) entries
    and a direct constitutive-law expansion of that row.
    """
    t, y, z, w = underlined_blocks(eta, kx, ky, s, eps0, mu0)
    a1, b1, g1, d1, a2, b2, g2, d2 = printed_coefficients(eta, kx, ky, s, eps0, mu0)
    th = np.empty((4, 4), dtype=complex)
    th[0, 0] = mu0 * s * eta.me[1, 0] + t[1, 2] * a1 + y[1, 2] * a2
    th[0, 1] = t[1, 1] + t[1, 2] * b1 + y[1, 2] * b2
    th[0, 2] = y[1, 0] + t[1, 2] * g1 + y[1, 2] * g2
    th[0, 3] = y[1, 1] + t[1, 2] * d1 + y[1, 2] * d2
    th[1, 0] = -t[0, 0] - t[0, 2] * a1 - y[0, 2] * a2
    th[1, 1] = -mu0 * s * eta.me[0, 1] - t[0, 2] * b1 - y[0, 2] * b2
    th[1, 2] = -y[0, 0] - t[0, 2] * g1 - y[0, 2] * g2
    th[1, 3] = -y[0, 1] - t[0, 2] * d1 - y[0, 2] * d2
    th[2, 0] = z[1, 0] + z[1, 2] * a1 + w[1, 2] * a2
    th[2, 1] = z[1, 1] + z[1, 2] * b1 + w[1, 2] * b2
    th[2, 2] = -s * eta.ph[1, 0] + z[1, 2] * g1 + w[1, 2] * g2
    th[2, 3] = w[1, 1] + z[1, 2] * d1 + w[1, 2] * d2
    th[3, 0] = -z[0, 0] - z[0, 2] * a1 - w[0, 2] * a2
    th[3, 1] = -z[0, 1] - z[0, 2] * b1 - w[0, 2] * b2
    th[3, 2] = -w[0, 0] - z[0, 2] * g1 - w[0, 2] * g2
    th[3, 3] = s * eta.ph[0, 1] - z[0, 2] * d1 - w[0, 2] * d2
    return th


def printed_source(eta, kx, ky, s, jvec, eps0=1.0, mu0=1.0):
    """The closed-form reduced source (forward direction)."""
    t, y, z, w = underlined_blocks(eta, kx, ky, s, eps0, mu0)
    piv = t[2, 2] * w[2, 2] - z[2, 2] * y[2, 2]
    j = np.asarray(jvec, dtype=complex)
    g = np.empty(4, dtype=complex)
    g[0] = j[1] + (z[2, 2] * y[1, 2] - t[1, 2] * w[2, 2]) / piv * j[2] \
        + (t[1, 2] * y[2, 2] - y[1, 2] * t[2, 2]) / piv * j[5]
    g[1] = -j[0] + (t[0, 2] * w[2, 2] - y[0, 2] * z[2, 2]) / piv * j[2] \
        + (t[2, 2] * y[0, 2] - y[2, 2] * t[0, 2]) / piv * j[5]
    g[2] = j[4] + (w[1, 2] * z[2, 2] - z[1, 2] * w[2, 2]) / piv * j[2] \
        + (z[1, 2] * y[2, 2] - w[1, 2] * t[2, 2]) / piv * j[5]
    g[3] = -j[3] + (w[2, 2] * z[0, 2] - z[2, 2] * w[0, 2]) / piv * j[2] \
        + (w[0, 2] * t[2, 2] - z[0, 2] * y[2, 2]) / piv * j[5]
    return g


def printed_longitudinal(eta, kx, ky, s, lam, jvec=None, eps0=1.0, mu0=1.0):
    """Closed-form (Ez, Hz) recovery (forward direction)."""
    t, y, z, w = underlined_blocks(eta, kx, ky, s, eps0, mu0)
    piv = t[2, 2] * w[2, 2] - z[2, 2] * y[2, 2]
    a1, b1, g1, d1, a2, b2, g2, d2 = printed_coefficients(eta, kx, ky, s, eps0, mu0)
    lam = np.asarray(lam, dtype=complex)
    ez = a1 * lam[0] + b1 * lam[1] + g1 * lam[2] + d1 * lam[3]
    hz = a2 * lam[0] + b2 * lam[1] + g2 * lam[2] + d2 * lam[3]
    if jvec is not None:
        j = np.asarray(jvec, dtype=complex)
        ez += (w[2, 2] * j[2] - y[2, 2] * j[5]) / piv
        hz += (t[2, 2] * j[5] - z[2, 2] * j[2]) / piv
    return ez, hz

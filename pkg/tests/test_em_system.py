import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import bianiso as bi
from bianiso.em_system import source_reduction_matrix
from conftest import random_response
from printed_reference import (printed_coefficients, printed_longitudinal,
                               printed_source, printed_theta)

FWD = bi.Direction.FORWARD
BWD = bi.Direction.BACKWARD


def vacuum_blocks(kpar=(1.0, 0.0), s=1.0, direction=FWD):
    return bi.assemble_blocks(bi.EffectiveResponse.zero(), kpar, s, direction)


class TestAssembleBlocks:
    def test_vacuum_forward_blocks(self):
        blocks = vacuum_blocks()
        k = blocks.kmat
        assert_allclose(k[:3, 3:], 1.0 * np.eye(3))          # mu0*s*(I + mh)
        assert_allclose(k[3:, :3], -1.0 * np.eye(3))         # -s*(eps0*I + pe)
        assert k[0, 2] == 0.0                                # i*ky with ky = 0
        assert k[1, 2] == -1.0j                              # -i*kx
        assert k[2, 1] == 1.0j

    def test_vacuum_backward_flips_signs(self):
        f = vacuum_blocks(direction=FWD).kmat
        b = vacuum_blocks(direction=BWD).kmat
        assert_allclose(b, -f)                                # sign duality

    def test_me_entry_enters_t_block(self):
        eta = bi.EffectiveResponse.zero()
        me = np.zeros((3, 3), dtype=complex)
        me[0, 1] = 0.2
        eta = bi.EffectiveResponse(pe=eta.pe, ph=eta.ph, me=me, mh=eta.mh)
        blocks = bi.assemble_blocks(eta, (0.0, 0.0), 1.0, FWD)
        assert blocks.kmat[0, 1] == pytest.approx(0.2)

    def test_derivative_pattern(self):
        d = bi.derivative_pattern()
        expected = np.zeros((6, 6))
        expected[0, 1] = -1.0
        expected[1, 0] = 1.0
        expected[3, 4] = -1.0
        expected[4, 3] = 1.0
        assert_array_equal(d, expected)


class TestEliminateLongitudinal:
    def test_vacuum_k10(self):
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((1.0, 0.0), 1.0))
        expected = np.array([[0, 0, 0, 2], [0, 0, -1, 0],
                             [0, -2, 0, 0], [1, 0, 0, 0]], dtype=complex)
        assert_allclose(sys_.matrix, expected, atol=1e-15)

    def test_vacuum_normal_incidence(self):
        s = 1.7 + 0.4j
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((0.0, 0.0), s))
        expected = np.array([[0, 0, 0, s], [0, 0, -s, 0],
                             [0, -s, 0, 0], [s, 0, 0, 0]], dtype=complex)
        assert_allclose(sys_.matrix, expected, atol=1e-15)

    def test_vacuum_coefficients(self):
        kx, ky, s = 0.8, -0.6, 1.3
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((kx, ky), s))
        c = sys_.coeffs
        assert c.alpha1 == c.beta1 == c.gamma2 == c.delta2 == 0
        assert_allclose(c.gamma1, -1j * ky / s, atol=1e-15)
        assert_allclose(c.delta1, 1j * kx / s, atol=1e-15)
        assert_allclose(c.alpha2, 1j * ky / s, atol=1e-15)
        assert_allclose(c.beta2, -1j * kx / s, atol=1e-15)

    def test_matches_closed_form_entries(self, rng):
        for _ in range(100):
            eta = random_response(rng)
            kx, ky = rng.uniform(-2, 2, 2)
            s = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
            sys_ = bi.eliminate_longitudinal(
                bi.assemble_blocks(eta, (kx, ky), s, FWD))
            ref = printed_theta(eta, kx, ky, s)
            scale = max(1.0, float(np.max(np.abs(ref))))
            assert np.max(np.abs(sys_.matrix - ref)) < 1e-12 * scale
            got = sys_.coeffs
            mine = (got.alpha1, got.beta1, got.gamma1, got.delta1,
                    got.alpha2, got.beta2, got.gamma2, got.delta2)
            for a, b in zip(mine, printed_coefficients(eta, kx, ky, s)):
                assert abs(a - b) < 1e-12 * max(1.0, abs(b))

    def test_direction_parity(self, rng):
        for _ in range(20):
            eta = random_response(rng)
            kx, ky = rng.uniform(-2, 2, 2)
            s = complex(rng.uniform(0.2, 3), rng.uniform(-3, 3))
            thf = bi.eliminate_longitudinal(
                bi.assemble_blocks(eta, (kx, ky), s, FWD)).matrix
            thb = bi.eliminate_longitudinal(
                bi.assemble_blocks(eta, (kx, ky), s, BWD)).matrix
            assert_allclose(thf, thb, atol=1e-13 * max(1, np.max(np.abs(thf))))

    def test_vanishing_pivot_raises(self):
        # kill all four pivot entries: Y33 via mh, Z33 via pe, T33/W33 stay 0
        mh = np.zeros((3, 3), dtype=complex)
        mh[2, 2] = -1.0
        pe = np.zeros((3, 3), dtype=complex)
        pe[2, 2] = -1.0
        eta = bi.EffectiveResponse(pe=pe, ph=np.zeros((3, 3), dtype=complex),
                                   me=np.zeros((3, 3), dtype=complex), mh=mh)
        blocks = bi.assemble_blocks(eta, (0.3, 0.1), 1.0, FWD)
        with pytest.raises(bi.LongitudinalPivotError) as err:
            bi.eliminate_longitudinal(blocks)
        assert err.value.pivot is not None


class TestReduceSource:
    def test_zero_source(self):
        blocks = vacuum_blocks((0.7, -0.3), 1.2)
        assert_array_equal(bi.reduce_source(blocks, np.zeros(6)),
                           np.zeros(4, dtype=complex))

    def test_vacuum_forward_first_component(self):
        kx, s = 0.9, 1.4
        b, d = 0.31, -0.77
        blocks = vacuum_blocks((kx, 0.0), s)
        jvec = np.array([0, b, 0, 0, 0, -d], dtype=complex)  # +B, -D stacking
        g = bi.reduce_source(blocks, jvec)
        assert_allclose(g[0], b + (1j * kx / s) * d, atol=1e-14)

    def test_backward_flips_all_components(self, rng):
        eta = random_response(rng)
        kx, ky = 0.4, -1.1
        s = 0.8 + 0.5j
        # the reduction map itself is even in the transform direction ...
        j = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        gf = bi.reduce_source(bi.assemble_blocks(eta, (kx, ky), s, FWD), j)
        gb = bi.reduce_source(bi.assemble_blocks(eta, (kx, ky), s, BWD), j)
        assert_allclose(gb, gf, atol=1e-13 * max(1, np.max(np.abs(gf))))
        # ... so the direction flip of the assembled source flips G entirely
        b0 = rng.standard_normal(3)
        d0 = rng.standard_normal(3)
        jf = bi.SourceJ.vacuum(b0, d0, s=s, direction=FWD).at(0.0)
        jb = bi.SourceJ.vacuum(b0, d0, s=s, direction=BWD).at(0.0)
        gf2 = bi.reduce_source(bi.assemble_blocks(eta, (kx, ky), s, FWD), jf)
        gb2 = bi.reduce_source(bi.assemble_blocks(eta, (kx, ky), s, BWD), jb)
        assert_allclose(gb2, -gf2, atol=1e-13 * max(1, np.max(np.abs(gf2))))

    def test_matches_closed_form(self, rng):
        for _ in range(50):
            eta = random_response(rng)
            kx, ky = rng.uniform(-2, 2, 2)
            s = complex(rng.uniform(0.2, 4), rng.uniform(-4, 4))
            j = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            blocks = bi.assemble_blocks(eta, (kx, ky), s, FWD)
            got = bi.reduce_source(blocks, j)
            ref = printed_source(eta, kx, ky, s, j)
            assert_allclose(got, ref, atol=1e-12 * max(1, np.max(np.abs(ref))))

    def test_reduction_matrix_is_linear_map(self, rng):
        blocks = bi.assemble_blocks(random_response(rng), (0.5, 0.2),
                                    1.1 + 0.7j, FWD)
        smat = source_reduction_matrix(blocks)
        j = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert_allclose(smat @ j, bi.reduce_source(blocks, j), atol=1e-14)


class TestRecoverLongitudinal:
    def test_zero_fields(self):
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((0.5, 0.2), 1.0))
        ez, hz = bi.recover_longitudinal(sys_, np.zeros(4))
        assert ez == 0 and hz == 0

    def test_vacuum_hy_only(self):
        kx, s = 0.8, 1.25
        h = 2.0 - 0.5j
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((kx, 0.0), s))
        ez, hz = bi.recover_longitudinal(sys_, np.array([0, 0, 0, h]))
        assert_allclose(ez, (1j * kx / s) * h, atol=1e-14)
        assert hz == 0

    def test_vacuum_plane_wave_z_component(self):
        # exact plane wave on the vacuum dispersion: s = -i omega,
        # k = (kx, ky, kz), E transverse to k, H = k x E / (omega mu0)
        omega = 1.3
        kx, ky = 0.4, 0.25
        kz = np.sqrt(omega ** 2 - kx ** 2 - ky ** 2)
        k = np.array([kx, ky, kz])
        e = np.cross(k, np.array([0.3, -0.2, 0.9]))
        e = e / np.linalg.norm(e)
        h = np.cross(k, e) / omega
        s = -1j * omega + 1e-30
        sys_ = bi.eliminate_longitudinal(vacuum_blocks((kx, ky), s))
        lam = np.array([e[0], e[1], h[0], h[1]], dtype=complex)
        ez, hz = bi.recover_longitudinal(sys_, lam)
        assert abs(ez - e[2]) < 1e-12
        assert abs(hz - h[2]) < 1e-12

    def test_matches_closed_form_with_sources(self, rng):
        eta = random_response(rng)
        kx, ky, s = 0.3, -0.9, 1.6 + 2.2j
        sys_ = bi.eliminate_longitudinal(bi.assemble_blocks(eta, (kx, ky), s, FWD))
        lam = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        j = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        got = bi.recover_longitudinal(sys_, lam, j)
        ref = printed_longitudinal(eta, kx, ky, s, lam, j)
        assert_allclose(got, ref, atol=1e-12)


class TestFullSystemResidual:
    def test_mode_solution_satisfies_all_six_equations(self, rng):
        # algebraic check at a point: build a mode, recover (Ez, Hz), and
        # substitute into every row of the six-equation system
        for direction in (FWD, BWD):
            eta = random_response(rng)
            kx, ky = rng.uniform(-1.5, 1.5, 2)
            s = complex(rng.uniform(0.3, 3), rng.uniform(-3, 3))
            blocks = bi.assemble_blocks(eta, (kx, ky), s, direction)
            sys_ = bi.eliminate_longitudinal(blocks)
            basis = bi.eigenmodes(sys_.matrix, (kx, ky), s)
            j = basis.omegas.argmax()
            lam = basis.vectors[:, j]
            ez, hz = bi.recover_longitudinal(sys_, lam)
            fvec = np.array([lam[0], lam[1], ez, lam[2], lam[3], hz])
            # d/dz of the mode is -+Omega on every tangential component;
            # the algebraic rows carry no derivative so Ez, Hz slots are 0
            dlam = -direction.sign * basis.omegas[j] * lam
            dfvec = np.array([dlam[0], dlam[1], 0, dlam[2], dlam[3], 0])
            residual = bi.derivative_pattern() @ dfvec + blocks.kmat @ fvec
            scale = max(1.0, float(np.max(np.abs(fvec))))
            assert np.max(np.abs(residual)) < 1e-10 * scale


class TestSourceJ:
    def test_vacuum_stacking_signs(self):
        b0 = np.array([0.1, 0.2, 0.3])
        d0 = np.array([0.4, 0.5, 0.6])
        s = 1.5
        jf = bi.SourceJ.vacuum(b0, d0, s=s, direction=FWD).at(0.0)
        assert_allclose(jf[:3], b0)
        assert_allclose(jf[3:], -d0)
        jb = bi.SourceJ.vacuum(b0, d0, s=s, direction=BWD).at(0.0)
        assert_allclose(jb, -jf)

    def test_noise_terms(self):
        s = 2.0
        mu0 = 1.0
        noise = bi.NoiseSources.constant([1.0, 0, 0], [0, 1.0, 0])
        src = bi.SourceJ(noise=noise, b0=lambda z: np.zeros(3),
                         d0=lambda z: np.zeros(3), s=s, direction=FWD, mu0=mu0)
        j = src.at(0.0)
        assert_allclose(j[:3], [0, -mu0 * s, 0])   # -mu0 s M'
        assert_allclose(j[3:], [s, 0, 0])          # +s P'

    def test_at_many_matches_scalar(self):
        g = lambda z: np.exp(-np.asarray(z) ** 2)

        def b0(z):
            val = np.asarray(g(z), dtype=complex)
            zero = np.zeros_like(val)
            return np.stack([zero, val, zero], axis=-1)

        src = bi.SourceJ.vacuum(b0, lambda z: np.zeros(3), s=1.0, direction=FWD)
        zs = np.linspace(-1, 1, 7)
        many = src.at_many(zs)
        for i, z in enumerate(zs):
            assert_allclose(many[i], src.at(float(z)))

import numpy as np
import pytest
from numpy.testing import assert_allclose

import bianiso as bi

SQRT2 = np.sqrt(2.0)


def projector_distance(pa, pb):
    """Match projector groups by eigenvalue and return the worst difference."""
    assert len(pa) == len(pb)
    worst = 0.0
    for (wa, proja), (wb, projb) in zip(pa, pb):
        assert abs(wa - wb) < 1e-8 * max(1.0, abs(wa))
        worst = max(worst, float(np.max(np.abs(proja - projb))))
    return worst


class TestVacuumPropagationMatrix:
    def test_printed_values_k10(self):
        th = bi.vacuum_propagation_matrix((1.0, 0.0), 1.0)
        expected = np.array([[0, 0, 0, 2], [0, 0, -1, 0],
                             [0, -2, 0, 0], [1, 0, 0, 0]], dtype=complex)
        assert_allclose(th, expected, atol=0)

    def test_normal_incidence_antidiagonal(self):
        th = bi.vacuum_propagation_matrix((0.0, 0.0), 1.0)
        expected = np.array([[0, 0, 0, 1], [0, 0, -1, 0],
                             [0, -1, 0, 0], [1, 0, 0, 0]], dtype=complex)
        assert_allclose(th, expected, atol=0)

    def test_cross_entry(self):
        th = bi.vacuum_propagation_matrix((1.0, 1.0), 2.0)
        assert th[0, 2] == pytest.approx(-0.5)

    def test_s_zero_rejected(self):
        with pytest.raises(ValueError):
            bi.vacuum_propagation_matrix((1.0, 0.0), 0.0)

    def test_direction_even(self):
        a = bi.vacuum_propagation_matrix((0.4, 0.7), 1.0 + 2.0j,
                                         direction=bi.Direction.FORWARD)
        b = bi.vacuum_propagation_matrix((0.4, 0.7), 1.0 + 2.0j,
                                         direction=bi.Direction.BACKWARD)
        assert_allclose(a, b, atol=0)


class TestVacuumModes:
    def test_eigenvalues_k10(self):
        basis = bi.vacuum_modes((1.0, 0.0), 1.0)
        assert_allclose(np.sort(basis.omegas.real),
                        [-SQRT2, -SQRT2, SQRT2, SQRT2], atol=1e-14)

    def test_normal_incidence_eigenvalues(self):
        basis = bi.vacuum_modes((0.0, 0.0), 1.0)
        assert_allclose(np.sort(basis.omegas.real), [-1, -1, 1, 1], atol=1e-15)

    def test_closed_form_vectors_are_eigenvectors(self):
        th = bi.vacuum_propagation_matrix((1.0, 0.0), 1.0)
        r1 = np.array([-SQRT2, 0, 0, 1])
        assert np.max(np.abs(th @ r1 - (-SQRT2) * r1)) < 1e-14
        basis = bi.vacuum_modes((1.0, 0.0), 1.0)
        assert basis.residual(th) < 1e-14

    def test_branch_point_rejected(self):
        with pytest.raises(bi.BranchPointError):
            bi.vacuum_modes((1.0, 0.0), 1.0j)

    def test_classification(self):
        basis = bi.vacuum_modes((0.5, 0.1), 2.0)
        tags = [t.value for t in basis.tags]
        assert tags == ["decays_toward_-inf"] * 2 + ["decays_toward_+inf"] * 2


class TestEigenmodes:
    def test_agrees_with_closed_form(self, rng):
        worst_eig = worst_proj = 0.0
        for _ in range(50):
            kx, ky = rng.uniform(-3, 3, 2)
            s = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
            th = bi.vacuum_propagation_matrix((kx, ky), s)
            num = bi.eigenmodes(th, (kx, ky), s)
            ref = bi.vacuum_modes((kx, ky), s)
            scale = max(1.0, float(np.max(np.abs(ref.omegas))))
            worst_eig = max(worst_eig, float(np.max(np.abs(
                np.sort_complex(num.omegas) - np.sort_complex(ref.omegas)))) / scale)
            worst_proj = max(worst_proj, projector_distance(
                bi.spectral_projectors(num), bi.spectral_projectors(ref)))
        assert worst_eig < 1e-10
        assert worst_proj < 1e-8

    def test_residual_bound(self, rng):
        for _ in range(20):
            th = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            basis = bi.eigenmodes(th)
            assert basis.residual(th) < 1e-10

    def test_spectral_symmetry_vacuum(self, rng):
        kx, ky = rng.uniform(-2, 2, 2)
        s = complex(rng.uniform(0.2, 3), rng.uniform(-3, 3))
        basis = bi.eigenmodes(bi.vacuum_propagation_matrix((kx, ky), s))
        w = np.sort_complex(basis.omegas)
        assert_allclose(np.sort_complex(-w), w, atol=1e-10 * max(1, abs(w[0])))

    @staticmethod
    def _assert_split(medium, kpar, s):
        sys_ = bi.region_system(medium, kpar, s)
        basis = bi.eigenmodes(sys_.matrix, kpar, s)
        assert len(basis.indices(bi.DecayClass.TOWARD_PLUS_INF)) == 2
        assert len(basis.indices(bi.DecayClass.TOWARD_MINUS_INF)) == 2

    def test_two_two_split_for_passive_media(self, rng):
        # damped resonances and lossy dielectrics on the harmonic line
        pole = bi.LorentzPole(amplitude=0.8 * np.eye(3), omega0=1.4, gamma=0.3)
        cross = bi.LorentzPole(amplitude=0.1 * np.eye(3), omega0=1.1, gamma=0.4)
        media = [bi.PoleSusceptibility(ee_poles=[pole], me_poles=[cross]),
                 bi.isotropic_dielectric(2.0 + 0.3j),
                 bi.isotropic_dielectric(1.7)]
        for medium in media:
            for _ in range(8):
                omega = rng.uniform(0.3, 3.0)
                kx = rng.uniform(-0.9, 0.9) * omega
                s = -1j * omega + bi.TIE_BREAK_EPS * max(omega, 1.0)
                self._assert_split(medium, (kx, rng.uniform(-0.3, 0.3)), s)

    def test_two_two_split_small_random_tensors(self, rng):
        # small constant tensors stay 2/2 away from the imaginary axis
        from conftest import random_susceptibility_values
        for _ in range(25):
            chi = random_susceptibility_values(rng, scale=0.1)
            eta = bi.eliminate_magnetization(chi, 1.0)
            kx, ky = rng.uniform(-1.5, 1.5, 2)
            s = complex(rng.uniform(0.5, 2.5), rng.uniform(-2, 2))
            sys_ = bi.eliminate_longitudinal(
                bi.assemble_blocks(eta, (kx, ky), s, bi.Direction.FORWARD))
            basis = bi.eigenmodes(sys_.matrix, (kx, ky), s)
            assert len(basis.indices(bi.DecayClass.TOWARD_PLUS_INF)) == 2
            assert len(basis.indices(bi.DecayClass.TOWARD_MINUS_INF)) == 2

    def test_defective_matrix_raises(self):
        jordan = np.eye(4, k=1) * 1.0 + 0j
        with pytest.raises(bi.ModeDegeneracyError):
            bi.eigenmodes(jordan)

    def test_marginal_classification(self):
        # purely imaginary spectrum: vacuum continued to Re s = 0 exactly
        th = np.array([[0, 0, 0, 1j], [0, 0, -1j, 0],
                       [0, -1j, 0, 0], [1j, 0, 0, 0]], dtype=complex)
        basis = bi.eigenmodes(th)
        assert all(t is bi.DecayClass.MARGINAL for t in basis.tags)

    def test_deterministic_normalization(self, rng):
        th = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a = bi.eigenmodes(th)
        b = bi.eigenmodes(th)
        assert_allclose(a.vectors, b.vectors, atol=0)
        peak = np.max(np.abs(a.vectors), axis=0)
        assert_allclose(peak, np.ones(4), atol=1e-14)

    def test_non_finite_rejected(self):
        th = np.full((4, 4), np.nan, dtype=complex)
        with pytest.raises(ValueError):
            bi.eigenmodes(th)

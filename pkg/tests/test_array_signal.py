import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subspace_doa.array_signal import (
    ArrayGeometry,
    NoiseSpec,
    SnapshotMatrix,
    SourceSpec,
    correlated_snapshots,
    covariance_with_spectrum,
    sample_covariance,
    steering_matrix,
    steering_vector,
    synthesize_snapshots,
)
from subspace_doa.eigen_oracle import eigendecompose

from conftest import PAPER_GEOM, PAPER_SOURCES


class TestSteeringVector:
    def test_endfire_zero_phase(self):
        np.testing.assert_array_equal(steering_vector(ArrayGeometry(8, 0.5), 0.0), np.ones(8))

    @pytest.mark.parametrize(
        "theta, expected",
        [(90.0, [1, -1]), (30.0, [1, -1j])],
    )
    def test_two_element_values(self, theta, expected):
        np.testing.assert_allclose(steering_vector(ArrayGeometry(2, 0.5), theta), expected, atol=1e-15)

    @pytest.mark.parametrize("theta", [-0.1, 180.5, np.nan])
    def test_out_of_range(self, theta):
        with pytest.raises(ValueError):
            steering_vector(ArrayGeometry(4, 0.5), theta)

    @given(
        m=st.integers(2, 16),
        spacing=st.floats(0.05, 2.0),
        theta=st.floats(0.0, 180.0),
    )
    def test_unit_modulus_and_norm(self, m, spacing, theta):
        c = steering_vector(ArrayGeometry(m, spacing), theta)
        np.testing.assert_allclose(np.abs(c), 1.0, atol=1e-12)
        assert abs(np.vdot(c, c).real - m) <= 1e-12 * m
        assert c[0] == 1

    @given(theta=st.floats(0.0, 180.0))
    def test_supplementary_angle_form(self, theta):
        geom = ArrayGeometry(8, 0.5)
        i = np.arange(8)
        mirrored = np.exp(-1j * 2 * np.pi * 0.5 * i * np.sin(np.pi - np.deg2rad(theta)))
        np.testing.assert_allclose(steering_vector(geom, theta), mirrored, atol=1e-12)

    def test_matrix_columns_match_vectors(self):
        angles = [0.0, 33.3, 90.0, 145.0]
        C = steering_matrix(PAPER_GEOM, angles)
        for k, a in enumerate(angles):
            np.testing.assert_array_equal(C[:, k], steering_vector(PAPER_GEOM, a))


class TestDomainTypes:
    @pytest.mark.parametrize("m, spacing", [(1, 0.5), (0, 0.5), (4, 0.0), (4, -1.0)])
    def test_bad_geometry(self, m, spacing):
        with pytest.raises(ValueError):
            ArrayGeometry(m, spacing)

    @pytest.mark.parametrize(
        "doa, f, amp",
        [(-1, 0.3, 1.0), (181, 0.3, 1.0), (60, 0.0, 1.0), (60, 0.51, 1.0), (60, 0.3, 0.0)],
    )
    def test_bad_source(self, doa, f, amp):
        with pytest.raises(ValueError):
            SourceSpec(doa, f, amp)

    def test_bad_noise(self):
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)

    def test_snapshot_matrix_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SnapshotMatrix(np.array([[1.0, np.inf], [0.0, 1.0]]))


class TestSynthesize:
    def test_empty_sources_rejected(self):
        with pytest.raises(ValueError):
            synthesize_snapshots(PAPER_GEOM, [], 5)

    def test_too_many_sources_rejected(self):
        geom = ArrayGeometry(2, 0.5)
        with pytest.raises(ValueError):
            synthesize_snapshots(geom, [SourceSpec(10, 0.1), SourceSpec(20, 0.2)], 5)

    def test_zero_snapshots_rejected(self):
        with pytest.raises(ValueError):
            synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 0)

    def test_single_endfire_source_columns(self):
        # cos(2*pi*0.25*n) for n = 0..3 is 1, 0, -1, 0 on both sensors
        X = synthesize_snapshots(ArrayGeometry(2, 0.5), [SourceSpec(0.0, 0.25, 1.0)], 4, NoiseSpec(0.0))
        expected = np.array([[1, 0, -1, 0], [1, 0, -1, 0]], dtype=complex)
        np.testing.assert_allclose(X.data, expected, atol=1e-15)

    def test_paper_setup_shape(self):
        X = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.009, 1))
        assert X.data.shape == (8, 5)
        assert X.num_sensors == 8 and X.num_snapshots == 5

    def test_noiseless_superposition_by_hand(self):
        X = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.0))
        for n in range(5):
            col = sum(
                s.amplitude * np.cos(2 * np.pi * s.normalized_freq * n) * steering_vector(PAPER_GEOM, s.doa_deg)
                for s in PAPER_SOURCES
            )
            np.testing.assert_allclose(X.data[:, n], col, atol=1e-14)

    def test_deterministic(self):
        a = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.009, 42))
        b = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.009, 42))
        assert a.data.tobytes() == b.data.tobytes()
        c = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.009, 43))
        assert a.data.tobytes() != c.data.tobytes()

    def test_noise_level(self):
        clean = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 20000, NoiseSpec(0.0))
        noisy = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 20000, NoiseSpec(0.5, 3))
        resid = noisy.data - clean.data
        assert abs(resid.real.std() - 0.5) < 0.01
        assert abs(resid.imag.std() - 0.5) < 0.01
        assert abs(np.mean(resid.real * resid.imag)) < 0.01


class TestSampleCovariance:
    def test_single_snapshot(self):
        R = sample_covariance(SnapshotMatrix(np.array([[1.0], [1.0]])))
        np.testing.assert_array_equal(R, [[1, 1], [1, 1]])

    def test_identical_copies(self):
        x = np.array([1 + 2j, -0.5j, 3.0])
        R = sample_covariance(SnapshotMatrix(np.tile(x[:, None], (1, 7))))
        np.testing.assert_allclose(R, np.outer(x, x.conj()), atol=1e-14)

    def test_orthonormal_snapshots(self):
        R = sample_covariance(SnapshotMatrix(np.eye(2)))
        np.testing.assert_array_equal(R, np.diag([0.5, 0.5]))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), L=st.integers(1, 12))
    def test_hermitian_psd(self, seed, L):
        X = synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, L, NoiseSpec(0.3, seed))
        R = sample_covariance(X)
        assert np.max(np.abs(R - R.conj().T)) <= 1e-12
        assert np.trace(R).real >= 0
        assert eigendecompose(R).eigenvalues.min() >= -1e-10

    def test_noiseless_rank_equals_source_count(self, noiseless_paper_snapshots):
        lam = eigendecompose(sample_covariance(noiseless_paper_snapshots)).eigenvalues
        assert np.sum(lam > 1e-8 * lam.max()) == 2

    @pytest.mark.parametrize("L", [1, 2, 3])
    def test_noiseless_rank_bounded(self, L):
        sources = (SourceSpec(30, 0.1), SourceSpec(70, 0.23), SourceSpec(120, 0.4))
        X = synthesize_snapshots(PAPER_GEOM, sources, L, NoiseSpec(0.0))
        lam = eigendecompose(sample_covariance(X)).eigenvalues
        assert np.sum(lam > 1e-8 * lam.max()) <= min(L, 3)


class TestStreams:
    def test_covariance_with_spectrum(self):
        R = covariance_with_spectrum([0.1, 0.5, 2.0], seed=4)
        np.testing.assert_allclose(np.linalg.eigvalsh(R), [0.1, 0.5, 2.0], atol=1e-12)

    def test_correlated_snapshots_match_covariance(self):
        R = covariance_with_spectrum([0.05, 0.3, 1.0, 1.5], seed=9)
        X = correlated_snapshots(R, 200_000, seed=1)
        assert np.linalg.norm(sample_covariance(X) - R) < 0.02 * np.linalg.norm(R)

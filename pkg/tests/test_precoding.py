import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexprecode.precoding import (
    PrecodingState,
    normalize_precoder,
    regularized_projection,
    rls_fit,
    rzf_dual,
    rzf_objective,
    rzf_primal,
    sinr_per_user,
    sum_rate,
)


def complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


class TestRzfDual:
    def test_identity_channel(self):
        np.testing.assert_allclose(rzf_dual(np.eye(4), 1.0), 0.5 * np.eye(4), atol=1e-12)
        np.testing.assert_allclose(rzf_dual(np.eye(4), 0.0), np.eye(4), atol=1e-12)

    def test_mrt_limit(self):
        # alpha -> inf: alpha * F approaches the matched filter H^H
        rng = np.random.default_rng(7)
        for _ in range(20):
            H = complex_gaussian(rng, (4, 4))
            F = rzf_dual(H, 1e6)
            assert np.abs(1e6 * F - H.conj().T).max() < 1e-4 * np.linalg.norm(H)

    def test_singular_at_alpha_zero(self):
        H = np.ones((3, 4), dtype=complex)  # rank one
        with pytest.raises(np.linalg.LinAlgError):
            rzf_dual(H, 0.0)

    def test_rejects_negative_alpha(self):
        with pytest.raises(ValueError):
            rzf_dual(np.eye(2), -0.5)


class TestRzfPrimal:
    def test_identity_channel(self):
        np.testing.assert_allclose(rzf_primal(np.eye(2), 3.0), 0.25 * np.eye(2), atol=1e-12)

    def test_matches_dual(self):
        rng = np.random.default_rng(1)
        H = complex_gaussian(rng, (4, 6))
        assert np.abs(rzf_primal(H, 1.0) - rzf_dual(H, 1.0)).max() < 1e-10

    def test_primal_dual_identity_sweep(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(4, 9))
            H = complex_gaussian(rng, (4, n))
            for alpha in (1e-2, 1.0, 1e2):
                dev = np.abs(rzf_primal(H, alpha) - rzf_dual(H, alpha)).max()
                assert dev < 1e-9

    def test_zf_limit_matches_pinv(self):
        rng = np.random.default_rng(2)
        H = complex_gaussian(rng, (4, 4))
        F = rzf_primal(H, 1e-10)
        assert np.linalg.norm(np.eye(4) - H @ F) < 1e-5
        np.testing.assert_allclose(F, np.linalg.pinv(H), atol=1e-5)

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            rzf_primal(np.eye(2), 0.0)
        with pytest.raises(ValueError):
            rzf_primal(np.eye(2), -1.0)


def test_mmse_is_same_code_path():
    # the MMSE precoder is rzf at alpha = noise power; check against the
    # textbook dual expression evaluated with a generic solver
    rng = np.random.default_rng(3)
    H = complex_gaussian(rng, (4, 6))
    sigma2 = 0.37
    F = rzf_dual(H, sigma2)
    reference = H.conj().T @ np.linalg.inv(H @ H.conj().T + sigma2 * np.eye(4))
    np.testing.assert_allclose(F, reference, atol=1e-12)


class TestNormalizePrecoder:
    def test_identity(self):
        F = normalize_precoder(np.eye(2, dtype=complex), 1.0)
        np.testing.assert_allclose(np.linalg.norm(F, axis=0), [1 / np.sqrt(2)] * 2, atol=1e-15)
        assert np.linalg.norm(F) ** 2 == pytest.approx(1.0, abs=1e-15)

    def test_unequal_columns_rescaled(self):
        F = np.diag([2.0, 4.0]).astype(complex)
        out = normalize_precoder(F, 1.0)
        np.testing.assert_allclose(np.linalg.norm(out, axis=0), [1 / np.sqrt(2)] * 2, atol=1e-15)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_total_power_and_equal_columns(self, seed):
        rng = np.random.default_rng(seed)
        F = complex_gaussian(rng, (4, 4)) + np.eye(4)  # keep columns nonzero
        out = normalize_precoder(F, 1.0)
        norms = np.linalg.norm(out, axis=0)
        assert abs(np.linalg.norm(out) ** 2 - 1.0) < 1e-12
        assert np.max(np.abs(norms - norms[0])) < 1e-12

    def test_zero_column_rejected(self):
        F = np.zeros((3, 2), dtype=complex)
        F[:, 0] = 1.0
        with pytest.raises(ValueError):
            normalize_precoder(F, 1.0)

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError):
            normalize_precoder(np.eye(2, dtype=complex), 0.0)


class TestSinr:
    def test_no_interference_unit_gain(self):
        np.testing.assert_allclose(sinr_per_user(np.eye(2), np.eye(2), 1.0), [1.0, 1.0])

    def test_zero_precoder(self):
        np.testing.assert_allclose(sinr_per_user(np.eye(3), np.zeros((3, 3)), 1.0), 0.0)

    def test_matches_scalar_evaluation(self):
        rng = np.random.default_rng(5)
        H = complex_gaussian(rng, (4, 4))
        F = complex_gaussian(rng, (4, 4))
        sinr = sinr_per_user(H, F, 0.7)
        for k in range(4):
            signal = abs(H[k] @ F[:, k]) ** 2
            interference = sum(abs(H[k] @ F[:, i]) ** 2 for i in range(4) if i != k)
            assert sinr[k] == pytest.approx(signal / (interference + 0.7), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sinr_per_user(np.eye(3), np.zeros((4, 3)), 1.0)


class TestSumRate:
    def test_analytic_case(self):
        F = normalize_precoder(np.eye(4, dtype=complex), 1.0)  # columns of norm 1/2
        assert sum_rate(np.eye(4), F, 1.0) == pytest.approx(4 * np.log2(1.25), rel=1e-12)

    def test_zero_precoder(self):
        assert sum_rate(np.eye(4), np.zeros((4, 4)), 1.0) == 0.0

    def test_matches_oracle_sinr(self):
        rng = np.random.default_rng(8)
        H = complex_gaussian(rng, (4, 4))
        F = complex_gaussian(rng, (4, 4))
        expected = np.log2(1 + sinr_per_user(H, F, 1.0)).sum()
        assert sum_rate(H, F, 1.0) == pytest.approx(expected, rel=1e-14)


class TestRegularizedProjection:
    def test_coordinate_projection(self):
        H = np.array([[1.0], [0.0]], dtype=complex)
        P0 = regularized_projection(H, 0.0)
        np.testing.assert_allclose(P0, np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(P0 @ P0, P0, atol=1e-12)

    def test_shrunken_projection_not_idempotent(self):
        H = np.array([[1.0], [0.0]], dtype=complex)
        P = regularized_projection(H, 1.0)
        np.testing.assert_allclose(P, np.diag([0.5, 0.0]), atol=1e-12)
        assert np.abs(P @ P - P).max() > 0.1

    def test_projector_limit(self):
        rng = np.random.default_rng(11)
        H = complex_gaussian(rng, (4, 3))
        P = regularized_projection(H, 0.0)
        assert np.linalg.norm(P @ P - P) < 1e-9

    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.0, 1e-3, 1.0, 1e3]))
    @settings(max_examples=60, deadline=None)
    def test_hermitian_with_shrunken_spectrum(self, seed, alpha):
        rng = np.random.default_rng(seed)
        H = complex_gaussian(rng, (4, 3))
        P = regularized_projection(H, alpha)
        assert np.abs(P - P.conj().T).max() < 1e-12
        eigs = np.linalg.eigvalsh(P)
        assert np.all(eigs >= -1e-10)
        assert np.all(eigs <= 1.0 + 1e-10)


class TestRlsFit:
    def test_objective_consistency(self):
        rng = np.random.default_rng(13)
        H = complex_gaussian(rng, (4, 3))
        F, R, obj = rls_fit(H, 0.8)
        np.testing.assert_allclose(R, np.eye(4) - H @ F, atol=1e-14)
        assert obj == pytest.approx(np.linalg.norm(R) ** 2 + 0.8 * np.linalg.norm(F) ** 2)
        assert rzf_objective(H, 0.8) == obj

    def test_rls_minimizes_objective(self):
        # perturbing the optimum must not decrease the objective
        rng = np.random.default_rng(14)
        H = complex_gaussian(rng, (3, 2))
        F, _, obj = rls_fit(H, 0.5)
        for _ in range(20):
            F_alt = F + 1e-3 * complex_gaussian(rng, F.shape)
            alt = (np.linalg.norm(np.eye(3) - H @ F_alt) ** 2
                   + 0.5 * np.linalg.norm(F_alt) ** 2)
            assert alt >= obj


class TestPrecodingState:
    def test_from_channel_residual_invariant(self):
        rng = np.random.default_rng(15)
        H = complex_gaussian(rng, (4, 2))
        state = PrecodingState.from_channel(H, 1.0)
        assert state.residual_error() < 1e-10
        assert state.precoder.shape == (2, 4)
        assert state.objective == pytest.approx(rzf_objective(H, 1.0))

# -*- coding: utf-8 -*-
"""Reconstrucción ℓ1 por contracción acelerada"""

import numpy as np
import pytest

from models.errors import DimensionMismatchError, DomainError
from models.measurement import MeasurementMatrix, MeasurementVector, PrecisionMode
from models.results import ReconstructConfig, StepRule
from tools.diagnostics import recovery_metrics
from tools.reconstruction import estimate_lipschitz, reconstruct, shrinkage_step, soft_threshold


class TestSoftThreshold:

    def test_values(self):
        np.testing.assert_allclose(
            soft_threshold(np.array([-3.0, -0.5, 0.0, 0.5, 2.0]), 1.0),
            [-2.0, 0.0, 0.0, 0.0, 1.0],
        )

    def test_zero_threshold_is_identity(self, rng):
        v = rng.standard_normal(10)
        np.testing.assert_array_equal(soft_threshold(v, 0.0), v)

    def test_negative_threshold_rejected(self):
        with pytest.raises(DomainError):
            soft_threshold(np.ones(3), -0.1)

    def test_keeps_single_precision(self):
        assert soft_threshold(np.ones(3, dtype=np.float32), 0.5).dtype == np.float32


class TestLipschitz:

    def test_power_iteration_matches_spectral_norm(self, small_system):
        A, _ = small_system
        expected = np.linalg.norm(A.entries, 2) ** 2
        assert estimate_lipschitz(A, iterations=500, tol=1e-12) == pytest.approx(expected, rel=1e-4)

    def test_shrinkage_step_reduces_objective(self, small_system, make_target):
        A, _ = small_system
        y = A.apply(make_target().pixels)
        L = estimate_lipschitz(A) * 1.01
        x0 = np.zeros(A.N)
        x1 = shrinkage_step(x0, A, y, L, 1e-3)
        before = 0.5 * np.sum((A.apply(x0) - y) ** 2)
        after = 0.5 * np.sum((A.apply(x1) - y) ** 2) + 1e-3 * np.sum(np.abs(x1))
        assert after < before
        assert np.all(x1 >= 0)


class TestReconstruct:

    @pytest.fixture
    def control(self, make_system, make_target):
        A, oracle = make_system(M=64, N=256, seed=3)
        x = make_target(N=256, sparsity=8, seed=3)
        return A, x, MeasurementVector(A.apply(x.pixels))

    def test_correct_matrix_recovers_sparse_target(self, control):
        A, x, y = control
        x_hat, report = reconstruct(y, A, shape=x.shape)
        metrics = recovery_metrics(x_hat, x)
        assert metrics.support_f1 == 1.0
        assert metrics.relative_error <= 1e-3
        assert metrics.success
        assert report.debiased
        assert report.support_size == 8
        assert x_hat.shape == x.shape

    def test_objective_trace_is_monotone(self, control):
        A, _, y = control
        _, report = reconstruct(y, A, ReconstructConfig(max_iters=300, debias=False))
        trace = np.array(report.objective_trace)
        assert np.all(np.diff(trace) <= 1e-12 * np.abs(trace[:-1]))
        assert report.final_objective == trace[-1]

    def test_fixed_step_rule(self, control):
        A, x, y = control
        x_hat, report = reconstruct(y, A, ReconstructConfig(step_rule=StepRule.FIXED))
        assert recovery_metrics(x_hat, x).support_f1 == 1.0
        assert report.lipschitz >= estimate_lipschitz(A)

    def test_non_convergence_is_reported_not_raised(self, control):
        A, _, y = control
        _, report = reconstruct(y, A, ReconstructConfig(max_iters=2, debias=False))
        assert not report.converged
        assert report.iterations == 2

    def test_explicit_lambda_and_signed_solutions(self, control):
        A, x, _ = control
        signed = x.pixels.copy()
        support = np.flatnonzero(signed)
        signed[support[::2]] *= -1
        y = MeasurementVector(A.apply(signed))
        x_hat, report = reconstruct(y, A, ReconstructConfig(lambda_reg=1e-4, nonneg=False))
        assert report.lambda_reg == 1e-4
        np.testing.assert_allclose(x_hat.pixels, signed, atol=1e-3)

    def test_single_precision(self, make_system, make_target):
        A, _ = make_system(M=64, N=256, seed=3, precision=PrecisionMode.SINGLE)
        x = make_target(N=256, sparsity=8, seed=3, precision=PrecisionMode.SINGLE)
        x_hat, _ = reconstruct(MeasurementVector(A.apply(x.pixels)), A)
        assert x_hat.pixels.dtype == np.float32
        assert recovery_metrics(x_hat, x).support_f1 == 1.0

    def test_dimension_mismatch(self, small_system):
        A, _ = small_system
        with pytest.raises(DimensionMismatchError):
            reconstruct(MeasurementVector(np.ones(A.M + 1)), A)

    def test_invalid_config(self):
        with pytest.raises(DomainError):
            ReconstructConfig(lambda_reg=0.0)
        with pytest.raises(DomainError):
            ReconstructConfig(max_iters=0)
        with pytest.raises(DomainError):
            ReconstructConfig(conv_tol=0.0)

    def test_zero_measurement_gives_zero_image(self, small_system):
        A, _ = small_system
        x_hat, report = reconstruct(MeasurementVector(np.zeros(A.M)), A, ReconstructConfig(lambda_reg=1e-3))
        np.testing.assert_array_equal(x_hat.pixels, 0.0)
        assert report.support_size == 0

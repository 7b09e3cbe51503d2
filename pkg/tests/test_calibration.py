# -*- coding: utf-8 -*-
"""Solución de calibración con la base ortonormal del espacio de filas"""

import numpy as np
import pytest

from models.errors import (
    DegenerateDenominatorError, DimensionMismatchError, DomainError, IllConditionedError, RankDeficiencyError,
)
from models.measurement import Image, MeasurementMatrix, PrecisionMode, SigmaMatrix
from models.results import BasisSet, PremeasureSet
from tools.calibration import calibrate, calibration_sigma, cross_coefficients, orthonormal_basis, premeasure_basis
from tools.diagnostics import lambda_vector


class TestBasis:

    def test_orthonormal_columns_span_rows(self, small_system):
        A, _ = small_system
        basis = orthonormal_basis(A)
        assert basis.Q.shape == (A.N, A.M)
        assert basis.orthonormality_residual <= 1e-12
        projector = basis.Q @ basis.Q.T
        np.testing.assert_allclose(A.entries @ projector, A.entries, atol=1e-10)

    def test_substitution_degrades_orthonormality(self, small_system, make_target):
        A, _ = small_system
        basis = orthonormal_basis(A).substitute([make_target(index=0), make_target(index=1)])
        assert basis.substituted == 2
        assert basis.orthonormality_residual > 1e-3
        np.testing.assert_allclose(np.linalg.norm(basis.Q, axis=0), 1.0, rtol=1e-12)

    def test_substitution_limits(self):
        basis = BasisSet.from_columns(np.eye(4)[:, :2])
        with pytest.raises(DomainError):
            basis.substitute([Image.from_vector(np.ones(4))] * 3)
        with pytest.raises(DimensionMismatchError):
            basis.substitute([Image.from_vector(np.ones(5))])


class TestCalibrationCondition:

    def test_sigma_gives_identity_coupling(self, small_system):
        A, _ = small_system
        pm = premeasure_basis(A, orthonormal_basis(A))
        Sigma = calibration_sigma(pm)
        np.testing.assert_allclose(pm.Y @ Sigma.entries @ pm.Y.T, np.eye(pm.D), atol=1e-8)
        np.testing.assert_allclose(cross_coefficients(pm, Sigma), np.eye(pm.D), atol=1e-8)

    def test_cross_coefficients_diagonal_is_one_for_any_sigma(self, rng):
        Y = rng.standard_normal((5, 5))
        B = rng.standard_normal((5, 5))
        table = cross_coefficients(PremeasureSet(Y), SigmaMatrix(B @ B.T + np.eye(5)))
        np.testing.assert_allclose(np.diag(table), 1.0, rtol=1e-12)

    def test_too_few_rows_is_rank_deficient(self, rng):
        with pytest.raises(RankDeficiencyError):
            calibration_sigma(PremeasureSet(rng.standard_normal((3, 5))))

    def test_repeated_basis_image_is_ill_conditioned(self, small_system, make_target):
        A, _ = small_system
        x = make_target()
        pm = premeasure_basis(A, orthonormal_basis(A).substitute([x, x]))
        with pytest.raises(IllConditionedError) as excinfo:
            calibration_sigma(pm)
        assert excinfo.value.condition_number > 1e8

    def test_degenerate_denominator_reports_index(self, rng):
        Y = rng.standard_normal((3, 3))
        Y[1] = 0.0
        with pytest.raises(DegenerateDenominatorError) as excinfo:
            cross_coefficients(PremeasureSet(Y), SigmaMatrix(np.eye(3)))
        assert excinfo.value.index == 1


class TestCalibrate:

    def test_recv_agrees_with_hidden_matrix_on_span(self, small_system, rng):
        A, oracle = small_system
        recv, report = calibrate(oracle, A)
        A_u = oracle.reveal_hidden_matrix().entries
        Q = orthonormal_basis(A).Q
        for _ in range(20):
            x = Q @ rng.standard_normal(A.M)
            truth = A_u @ x
            assert np.max(np.abs(recv.apply(x) - truth)) <= 1e-6 * np.max(np.abs(truth))
        assert report.oracle_calls == A.M
        assert oracle.call_count == A.M
        assert recv.rank_terms == A.M
        assert report.max_off_diagonal <= 1e-8
        assert report.identity_residual <= 1e-8

    def test_one_calibration_serves_several_targets(self, small_system, make_target):
        A, oracle = small_system
        targets = [make_target(index=i) for i in range(3)]
        recv, report = calibrate(oracle, A, substitutes=targets)
        A_u = oracle.reveal_hidden_matrix()
        for x in targets:
            truth = A_u.apply(x.pixels)
            np.testing.assert_allclose(recv.apply(x.pixels), truth, atol=1e-8 * np.max(np.abs(truth)))
        assert report.substituted_columns == 3
        assert report.orthonormality_residual > 0
        assert oracle.call_count == A.M

    def test_calibration_lambda_fluctuates(self, small_system, make_target):
        A, oracle = small_system
        x, x_prime = make_target(index=0), make_target(index=1)
        recv, _ = calibrate(oracle, A, substitutes=[x, x_prime])
        assert lambda_vector(recv, x, x_prime).coefficient_of_variation > 1e-3

    def test_single_precision(self, make_system):
        A, oracle = make_system(precision=PrecisionMode.SINGLE)
        recv, report = calibrate(oracle, A)
        assert recv.precision is PrecisionMode.SINGLE
        assert report.precision is PrecisionMode.SINGLE
        assert report.max_off_diagonal <= 1e-3

    def test_oracle_must_match(self, small_system, make_system):
        A, _ = small_system
        _, other = make_system(M=8, N=64)
        with pytest.raises(DimensionMismatchError):
            calibrate(other, A)

    def test_explicit_basis(self, small_system):
        A, oracle = small_system
        rows = MeasurementMatrix.create(A.entries)
        recv, report = calibrate(oracle, rows, basis=orthonormal_basis(rows))
        assert report.substituted_columns == 0
        assert recv.rank_terms == A.M

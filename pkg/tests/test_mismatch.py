# -*- coding: utf-8 -*-
"""Ecuación de desajuste y propiedad del multiplicador"""

import numpy as np
import pytest

from models.errors import DegenerateDenominatorError, DimensionMismatchError, RankDeficiencyError
from models.measurement import Image, MeasurementMatrix, MeasurementVector, PrecisionMode, SigmaMatrix
from models.recv import FactoredRecvMatrix
from tools.mismatch import (
    MismatchProjector, convergence_factor, default_sigma, mismatch_term, multiplier_coefficient,
    require_full_row_rank, signed_convergence_factor,
)


def _gaussian(rng, M=16, N=64):
    return MeasurementMatrix.create(rng.standard_normal((M, N)) / np.sqrt(M))


def _random_spd(rng, M=16):
    B = rng.standard_normal((M, M))
    return SigmaMatrix(B @ B.T + M * np.eye(M))


class TestDefaultSigma:

    def test_inverts_gram(self, rng):
        A = _gaussian(rng)
        Sigma = default_sigma(A)
        np.testing.assert_allclose(A.entries @ A.entries.T @ Sigma.entries, np.eye(A.M), atol=1e-10)
        np.testing.assert_array_equal(Sigma.entries, Sigma.entries.T)

    def test_single_precision_stays_single(self, rng):
        A = _gaussian(rng).astype(PrecisionMode.SINGLE)
        assert default_sigma(A).entries.dtype == np.float32

    def test_rank_deficient_rows_rejected(self, rng):
        entries = rng.standard_normal((4, 10))
        entries[3] = entries[0]
        with pytest.raises(RankDeficiencyError):
            default_sigma(MeasurementMatrix.create(entries))
        with pytest.raises(RankDeficiencyError):
            require_full_row_rank(MeasurementMatrix.create(entries))


class TestMismatchIdentity:

    def test_recv_matches_target_measurement(self, rng):
        """A_recv·x = y cuando y0 = A·x, para Σ = (AAᵀ)⁻¹ y Σ definidas positivas aleatorias"""
        for instance in range(120):
            A = _gaussian(rng)
            Sigma = default_sigma(A) if instance % 2 == 0 else _random_spd(rng)
            x = Image.from_vector(rng.standard_normal(A.N))
            y = MeasurementVector(rng.standard_normal(A.M))
            y0 = MeasurementVector(A.apply(x.pixels))

            recv = FactoredRecvMatrix.empty(A.M, A.N).extend(mismatch_term(y, y0, Sigma, A))
            residual = np.max(np.abs(recv.apply(x.pixels) - y.values))
            assert residual <= 1e-9 * np.max(np.abs(y.values))

    def test_dense_term_matches_closed_form(self, rng):
        A = _gaussian(rng, M=4, N=9)
        Sigma = default_sigma(A)
        y = MeasurementVector(rng.standard_normal(4))
        y0 = MeasurementVector(rng.standard_normal(4))
        expected = np.outer(y.values, y0.values @ Sigma.entries @ A.entries) / (y0.values @ Sigma.entries @ y0.values)
        np.testing.assert_allclose(mismatch_term(y, y0, Sigma, A).materialize(), expected, rtol=1e-10)


class TestMultiplierProperty:

    def test_term_scales_left_vector_by_k(self, rng):
        for _ in range(5):
            A = _gaussian(rng)
            Sigma = default_sigma(A)
            pm = Image.from_vector(rng.uniform(0.1, 1.0, A.N))
            y0 = MeasurementVector(A.apply(pm.pixels))
            projector = MismatchProjector(y0, Sigma, A)
            for _ in range(100):
                e = rng.standard_normal(A.M)
                x = Image.from_vector(rng.standard_normal(A.N))
                k = multiplier_coefficient(y0, Sigma, A, x)
                np.testing.assert_allclose(projector.term(e).apply(x.pixels), k * e, rtol=1e-9, atol=1e-12)

    def test_k_of_pre_measure_image_is_one(self, rng):
        A = _gaussian(rng)
        Sigma = default_sigma(A)
        pm = Image.from_vector(rng.uniform(0.1, 1.0, A.N))
        y0 = MeasurementVector(A.apply(pm.pixels))
        assert multiplier_coefficient(y0, Sigma, A, pm) == pytest.approx(1.0, abs=1e-12)
        assert convergence_factor(y0, Sigma, A, pm) == pytest.approx(0.0, abs=1e-12)

    def test_signed_factor_of_scaled_image(self, rng):
        A = _gaussian(rng)
        Sigma = default_sigma(A)
        x = Image.from_vector(rng.uniform(0.1, 1.0, A.N))
        y0 = MeasurementVector(A.apply(x.scaled(2.0).pixels))
        assert signed_convergence_factor(y0, Sigma, A, x) == pytest.approx(0.5, rel=1e-10)
        y0 = MeasurementVector(A.apply(x.scaled(0.4).pixels))
        assert signed_convergence_factor(y0, Sigma, A, x) == pytest.approx(-1.5, rel=1e-10)
        assert convergence_factor(y0, Sigma, A, x) == pytest.approx(1.5, rel=1e-10)


class TestDegenerateInputs:

    def test_zero_pre_measurement(self, rng):
        A = _gaussian(rng)
        with pytest.raises(DegenerateDenominatorError):
            MismatchProjector(MeasurementVector(np.zeros(A.M)), default_sigma(A), A)

    def test_skew_sigma_has_zero_denominator(self, rng):
        A = _gaussian(rng, M=4, N=9)
        skew = rng.standard_normal((4, 4))
        skew = skew - skew.T
        with pytest.raises(DegenerateDenominatorError):
            MismatchProjector(MeasurementVector(rng.standard_normal(4)), SigmaMatrix(skew), A)

    def test_dimension_mismatch(self, rng):
        A = _gaussian(rng, M=4, N=9)
        with pytest.raises(DimensionMismatchError):
            MismatchProjector(MeasurementVector(np.ones(5)), default_sigma(A), A)
        projector = MismatchProjector(MeasurementVector(np.ones(4)), default_sigma(A), A)
        with pytest.raises(DimensionMismatchError):
            projector.term(np.ones(3))
        with pytest.raises(DimensionMismatchError):
            projector.coefficient(np.ones(8))

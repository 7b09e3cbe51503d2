# -*- coding: utf-8 -*-
"""
Solución de calibración: base ortonormal, pre-medición y ecuación de calibración
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, qr

from config.settings import NumericConfig
from models.errors import DegenerateDenominatorError, DimensionMismatchError, IllConditionedError, RankDeficiencyError
from models.measurement import Image, MeasurementMatrix, PrecisionMode, SigmaMatrix
from models.recv import FactoredRecvMatrix, MismatchTerm
from models.results import BasisSet, CalibrationReport, PremeasureSet
from simulation.oracle import MeasurementOracle
from tools.mismatch import require_full_row_rank


logger = logging.getLogger(__name__)


def orthonormal_basis(A: MeasurementMatrix) -> BasisSet:
    """
    Base ortonormal del espacio de filas de A (QR económica de Aᵀ)

    Returns:
        BasisSet con Q de N×M y su residuo de ortonormalidad
    """
    require_full_row_rank(A)
    Q, _ = qr(A.entries.T, mode="economic")
    basis = BasisSet.from_columns(Q.astype(A.precision.dtype, copy=False))
    logger.debug(f"Base QR de {basis.D} columnas (residuo {basis.orthonormality_residual:.3e})")
    return basis


def premeasure_basis(A: MeasurementMatrix, basis: BasisSet) -> PremeasureSet:
    """Y = (A·Q)ᵀ; la fila j es la pre-medición de la imagen base j"""
    if basis.N != A.N:
        raise DimensionMismatchError("Base incompatible con A", A.entries.shape, basis.Q.shape)
    Q = basis.Q.astype(A.precision.dtype, copy=False)
    Y = np.ascontiguousarray((A.entries @ Q).T)
    Y.setflags(write=False)
    return PremeasureSet(Y)


def _precision_of(pm: PremeasureSet) -> PrecisionMode:
    return PrecisionMode.of(pm.Y)


def calibration_sigma(pm: PremeasureSet) -> SigmaMatrix:
    """
    Σ = (YᵀY)⁻¹, la elección que cumple YΣYᵀ = E

    Raises:
        RankDeficiencyError: si Y no tiene rango completo por columnas
        IllConditionedError: si cond(YᵀY) supera el límite configurado
    """
    precision = _precision_of(pm)
    if pm.D < pm.M:
        raise RankDeficiencyError(f"Y de {pm.D}×{pm.M} no puede tener rango completo por columnas")
    gram = pm.Y.T @ pm.Y
    condition = float(np.linalg.cond(gram.astype(np.float64)))
    bound = NumericConfig.COND_BOUND[precision]
    if not np.isfinite(condition) or condition > bound:
        logger.warning(f"⚠️ cond(YᵀY) = {condition:.3e} supera el límite {bound:.0e}")
        raise IllConditionedError(f"cond(YᵀY) = {condition:.3e} supera el límite {bound:.0e}", condition)
    try:
        factor = cho_factor(gram)
    except LinAlgError as e:
        raise RankDeficiencyError(f"YᵀY no es definida positiva: {e}") from e
    sigma = cho_solve(factor, np.eye(pm.M, dtype=gram.dtype))
    sigma = (sigma + sigma.T) / gram.dtype.type(2)
    return SigmaMatrix(sigma.astype(gram.dtype, copy=False))


def _coupling(pm: PremeasureSet, Sigma: SigmaMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """G = YΣYᵀ y su diagonal, con la guarda de denominadores por fila"""
    if Sigma.M != pm.M:
        raise DimensionMismatchError("Σ incompatible con Y", Sigma.entries.shape, pm.Y.shape)
    precision = _precision_of(pm)
    sigma = Sigma.entries.astype(pm.Y.dtype, copy=False)
    gram = pm.Y @ sigma @ pm.Y.T
    diagonal = np.diag(gram).copy()

    row_norms = np.sum(pm.Y.astype(np.float64) ** 2, axis=1)
    guards = NumericConfig.DENOM_TOL[precision] * row_norms * Sigma.norm_estimate
    degenerate = np.flatnonzero(~(np.abs(diagonal) > guards))
    if degenerate.size:
        index = int(degenerate[0])
        raise DegenerateDenominatorError("Denominador (y_j⁰)ᵀΣy_j⁰ numéricamente nulo", index)
    return gram, diagonal


def cross_coefficients(pm: PremeasureSet, Sigma: SigmaMatrix) -> np.ndarray:
    """
    Tabla k(i, j) = ((y_j⁰)ᵀΣy_i⁰) / ((y_j⁰)ᵀΣy_j⁰)

    Returns:
        Matriz D×D con k(i, i) = 1
    """
    gram, diagonal = _coupling(pm, Sigma)
    return gram.T / diagonal[np.newaxis, :]


def calibrate(oracle: MeasurementOracle, A: MeasurementMatrix,
              substitutes: Sequence[Image] = (),
              basis: Optional[BasisSet] = None) -> Tuple[FactoredRecvMatrix, CalibrationReport]:
    """
    Calibración de la matriz desconocida con M imágenes base.

    Args:
        oracle: Oráculo con la matriz desconocida
        A: Matriz de pre-medición
        substitutes: Imágenes que reemplazan las últimas columnas de la base
        basis: Base explícita; por defecto la QR de Aᵀ

    Returns:
        (A_recv con un término por imagen base, reporte de la calibración)
    """
    if oracle.M != A.M or oracle.N != A.N:
        raise DimensionMismatchError("El oráculo no coincide con A", (oracle.M, oracle.N), A.entries.shape)
    precision = A.precision
    logger.info(f"🧭 Calibración (algo3): M={A.M}, N={A.N}, {precision.value}, {len(substitutes)} sustituciones")

    basis = basis if basis is not None else orthonormal_basis(A)
    if substitutes:
        basis = basis.substitute(substitutes)
    pm = premeasure_basis(A, basis)
    Sigma = calibration_sigma(pm)
    gram, diagonal = _coupling(pm, Sigma)
    coefficients = gram.T / diagonal[np.newaxis, :]
    off_diagonal = coefficients - np.eye(pm.D, dtype=coefficients.dtype)

    calls_before = oracle.call_count
    Y_u = oracle.measure_basis_batch(basis)

    # Una sola GEMM para todas las filas (y_j⁰)ᵀΣA
    sigma = Sigma.entries.astype(precision.dtype, copy=False)
    rights = A.entries.T @ (sigma.T @ pm.Y.T)
    scales = precision.dtype.type(1) / diagonal
    terms = [
        MismatchTerm(scales[j], np.ascontiguousarray(Y_u[:, j]), np.ascontiguousarray(rights[:, j]))
        for j in range(pm.D)
    ]
    recv = FactoredRecvMatrix(tuple(terms), A.M, A.N, precision)

    report = CalibrationReport(
        orthonormality_residual=basis.orthonormality_residual,
        condition_number=float(np.linalg.cond((pm.Y.T @ pm.Y).astype(np.float64))),
        max_off_diagonal=float(np.max(np.abs(off_diagonal))),
        identity_residual=float(np.max(np.abs(gram - np.eye(pm.D, dtype=gram.dtype)))),
        oracle_calls=oracle.call_count - calls_before,
        substituted_columns=basis.substituted,
        precision=precision,
    )
    logger.info(f"✅ Calibración terminada: cond(YᵀY)={report.condition_number:.3e}, "
                f"máx |k(i,j)| fuera de la diagonal={report.max_off_diagonal:.3e}, llamadas={report.oracle_calls}")
    return recv, report

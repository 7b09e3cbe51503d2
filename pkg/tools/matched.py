# -*- coding: utf-8 -*-
"""
Solución emparejada de la matriz desconocida por iteración de error
"""

import logging
from typing import Optional, Tuple

import numpy as np

from config.settings import NumericConfig
from models.errors import DimensionMismatchError, DivergenceError, NearZeroComponentError
from models.measurement import MeasurementMatrix, MeasurementVector, SigmaMatrix, validate_dims
from models.recv import FactoredRecvMatrix
from models.results import ErrorTrace, MatchedSolveConfig
from simulation.oracle import MeasurementOracle
from tools.mismatch import MismatchProjector, default_sigma


logger = logging.getLogger(__name__)


def _check_inputs(oracle: MeasurementOracle, y: MeasurementVector, A: MeasurementMatrix, cfg: MatchedSolveConfig) -> None:
    validate_dims(A, cfg.pm_image)
    if oracle.M != A.M or oracle.N != A.N:
        raise DimensionMismatchError("El oráculo no coincide con A", (oracle.M, oracle.N), A.entries.shape)
    if y.M != A.M:
        raise DimensionMismatchError("La medición y no coincide con A", (y.M,), A.entries.shape)


def _guard_divergence(trace: ErrorTrace, baseline: float, cfg: MatchedSolveConfig) -> None:
    """Aborta si el error crece divergence_factor veces sobre su mínimo"""
    current = trace.records[-1].error_2
    if not np.isfinite(current):
        raise DivergenceError("El error de la iteración dejó de ser finito", trace)
    floor = max(min(baseline, trace.min_error), NumericConfig.ZERO_TOL[trace.precision] * baseline)
    if floor > 0 and current > cfg.divergence_factor * floor:
        logger.warning(f"⚠️ Divergencia en la iteración {len(trace)}: {current:.3e} > {cfg.divergence_factor}·{floor:.3e}")
        raise DivergenceError(
            f"El error creció a {current:.3e} (mínimo {floor:.3e}) en la iteración {len(trace)}", trace
        )


def error_iteration(oracle: MeasurementOracle, y: MeasurementVector, A: MeasurementMatrix,
                    cfg: MatchedSolveConfig,
                    Sigma: Optional[SigmaMatrix] = None) -> Tuple[FactoredRecvMatrix, ErrorTrace]:
    """
    A_recv para y: una medición real de la imagen fijada por cada iteración.

    Args:
        oracle: Sesión del oráculo con la imagen objetivo fijada
        y: Medición objetivo
        A: Matriz de pre-medición
        cfg: Configuración del solver
        Sigma: Solución especial; por defecto (AAᵀ)⁻¹

    Returns:
        (A_recv acumulada, traza de error)
    """
    _check_inputs(oracle, y, A, cfg)
    precision = A.precision
    dtype = precision.dtype
    Sigma = Sigma if Sigma is not None else default_sigma(A)

    pm = cfg.pm_image.pixels.astype(dtype, copy=False)
    y0 = MeasurementVector(A.apply(pm))
    projector = MismatchProjector(y0, Sigma, A)

    target = y.values.astype(dtype, copy=False)
    baseline = float(np.linalg.norm(target.astype(np.float64)))
    recv = FactoredRecvMatrix.empty(A.M, A.N, precision)
    trace = ErrorTrace(precision)
    calls_before = oracle.call_count
    logger.info(f"🔁 Iteración de error (algo1): {cfg.epochs} épocas, M={A.M}, N={A.N}, {precision.value}")

    error = target
    for _ in range(cfg.epochs):
        recv = recv.extend(projector.term(error))
        measured = oracle.measure_through(recv)
        error = target - measured.values
        record = trace.append(error, oracle.call_count - calls_before)
        logger.debug(f"algo1 iteración {record.iteration}: ‖e‖₂={record.error_2:.3e} ‖e‖∞={record.error_inf:.3e}")
        _guard_divergence(trace, baseline, cfg)
        if record.error_inf <= cfg.stop_tol:
            trace.stopped_early = True
            break

    trace.convergence_factor = trace.records[0].error_2 / baseline if baseline > 0 else 0.0
    logger.info(f"✅ algo1 terminado: {len(trace)} iteraciones, error final {trace.final_error:.3e}, "
                f"llamadas al oráculo {oracle.call_count - calls_before}")
    return recv, trace


def initialize_recv_y0(A: MeasurementMatrix, cfg: MatchedSolveConfig,
                       Sigma: Optional[SigmaMatrix] = None) -> Tuple[MeasurementVector, FactoredRecvMatrix]:
    """
    Inicializa A_recv^{y0}, que empareja y0 = A·PM, sin mediciones.

    Conserva el prefijo de términos con menor residuo ∞, de modo que el
    resultado nunca empeora el de la primera época en ninguna precisión.
    """
    validate_dims(A, cfg.pm_image)
    precision = A.precision
    dtype = precision.dtype
    Sigma = Sigma if Sigma is not None else default_sigma(A)

    pm = cfg.pm_image.pixels.astype(dtype, copy=False)
    y0 = MeasurementVector(A.apply(pm))
    projector = MismatchProjector(y0, Sigma, A)

    recv = FactoredRecvMatrix.empty(A.M, A.N, precision)
    best_residual, best_count = np.inf, 0
    error = y0.values
    for epoch in range(cfg.epochs):
        recv = recv.extend(projector.term(error))
        error = y0.values - recv.apply(pm)
        residual = float(np.max(np.abs(error)))
        logger.debug(f"algo2.1 época {epoch + 1}: residuo ∞ {residual:.3e}")
        if residual < best_residual:
            best_residual, best_count = residual, recv.rank_terms
        if residual <= cfg.stop_tol:
            break

    logger.info(f"A_recv^y0 inicializada con {best_count} términos (residuo ∞ {best_residual:.3e})")
    return y0, recv.truncated(best_count)


def estimate_k(y_prime: MeasurementVector, y_pm: MeasurementVector) -> float:
    """
    Mediana del cociente y′ ⊘ y_pm.

    Raises:
        NearZeroComponentError: si y_pm tiene componentes casi nulos
    """
    if y_prime.M != y_pm.M:
        raise DimensionMismatchError("y′ e y_pm deben tener la misma longitud", (y_prime.M,), (y_pm.M,))
    denominator = y_pm.values
    scale = float(np.max(np.abs(denominator))) if denominator.size else 0.0
    tol = NumericConfig.ZERO_TOL[y_pm.precision] * scale
    offending = np.flatnonzero(np.abs(denominator) <= tol)
    if offending.size:
        logger.warning(f"⚠️ y_pm con {offending.size} componentes casi nulos")
        raise NearZeroComponentError("y_pm tiene componentes casi nulos", offending)
    ratios = y_prime.values.astype(denominator.dtype, copy=False) / denominator
    return float(np.median(ratios))


def matched_solution(oracle: MeasurementOracle, y: MeasurementVector, A: MeasurementMatrix,
                     cfg: MatchedSolveConfig,
                     Sigma: Optional[SigmaMatrix] = None) -> Tuple[FactoredRecvMatrix, ErrorTrace]:
    """
    Solución emparejada con una única medición.

    Mide la imagen a través de A_recv^{y0}, estima k y sustituye cada medición
    posterior por k·(A_recv·PM). Con `cfg.warm_start` la acumulación parte de
    A_recv^{y0} y del error y − y′; si no, parte de cero y la trayectoria sin
    ruido coincide con la de `error_iteration`.
    """
    _check_inputs(oracle, y, A, cfg)
    precision = A.precision
    dtype = precision.dtype
    Sigma = Sigma if Sigma is not None else default_sigma(A)

    y0, initial = initialize_recv_y0(A, cfg, Sigma)
    projector = MismatchProjector(y0, Sigma, A)
    pm = cfg.pm_image.pixels.astype(dtype, copy=False)

    calls_before = oracle.call_count
    y_prime = oracle.measure_through(initial)
    y_pm = MeasurementVector(initial.apply(pm))
    k = dtype.type(estimate_k(y_prime, y_pm))
    logger.info(f"🔁 Solución emparejada (algo2): k={float(k):.6g}, {cfg.epochs} épocas, {precision.value}")

    target = y.values.astype(dtype, copy=False)
    baseline = float(np.linalg.norm(target.astype(np.float64)))
    trace = ErrorTrace(precision, convergence_factor=abs(1.0 - float(k)))
    if cfg.warm_start:
        recv = initial
        error = target - y_prime.values
    else:
        recv = FactoredRecvMatrix.empty(A.M, A.N, precision)
        error = target

    for _ in range(cfg.epochs):
        recv = recv.extend(projector.term(error))
        surrogate = k * recv.apply(pm)
        error = target - surrogate
        record = trace.append(error, oracle.call_count - calls_before)
        logger.debug(f"algo2 iteración {record.iteration}: ‖e‖₂={record.error_2:.3e} ‖e‖∞={record.error_inf:.3e}")
        _guard_divergence(trace, baseline, cfg)
        if record.error_inf <= cfg.stop_tol:
            trace.stopped_early = True
            break

    logger.info(f"✅ algo2 terminado: {len(trace)} iteraciones, error final {trace.final_error:.3e}, "
                f"llamadas al oráculo {oracle.call_count - calls_before}")
    return recv, trace

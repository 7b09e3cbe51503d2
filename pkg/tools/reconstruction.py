# -*- coding: utf-8 -*-
"""
Reconstrucción dispersa G(y, A): contracción iterativa acelerada y monótona
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import lstsq
from scipy.optimize import nnls

from config.settings import NumericConfig
from models.errors import DimensionMismatchError, DomainError
from models.measurement import Image, MeasurementVector
from models.recv import LinearMeasurement
from models.results import ReconstructConfig, ReconstructReport, StepRule


logger = logging.getLogger(__name__)


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    """sign(v)·max(|v| − t, 0) componente a componente"""
    if t < 0:
        raise DomainError("El umbral debe ser >= 0")
    v = np.asarray(v)
    t = v.dtype.type(t) if np.issubdtype(v.dtype, np.floating) else t
    return np.sign(v) * np.maximum(np.abs(v) - t, 0)


def _prox(v: np.ndarray, t: float, nonneg: bool) -> np.ndarray:
    if nonneg:
        return np.maximum(v - v.dtype.type(t), 0)
    return soft_threshold(v, t)


def estimate_lipschitz(operator: LinearMeasurement, iterations: int = 100, tol: float = 1e-6) -> float:
    """
    ‖A‖₂² por iteración de potencia sobre AᵀA

    Args:
        operator: Operador con apply/adjoint
        iterations: Máximo de iteraciones
        tol: Cambio relativo para detenerse
    """
    dtype = operator.precision.dtype
    generator = np.random.Generator(np.random.Philox(0))
    v = generator.standard_normal(operator.N).astype(dtype)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = operator.adjoint(operator.apply(v))
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = (w / dtype.type(norm)).astype(dtype, copy=False)
        if abs(norm - estimate) <= tol * norm:
            return norm
        estimate = norm
    return estimate


def _data_term(operator: LinearMeasurement, x: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    residual = operator.apply(x) - y
    return 0.5 * float(residual.astype(np.float64) @ residual.astype(np.float64)), residual


def _objective(operator: LinearMeasurement, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    data, _ = _data_term(operator, x, y)
    return data + lam * float(np.sum(np.abs(x.astype(np.float64))))


def shrinkage_step(x: np.ndarray, operator: LinearMeasurement, y: np.ndarray,
                   lipschitz: float, lambda_reg: float, nonneg: bool = True) -> np.ndarray:
    """Un paso de gradiente proximal con paso 1/L"""
    dtype = operator.precision.dtype
    gradient = operator.adjoint(operator.apply(x) - y)
    step = dtype.type(1.0 / lipschitz)
    return _prox(x - step * gradient, lambda_reg / lipschitz, nonneg)


def _debias(operator: LinearMeasurement, x: np.ndarray, y: np.ndarray, nonneg: bool) -> Optional[np.ndarray]:
    """Reajuste por mínimos cuadrados sobre el soporte detectado"""
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    if peak == 0.0:
        return None
    support = np.flatnonzero(np.abs(x) > NumericConfig.SUPPORT_TOL * peak)
    if support.size == 0 or support.size > operator.M:
        return None
    dtype = operator.precision.dtype
    selector = np.zeros((operator.N, support.size), dtype=dtype)
    selector[support, np.arange(support.size)] = 1
    columns = np.asarray(operator.apply(selector))
    if nonneg:
        coefficients, _ = nnls(columns.astype(np.float64), y.astype(np.float64))
        coefficients = coefficients.astype(dtype)
    else:
        coefficients = lstsq(columns, y)[0].astype(dtype, copy=False)
    refit = np.zeros(operator.N, dtype=dtype)
    refit[support] = coefficients
    return refit


def reconstruct(y: MeasurementVector, Arecv: LinearMeasurement,
                cfg: Optional[ReconstructConfig] = None,
                shape: Optional[Tuple[int, int]] = None) -> Tuple[Image, ReconstructReport]:
    """
    Minimiza ½‖y − A·x‖² + λ‖x‖₁ (opcionalmente con x ≥ 0).

    Usa la variante monótona de la contracción acelerada con búsqueda de paso
    por retroceso, aplicando el operador solo mediante apply/adjoint. La falta
    de convergencia se informa en el reporte.

    Args:
        y: Medición
        Arecv: Operador de medición (A_recv factorizada o matriz densa)
        cfg: Configuración; por defecto ReconstructConfig()
        shape: Forma (alto, ancho) de la imagen devuelta

    Returns:
        (imagen reconstruida, reporte del solver)
    """
    cfg = cfg or ReconstructConfig()
    if y.M != Arecv.M:
        raise DimensionMismatchError("Medición incompatible con el operador", (y.M,), (Arecv.M, Arecv.N))
    dtype = Arecv.precision.dtype
    target = y.values.astype(dtype, copy=False)

    lam = cfg.lambda_reg
    if lam is None:
        lam = NumericConfig.DEFAULT_LAMBDA_FACTOR * float(np.max(np.abs(Arecv.adjoint(target))))
    lipschitz = estimate_lipschitz(Arecv)
    if cfg.step_rule is StepRule.FIXED:
        lipschitz *= 1.01
    lipschitz = max(lipschitz, np.finfo(dtype).tiny)

    x = np.zeros(Arecv.N, dtype=dtype)
    z = x.copy()
    t = 1.0
    objective = _objective(Arecv, x, target, lam)
    trace = [objective]
    converged = False
    iterations = 0
    logger.debug(f"Reconstrucción: λ={lam:.3e}, L={lipschitz:.3e}, regla={cfg.step_rule.value}")

    for iterations in range(1, cfg.max_iters + 1):
        data_z, residual_z = _data_term(Arecv, z, target)
        gradient = Arecv.adjoint(residual_z)
        while True:
            u = _prox(z - dtype.type(1.0 / lipschitz) * gradient, lam / lipschitz, cfg.nonneg)
            if cfg.step_rule is StepRule.FIXED:
                break
            step = (u - z).astype(np.float64)
            data_u, _ = _data_term(Arecv, u, target)
            bound = data_z + float(gradient.astype(np.float64) @ step) + 0.5 * lipschitz * float(step @ step)
            if data_u <= bound * (1 + 1e-12) + 1e-300:
                break
            lipschitz *= NumericConfig.BACKTRACK_ETA

        objective_u = _objective(Arecv, u, target, lam)
        accepted = objective_u <= objective
        x_next = u if accepted else x
        objective_next = objective_u if accepted else objective

        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        z = (x_next + dtype.type(t / t_next) * (u - x_next)
             + dtype.type((t - 1.0) / t_next) * (x_next - x)).astype(dtype, copy=False)

        change = float(np.linalg.norm((x_next - x).astype(np.float64)))
        decrease = objective - objective_next
        x, objective, t = x_next, objective_next, t_next
        trace.append(objective)

        scale = max(1.0, float(np.linalg.norm(x.astype(np.float64))))
        if accepted and decrease <= cfg.conv_tol * max(1.0, abs(objective)) and change <= np.sqrt(cfg.conv_tol) * scale:
            converged = True
            break

    if not converged:
        logger.warning(f"⚠️ Reconstrucción sin convergencia tras {iterations} iteraciones")

    debiased = False
    if cfg.debias:
        refit = _debias(Arecv, x, target, cfg.nonneg)
        if refit is not None and _data_term(Arecv, refit, target)[0] <= _data_term(Arecv, x, target)[0]:
            x, debiased = refit, True

    peak = float(np.max(np.abs(x))) if x.size else 0.0
    support_size = int(np.count_nonzero(np.abs(x) > NumericConfig.SUPPORT_TOL * peak)) if peak > 0 else 0
    report = ReconstructReport(
        lambda_reg=lam,
        lipschitz=lipschitz,
        iterations=iterations,
        converged=converged,
        objective_trace=trace,
        support_size=support_size,
        debiased=debiased,
    )
    logger.info(f"Reconstrucción: {iterations} iteraciones, convergió={converged}, soporte={support_size}")
    height, width = shape if shape is not None else (1, Arecv.N)
    return Image(x, width=width, height=height), report

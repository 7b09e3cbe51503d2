# -*- coding: utf-8 -*-
"""
Diagnósticos sin mediciones: error de emparejamiento, vector λ, familia de curvas y ruido límite
"""

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np

from config.settings import NumericConfig
from models.errors import DimensionMismatchError, DivergenceError, DomainError
from models.measurement import Image, MeasurementMatrix, MeasurementVector, SigmaMatrix, validate_dims
from models.recv import LinearMeasurement
from models.results import CurvePoint, LambdaReport, LambdaVerdict, NoiseLimitStats, RecoveryMetrics
from simulation.oracle import derive_generator
from tools.mismatch import MismatchProjector, default_sigma


logger = logging.getLogger(__name__)

# Clave del flujo aleatorio propio de los diagnósticos
DIAGNOSTICS_STREAM = 7


def match_error(y: MeasurementVector, Arecv: LinearMeasurement, x: Image,
                trials: int = 1, oracle_noise: float = 0.0, seed: int = 0) -> float:
    """
    E‖y − A_recv·x‖₂ como media de Monte-Carlo sobre realizaciones de ruido.

    Con oracle_noise = 0 es una única norma determinista.
    """
    if trials < 1:
        raise DomainError("trials debe ser >= 1")
    if y.M != Arecv.M or x.N != Arecv.N:
        raise DimensionMismatchError("y, A_recv y x incompatibles", (y.M,), (Arecv.M, Arecv.N), (x.N,))
    dtype = Arecv.precision.dtype
    predicted = Arecv.apply(x.pixels.astype(dtype, copy=False)).astype(np.float64)
    target = y.values.astype(np.float64)
    if oracle_noise == 0:
        return float(np.linalg.norm(target - predicted))

    generator = derive_generator(seed, DIAGNOSTICS_STREAM)
    noise = generator.standard_normal((trials, y.M)) * oracle_noise
    return float(np.mean(np.linalg.norm(target + noise - predicted, axis=1)))


def lambda_vector(Arecv: LinearMeasurement, x: Image, x_prime: Image,
                  cv_threshold: Optional[float] = None) -> LambdaReport:
    """
    λ = (A_recv·x′) ⊘ (A_recv·x) con exclusión de denominadores casi nulos.

    El cociente se calcula en la precisión de A_recv; las estadísticas en doble.
    Los componentes excluidos quedan como NaN y se cuentan.
    """
    if x.N != Arecv.N or x_prime.N != Arecv.N:
        raise DimensionMismatchError("Imágenes incompatibles con A_recv", (Arecv.M, Arecv.N), (x.N,), (x_prime.N,))
    dtype = Arecv.precision.dtype
    numerator = Arecv.apply(x_prime.pixels.astype(dtype, copy=False))
    denominator = Arecv.apply(x.pixels.astype(dtype, copy=False))
    scale = float(np.max(np.abs(denominator))) if denominator.size else 0.0
    if scale == 0.0:
        raise DomainError("A_recv·x es nulo: todos los componentes de λ quedan excluidos")

    included = np.abs(denominator) >= NumericConfig.UNDERFLOW_TOL * scale
    lam = np.full(Arecv.M, np.nan, dtype=dtype)
    lam[included] = numerator[included] / denominator[included]
    values = lam[included].astype(np.float64)

    mean = float(np.mean(values))
    std = float(np.std(values))
    cv = std / abs(mean) if mean != 0 else float("inf")
    threshold = NumericConfig.CV_THRESHOLD if cv_threshold is None else cv_threshold
    verdict = LambdaVerdict.CONSTANT_LIKE if cv <= threshold else LambdaVerdict.FLUCTUATING
    excluded = int(Arecv.M - np.count_nonzero(included))
    if excluded:
        logger.debug(f"λ: {excluded} componentes excluidos por denominador casi nulo")
    return LambdaReport(
        lambda_=lam,
        min=float(np.min(values)),
        max=float(np.max(values)),
        mean=mean,
        coefficient_of_variation=cv,
        verdict=verdict,
        excluded_count=excluded,
    )


def curve_family(i_values: Iterable[int], x_grid: Iterable[float]) -> List[CurvePoint]:
    """Filas (i, x, (1−x)·xⁱ) para |x| < 1"""
    i_list = [int(i) for i in i_values]
    grid = np.asarray(list(x_grid), dtype=np.float64)
    if any(i < 0 for i in i_list):
        raise DomainError("Los exponentes i deben ser >= 0")
    if grid.size and np.any(np.abs(grid) >= 1):
        raise DomainError("La familia de curvas solo está definida para |x| < 1")
    return [
        CurvePoint(i=i, x=float(x), value=float((1.0 - x) * x ** i))
        for i in i_list
        for x in grid
    ]


def noise_limit_stats(k_eps: float, sigma: float, mu: float = 0.0, trials: int = 10000,
                      burn_in: int = 200, lambda0: float = 1.0, seed: int = 0) -> NoiseLimitStats:
    """
    Simula λᵏ⁺¹ = k_ε·λᵏ + (1 − k_ε)·εᵏ con ε ~ N(μ, σ²) tras un burn-in.

    Devuelve la media y varianza empíricas junto con las dos formas cerradas
    candidatas: σ²/(1 + k_ε) y la estacionaria AR(1) (1 − k_ε)σ²/(1 + k_ε).
    """
    if not abs(k_eps) < 1:
        raise DivergenceError(f"|k_ε| = {abs(k_eps)} >= 1: la recurrencia no es estacionaria")
    if trials < 100:
        raise DomainError("Se requieren al menos 100 pruebas")
    if sigma < 0 or burn_in < 0:
        raise DomainError("sigma y burn_in deben ser >= 0")

    generator = derive_generator(seed, DIAGNOSTICS_STREAM, trials)
    lam = np.full(trials, float(lambda0))
    for _ in range(burn_in):
        eps = mu + sigma * generator.standard_normal(trials)
        lam = k_eps * lam + (1.0 - k_eps) * eps

    mean = float(np.mean(lam))
    variance = float(np.var(lam, ddof=1))
    se_mean = float(np.sqrt(variance / trials))
    se_variance = float(variance * np.sqrt(2.0 / (trials - 1)))
    closed_form_variance = sigma ** 2 / (1.0 + k_eps)
    ar1_variance = (1.0 - k_eps) * sigma ** 2 / (1.0 + k_eps)
    discrepancy = abs(variance - closed_form_variance) > 3.0 * se_variance

    logger.info(f"Ruido límite k_ε={k_eps}: media {mean:.4g}±{se_mean:.2g}, var {variance:.4g} "
                f"(σ²/(1+k)={closed_form_variance:.4g}, AR(1)={ar1_variance:.4g})")
    return NoiseLimitStats(
        k_eps=k_eps,
        sigma=sigma,
        mu=mu,
        trials=trials,
        burn_in=burn_in,
        empirical_mean=mean,
        empirical_variance=variance,
        mean_standard_error=se_mean,
        variance_standard_error=se_variance,
        closed_form_variance=closed_form_variance,
        ar1_variance=ar1_variance,
        discrepancy=discrepancy,
    )


def convergence_factors(A: MeasurementMatrix, pm: Image, x: Image,
                        Sigma: Optional[SigmaMatrix] = None) -> Tuple[float, float]:
    """
    k_ε con signo y su magnitud para una imagen conocida

    Returns:
        (1 − k(x), |1 − k(x)|)
    """
    validate_dims(A, pm)
    validate_dims(A, x)
    Sigma = Sigma if Sigma is not None else default_sigma(A)
    dtype = A.precision.dtype
    y0 = MeasurementVector(A.apply(pm.pixels.astype(dtype, copy=False)))
    signed = 1.0 - MismatchProjector(y0, Sigma, A).coefficient(x)
    return signed, abs(signed)


def support_of(x: np.ndarray, tol: float = NumericConfig.SUPPORT_TOL) -> np.ndarray:
    """Índices con |x| > tol·max|x|"""
    values = np.abs(np.asarray(x, dtype=np.float64))
    peak = float(np.max(values)) if values.size else 0.0
    if peak == 0.0:
        return np.array([], dtype=np.intp)
    return np.flatnonzero(values > tol * peak)


def support_f1(x_hat: np.ndarray, x_true: np.ndarray, tol: float = NumericConfig.SUPPORT_TOL) -> float:
    estimated = set(support_of(x_hat, tol).tolist())
    truth = set(support_of(x_true, tol).tolist())
    if not estimated and not truth:
        return 1.0
    hits = len(estimated & truth)
    return 2.0 * hits / (len(estimated) + len(truth))


def psnr(x_hat: np.ndarray, x_true: np.ndarray, peak: Optional[float] = None) -> float:
    """PSNR en dB con pico max|x_true| salvo que se indique"""
    estimate = np.asarray(x_hat, dtype=np.float64)
    truth = np.asarray(x_true, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise DimensionMismatchError("Imágenes de distinto tamaño", estimate.shape, truth.shape)
    mse = float(np.mean((estimate - truth) ** 2))
    peak = float(np.max(np.abs(truth))) if peak is None else peak
    if mse == 0.0:
        return float("inf")
    if peak == 0.0:
        return float("-inf")
    return 10.0 * np.log10(peak ** 2 / mse)


def recovery_metrics(x_hat: Image, x_true: Image,
                     success_tol: float = NumericConfig.DEFAULT_SUCCESS_TOL) -> RecoveryMetrics:
    """PSNR, F1 de soporte, error relativo y éxito (F1 = 1 y error ≤ success_tol)"""
    if x_hat.N != x_true.N:
        raise DimensionMismatchError("Imágenes de distinto tamaño", (x_hat.N,), (x_true.N,))
    estimate = x_hat.pixels.astype(np.float64)
    truth = x_true.pixels.astype(np.float64)
    truth_norm = float(np.linalg.norm(truth))
    difference = float(np.linalg.norm(estimate - truth))
    relative = difference / truth_norm if truth_norm > 0 else difference
    f1 = support_f1(estimate, truth)
    return RecoveryMetrics(
        psnr=psnr(estimate, truth),
        support_f1=f1,
        relative_error=relative,
        success=bool(f1 == 1.0 and relative <= success_tol),
    )

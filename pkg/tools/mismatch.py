# -*- coding: utf-8 -*-
"""
Ecuación de desajuste: solución especial Σ, términos de rango 1 y coeficiente multiplicador
"""

import logging
from typing import Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, svdvals

from config.settings import NumericConfig
from models.errors import DegenerateDenominatorError, DimensionMismatchError, IllConditionedError, RankDeficiencyError
from models.measurement import Image, MeasurementMatrix, MeasurementVector, SigmaMatrix, validate_dims
from models.recv import MismatchTerm


logger = logging.getLogger(__name__)


def require_full_row_rank(A: MeasurementMatrix) -> np.ndarray:
    """
    Verifica rango completo por filas con los valores singulares de A

    Returns:
        Valores singulares en orden descendente
    """
    singular_values = svdvals(A.entries)
    tol = NumericConfig.RANK_TOL[A.precision]
    if singular_values.size == 0 or not singular_values[-1] > tol * singular_values[0]:
        smallest = float(singular_values[-1]) if singular_values.size else 0.0
        logger.warning(f"⚠️ Matriz {A.M}×{A.N} sin rango completo (σ_min={smallest:.3e})")
        raise RankDeficiencyError(f"La matriz {A.M}×{A.N} no tiene rango completo por filas (σ_min={smallest:.3e})")
    return singular_values


def default_sigma(A: MeasurementMatrix) -> SigmaMatrix:
    """
    Σ = (AAᵀ)⁻¹ mediante factorización de Cholesky.

    Args:
        A: Matriz de pre-medición con rango completo por filas

    Returns:
        Σ simétrica definida positiva, en la precisión de A
    """
    require_full_row_rank(A)
    dtype = A.precision.dtype
    gram = A.entries @ A.entries.T
    identity = np.eye(A.M, dtype=dtype)
    try:
        factor = cho_factor(gram)
    except LinAlgError as e:
        raise RankDeficiencyError(f"AAᵀ no es definida positiva: {e}") from e
    sigma = cho_solve(factor, identity)
    sigma = ((sigma + sigma.T) / dtype.type(2)).astype(dtype, copy=False)

    residual = float(np.linalg.norm(gram @ sigma - identity, np.inf))
    if residual > NumericConfig.INVERSE_TOL[A.precision]:
        raise IllConditionedError(f"Residuo de (AAᵀ)Σ − I demasiado grande: {residual:.3e}")
    logger.debug(f"Σ = (AAᵀ)⁻¹ calculada (M={A.M}, residuo={residual:.3e})")
    return SigmaMatrix(sigma)


class MismatchProjector:
    """
    Precálculo de la ecuación de desajuste para un y0 fijo.

    Guarda y0ᵀΣy0 y la fila y0ᵀΣA (como columna AᵀΣᵀy0); cada término nuevo
    cuesta entonces solo el vector izquierdo.
    """

    def __init__(self, y0: MeasurementVector, Sigma: SigmaMatrix, A: MeasurementMatrix):
        if y0.M != A.M or Sigma.M != A.M:
            raise DimensionMismatchError("y0, Σ y A deben compartir M", (y0.M,), Sigma.entries.shape, A.entries.shape)
        self.precision = A.precision
        self.M = A.M
        self.N = A.N
        dtype = self.precision.dtype
        y0_values = y0.values.astype(dtype, copy=False)
        sigma = Sigma.entries.astype(dtype, copy=False)

        self.right = A.entries.T @ (sigma.T @ y0_values)
        self.denominator = y0_values @ (sigma @ y0_values)

        y0_norm = float(np.linalg.norm(y0_values.astype(np.float64)))
        guard = NumericConfig.DENOM_TOL[self.precision] * y0_norm ** 2 * Sigma.norm_estimate
        if not np.isfinite(self.denominator) or not abs(float(self.denominator)) > guard:
            logger.warning(f"⚠️ y0ᵀΣy0 degenerado: {float(self.denominator):.3e} (guarda {guard:.3e})")
            raise DegenerateDenominatorError(f"y0ᵀΣy0 = {float(self.denominator):.3e} es numéricamente nulo")
        self.scale = dtype.type(1) / self.denominator

    def term(self, left: Union[MeasurementVector, np.ndarray]) -> MismatchTerm:
        """Término scale·left·rightᵀ que empareja la imagen de pre-medición con `left`"""
        values = left.values if isinstance(left, MeasurementVector) else np.asarray(left)
        if values.shape != (self.M,):
            raise DimensionMismatchError("Vector izquierdo incompatible", values.shape, (self.M,))
        return MismatchTerm(self.scale, values.astype(self.precision.dtype, copy=True), self.right)

    def coefficient(self, x: Union[Image, np.ndarray]) -> float:
        """k(x) = y0ᵀΣAx / y0ᵀΣy0"""
        pixels = x.pixels if isinstance(x, Image) else np.asarray(x)
        if pixels.shape != (self.N,):
            raise DimensionMismatchError("Imagen incompatible con la fila y0ᵀΣA", pixels.shape, (self.N,))
        return float((self.right @ pixels.astype(self.precision.dtype, copy=False)) * self.scale)


def mismatch_term(y: MeasurementVector, y0: MeasurementVector, Sigma: SigmaMatrix, A: MeasurementMatrix) -> MismatchTerm:
    """Término (1/(y0ᵀΣy0))·y·y0ᵀΣA de la ecuación de desajuste"""
    return MismatchProjector(y0, Sigma, A).term(y)


def multiplier_coefficient(y0: MeasurementVector, Sigma: SigmaMatrix, A: MeasurementMatrix, x: Image) -> float:
    validate_dims(A, x)
    return MismatchProjector(y0, Sigma, A).coefficient(x)


def signed_convergence_factor(y0: MeasurementVector, Sigma: SigmaMatrix, A: MeasurementMatrix, x: Image) -> float:
    """k_ε = 1 − k(x), con signo, tal como aparece en la recurrencia del error"""
    return 1.0 - multiplier_coefficient(y0, Sigma, A, x)


def convergence_factor(y0: MeasurementVector, Sigma: SigmaMatrix, A: MeasurementMatrix, x: Image) -> float:
    """|1 − k(x)|; la iteración de error converge geométricamente cuando es < 1"""
    return abs(signed_convergence_factor(y0, Sigma, A, x))

# -*- coding: utf-8 -*-
"""
Política numérica: tolerancias por modo de precisión y valores por defecto
"""

import logging
import os

from models.measurement import PrecisionMode


logger = logging.getLogger(__name__)


class NumericConfig:
    """Configuración numérica compartida por todos los módulos"""

    TOOL_VERSION = "0.1.0"

    # Guardia de y0ᵀΣy0, relativa a ‖y0‖²·‖Σ‖₂
    DENOM_TOL = {
        PrecisionMode.SINGLE: 1e-6,
        PrecisionMode.DOUBLE: 1e-12,
    }

    # Valor singular mínimo aceptado, relativo al máximo
    RANK_TOL = {
        PrecisionMode.SINGLE: 1e-5,
        PrecisionMode.DOUBLE: 1e-10,
    }

    # Residuo máximo de (AAᵀ)Σ − I
    INVERSE_TOL = {
        PrecisionMode.SINGLE: 1e-3,
        PrecisionMode.DOUBLE: 1e-8,
    }

    # Límite de cond(YᵀY) en la calibración
    COND_BOUND = {
        PrecisionMode.SINGLE: 1e4,
        PrecisionMode.DOUBLE: 1e8,
    }

    # Componentes casi nulos de y_pm en la estimación de k
    ZERO_TOL = {
        PrecisionMode.SINGLE: 1e-6,
        PrecisionMode.DOUBLE: 1e-12,
    }

    # Dígitos significativos al escribir CSV
    CSV_DIGITS = {
        PrecisionMode.SINGLE: 9,
        PrecisionMode.DOUBLE: 17,
    }

    # Diagnósticos
    CV_THRESHOLD = 1e-3
    UNDERFLOW_TOL = 1e-12
    SUPPORT_TOL = 1e-2

    # Solvers de iteración de error
    DEFAULT_EPOCHS = 20
    DEFAULT_DIVERGENCE_FACTOR = 100.0

    # Reconstrucción
    DEFAULT_LAMBDA_FACTOR = 1e-3
    DEFAULT_MAX_ITERS = 5000
    DEFAULT_CONV_TOL = 1e-10
    DEFAULT_SUCCESS_TOL = 1e-2
    BACKTRACK_ETA = 2.0

    # Barrido de ruido del artículo
    DEFAULT_SIGMAS = (0.0, 0.5, 1.0, 1.5, 2.0, 5.0)

    THREADS_ENV = "MMRX_THREADS"

    @classmethod
    def max_threads(cls) -> int:
        """Límite de hilos para barridos, tomado de MMRX_THREADS"""
        raw = os.environ.get(cls.THREADS_ENV)
        default = os.cpu_count() or 1
        if not raw:
            return default
        try:
            value = int(raw)
        except ValueError:
            logger.warning(f"⚠️ {cls.THREADS_ENV}={raw!r} no es un entero, se usa {default}")
            return default
        return max(1, value)

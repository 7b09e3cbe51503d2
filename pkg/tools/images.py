# -*- coding: utf-8 -*-
"""
Imágenes de pre-medición integradas e imágenes objetivo sintéticas
"""

import math
from enum import Enum
from typing import Tuple

import numpy as np

from models.errors import ConfigError, DomainError
from models.measurement import Image, PrecisionMode


class BuiltinPM(str, Enum):
    """Imágenes de pre-medición disponibles por nombre"""
    FLAT_GRAY = "flat_gray"
    RANDOM = "random"
    SPARSE = "sparse"
    TARGET = "target"


def image_shape(N: int) -> Tuple[int, int]:
    """(alto, ancho): cuadrada si N es un cuadrado perfecto, si no 1×N"""
    side = math.isqrt(N)
    return (side, side) if side * side == N else (1, N)


def sparse_target(N: int, sparsity: int, generator: np.random.Generator,
                  precision: PrecisionMode = PrecisionMode.DOUBLE) -> Image:
    """
    Imagen dispersa no negativa con amplitudes en [0.5, 1]

    Args:
        N: Número de píxeles
        sparsity: Píxeles no nulos
        generator: Flujo aleatorio de la prueba
        precision: Modo de precisión de la imagen
    """
    if not 1 <= sparsity <= N:
        raise DomainError(f"sparsity debe estar en [1, {N}]")
    pixels = np.zeros(N)
    support = generator.choice(N, size=sparsity, replace=False)
    pixels[support] = generator.uniform(0.5, 1.0, size=sparsity)
    return Image.from_vector(pixels, image_shape(N), precision)


def builtin_pm(name: str, N: int, generator: np.random.Generator, level: float = 0.5,
               sparsity: int = 8, precision: PrecisionMode = PrecisionMode.DOUBLE) -> Image:
    """
    Imagen de pre-medición integrada.

    `target` no se resuelve aquí: depende de la imagen medida y lo decide el llamador.
    """
    try:
        kind = BuiltinPM(name)
    except ValueError:
        raise ConfigError(f"Imagen de pre-medición desconocida: {name}")
    shape = image_shape(N)
    if kind is BuiltinPM.FLAT_GRAY:
        return Image.from_vector(np.full(N, level), shape, precision)
    if kind is BuiltinPM.RANDOM:
        return Image.from_vector(generator.uniform(0.0, 1.0, size=N), shape, precision)
    if kind is BuiltinPM.SPARSE:
        return sparse_target(N, min(sparsity, N), generator, precision)
    raise ConfigError("La pre-medición 'target' requiere la imagen objetivo")

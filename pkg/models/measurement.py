# -*- coding: utf-8 -*-
"""
Tipos numéricos compartidos: imágenes, matrices y vectores de medición
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from models.errors import DimensionMismatchError, DomainError


ArrayLike = Union[np.ndarray, list, tuple]


class PrecisionMode(str, Enum):
    """Ancho de punto flotante usado por toda la aritmética de los solvers"""
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32 if self is PrecisionMode.SINGLE else np.float64)

    @classmethod
    def of(cls, array: np.ndarray) -> "PrecisionMode":
        """Modo de precisión de un arreglo existente"""
        return cls.SINGLE if np.asarray(array).dtype == np.float32 else cls.DOUBLE


def _frozen_array(values: ArrayLike, precision: Optional[PrecisionMode], ndim: int, label: str) -> np.ndarray:
    """Copia inmutable y validada de un arreglo real"""
    source = np.asarray(values)
    if precision is None:
        precision = PrecisionMode.SINGLE if source.dtype == np.float32 else PrecisionMode.DOUBLE
    array = np.array(source, dtype=precision.dtype, copy=True)
    if array.ndim != ndim:
        raise DimensionMismatchError(f"{label} debe tener {ndim} dimensión(es)", array.shape)
    if not np.all(np.isfinite(array)):
        raise DomainError(f"{label} contiene valores no finitos")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Image:
    """Imagen en escala de grises aplanada por filas"""
    pixels: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        pixels = _frozen_array(self.pixels, None, 1, "Imagen")
        object.__setattr__(self, "pixels", pixels)
        if pixels.size < 1:
            raise DomainError("La imagen debe tener al menos un píxel")
        if self.width < 1 or self.height < 1 or self.width * self.height != pixels.size:
            raise DimensionMismatchError(
                "width·height no coincide con el número de píxeles",
                (self.height, self.width), pixels.size
            )

    @classmethod
    def from_grid(cls, grid: ArrayLike, precision: Optional[PrecisionMode] = None) -> "Image":
        array = np.asarray(grid)
        if array.ndim != 2:
            raise DimensionMismatchError("Se esperaba una rejilla 2-D", array.shape)
        if precision is not None:
            array = array.astype(precision.dtype)
        return cls(array.reshape(-1), width=array.shape[1], height=array.shape[0])

    @classmethod
    def from_vector(cls, values: ArrayLike, shape: Optional[Tuple[int, int]] = None,
                    precision: Optional[PrecisionMode] = None) -> "Image":
        """Imagen desde un vector; shape = (height, width)"""
        array = np.asarray(values)
        if precision is not None:
            array = array.astype(precision.dtype)
        height, width = shape if shape is not None else (1, array.size)
        return cls(array.reshape(-1), width=width, height=height)

    @property
    def N(self) -> int:
        return self.pixels.size

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @property
    def precision(self) -> PrecisionMode:
        return PrecisionMode.of(self.pixels)

    def grid(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)

    def is_nonzero(self) -> bool:
        return bool(np.any(self.pixels != 0))

    def require_nonzero(self, label: str = "imagen de pre-medición") -> "Image":
        if not self.is_nonzero():
            raise DomainError(f"La {label} debe ser no nula")
        return self

    def astype(self, precision: PrecisionMode) -> "Image":
        if self.precision is precision:
            return self
        return Image(self.pixels.astype(precision.dtype), self.width, self.height)

    def scaled(self, factor: float) -> "Image":
        return Image(self.pixels * self.pixels.dtype.type(factor), self.width, self.height)


@dataclass(frozen=True, eq=False)
class MeasurementVector:
    """Vector de medición de longitud M"""
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, None, 1, "Vector de medición"))

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def precision(self) -> PrecisionMode:
        return PrecisionMode.of(self.values)


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """
    Matriz de medición densa M×N.

    El constructor directo solo valida forma y finitud; `create` exige además
    M < N, condición que requiere toda matriz de pre-medición real.
    """
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, None, 2, "Matriz de medición"))

    @classmethod
    def create(cls, entries: ArrayLike, precision: Optional[PrecisionMode] = None) -> "MeasurementMatrix":
        array = np.asarray(entries)
        if precision is not None:
            array = array.astype(precision.dtype)
        matrix = cls(array)
        if matrix.M >= matrix.N:
            raise DimensionMismatchError("Se requiere M < N", matrix.entries.shape)
        return matrix

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    @property
    def precision(self) -> PrecisionMode:
        return PrecisionMode.of(self.entries)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.entries @ x

    def adjoint(self, u: np.ndarray) -> np.ndarray:
        return self.entries.T @ u

    def astype(self, precision: PrecisionMode) -> "MeasurementMatrix":
        if self.precision is precision:
            return self
        return MeasurementMatrix(self.entries.astype(precision.dtype))


@dataclass(frozen=True, eq=False)
class SigmaMatrix:
    """Solución especial Σ (M×M) de las ecuaciones de desajuste y calibración"""
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_array(self.entries, None, 2, "Σ")
        object.__setattr__(self, "entries", entries)
        if entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError("Σ debe ser cuadrada", entries.shape)
        if not np.any(entries != 0):
            raise DomainError("Σ debe ser no nula")

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def precision(self) -> PrecisionMode:
        return PrecisionMode.of(self.entries)

    @cached_property
    def norm_estimate(self) -> float:
        """Norma espectral de Σ, calculada una sola vez"""
        return float(np.linalg.norm(self.entries.astype(np.float64), 2))


def validate_dims(A: MeasurementMatrix, x: Image) -> None:
    """Verifica que la matriz y la imagen tengan el mismo N"""
    if A.N != x.N:
        raise DimensionMismatchError("Dimensiones incompatibles entre matriz e imagen", A.entries.shape, (x.N,))

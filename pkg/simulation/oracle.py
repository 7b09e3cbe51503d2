# -*- coding: utf-8 -*-
"""
Capa física simulada: pares (A, A_u), oráculo de medición y contabilidad de llamadas
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from models.errors import ConfigError, DimensionMismatchError, OracleSessionError
from models.measurement import Image, MeasurementMatrix, MeasurementVector, PrecisionMode
from models.recv import LinearMeasurement
from models.results import BasisSet
from tools.formats import read_mmrx


logger = logging.getLogger(__name__)


# Flujos independientes derivados de la misma semilla
STREAM_A = 0
STREAM_AU = 1
STREAM_NOISE = 2
STREAM_TARGET = 3
STREAM_PM = 4

RNG_ALGORITHM = "Philox4x64 via SeedSequence"


def derive_generator(seed: int, *keys: int) -> np.random.Generator:
    """
    Generador basado en contador, determinista para (seed, *keys)

    Args:
        seed: Semilla del experimento (u64)
        keys: Claves adicionales (prueba, flujo, ...)

    Returns:
        Generador Philox independiente del orden de ejecución
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


class MatrixModel(str, Enum):
    """Distribución de las entradas de las matrices simuladas"""
    GAUSSIAN_IID = "gaussian_iid"


@dataclass(frozen=True)
class SystemSpec:
    """Dimensiones, semilla y ruido de un sistema simulado"""
    M: int
    N: int
    seed: int = 0
    noise_sigma: float = 0.0
    matrix_model: MatrixModel = MatrixModel.GAUSSIAN_IID
    precision: PrecisionMode = PrecisionMode.DOUBLE

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ConfigError("M y N deben ser positivos")
        if self.M >= self.N:
            raise ConfigError(f"Se requiere M < N (M={self.M}, N={self.N})")
        if self.seed < 0:
            raise ConfigError("La semilla debe ser no negativa")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma debe ser >= 0")


class MeasurementOracle:
    """
    Caja negra y = A_u·x + σ·N(0, 1) con contador de mediciones.

    La sesión fija la imagen objetivo con `pin_target`; los solvers solo ven
    resultados de medición, nunca la imagen.
    """

    def __init__(self, hidden: MeasurementMatrix, noise_sigma: float = 0.0,
                 generator: Optional[np.random.Generator] = None):
        if noise_sigma < 0:
            raise ConfigError("noise_sigma debe ser >= 0")
        self._hidden = hidden
        self._sigma = float(noise_sigma)
        self._rng = generator if generator is not None else derive_generator(0, STREAM_NOISE)
        self._target: Optional[Image] = None
        self.call_count = 0

    @property
    def M(self) -> int:
        return self._hidden.M

    @property
    def N(self) -> int:
        return self._hidden.N

    @property
    def precision(self) -> PrecisionMode:
        return self._hidden.precision

    @property
    def noise_sigma(self) -> float:
        return self._sigma

    @property
    def has_target(self) -> bool:
        return self._target is not None

    def _noise(self, shape: Union[int, Tuple[int, ...]]) -> np.ndarray:
        # Se extrae siempre, incluso con σ = 0, para que σ distintos compartan números aleatorios
        draw = self._rng.standard_normal(shape) * self._sigma
        return draw.astype(self.precision.dtype)

    def _image_pixels(self, x: Image) -> np.ndarray:
        if x.N != self.N:
            raise DimensionMismatchError("Imagen incompatible con el oráculo", (self.M, self.N), (x.N,))
        return x.pixels.astype(self.precision.dtype, copy=False)

    def pin_target(self, x: Image) -> MeasurementVector:
        """
        Fija la imagen medida de la sesión y devuelve su medición y.

        Es la medición a reconstruir, no una medición adicional: no incrementa call_count.
        """
        pixels = self._image_pixels(x)
        self._target = x
        y = self._hidden.entries @ pixels + self._noise(self.M)
        logger.debug(f"Objetivo fijado en el oráculo (N={self.N}, σ={self._sigma})")
        return MeasurementVector(y)

    def speckle_measure(self, x: Image) -> MeasurementVector:
        """Medición A_u·x + ruido; cuenta una llamada"""
        pixels = self._image_pixels(x)
        y = self._hidden.entries @ pixels + self._noise(self.M)
        self.call_count += 1
        return MeasurementVector(y)

    def measure_through(self, operator: LinearMeasurement) -> MeasurementVector:
        """
        Mide la imagen fijada a través de un operador construido (A_recv → x).

        Args:
            operator: Operador M×N con método apply

        Returns:
            operator·x + ruido; cuenta una llamada
        """
        if self._target is None:
            raise OracleSessionError("No hay imagen objetivo fijada en la sesión del oráculo")
        if operator.M != self.M or operator.N != self.N:
            raise DimensionMismatchError("Operador incompatible con el oráculo", (operator.M, operator.N), (self.M, self.N))
        pixels = self._image_pixels(self._target)
        y = np.asarray(operator.apply(pixels), dtype=self.precision.dtype) + self._noise(self.M)
        self.call_count += 1
        return MeasurementVector(y)

    def measure_basis_batch(self, basis: BasisSet) -> np.ndarray:
        """
        Mide todas las imágenes base en una llamada lógica.

        La columna j es la medición de Q[:, j] con ruido propio; cuenta D llamadas.
        """
        if basis.N != self.N:
            raise DimensionMismatchError("Base incompatible con el oráculo", (self.M, self.N), basis.Q.shape)
        Q = basis.Q.astype(self.precision.dtype, copy=False)
        # Ruido fila por imagen: el mismo orden que D mediciones sucesivas
        noise = self._noise((basis.D, self.M)).T
        Y_u = self._hidden.entries @ Q + noise
        self.call_count += basis.D
        logger.debug(f"Lote de {basis.D} imágenes base medido (llamadas={self.call_count})")
        return Y_u

    def reveal_hidden_matrix(self) -> MeasurementMatrix:
        """Solo para pruebas: expone A_u para aserciones contra el oráculo"""
        return self._hidden


def gaussian_matrix(generator: np.random.Generator, M: int, N: int, precision: PrecisionMode) -> MeasurementMatrix:
    """Matriz gaussiana i.i.d. de media 0 y varianza 1/M"""
    entries = generator.standard_normal((M, N)) / np.sqrt(M)
    return MeasurementMatrix(entries.astype(precision.dtype))


def generate_system(spec: SystemSpec, trial: int = 0) -> Tuple[MeasurementMatrix, MeasurementOracle]:
    """
    Genera la matriz de pre-medición A y un oráculo con A_u oculta.

    Args:
        spec: Especificación del sistema
        trial: Índice de prueba, combinado con la semilla para barridos paralelos

    Returns:
        (A, oracle) con A y A_u extraídas de flujos independientes
    """
    if spec.matrix_model is not MatrixModel.GAUSSIAN_IID:
        raise ConfigError(f"Modelo de matriz no soportado: {spec.matrix_model}")
    A = gaussian_matrix(derive_generator(spec.seed, trial, STREAM_A), spec.M, spec.N, spec.precision)
    A_u = gaussian_matrix(derive_generator(spec.seed, trial, STREAM_AU), spec.M, spec.N, spec.precision)
    oracle = MeasurementOracle(A_u, spec.noise_sigma, derive_generator(spec.seed, trial, STREAM_NOISE))
    logger.info(f"Sistema generado M={spec.M} N={spec.N} seed={spec.seed} trial={trial} ({spec.precision.value})")
    return A, oracle


def load_system(a_path: Union[str, Path], au_path: Union[str, Path], noise_sigma: float = 0.0,
                seed: int = 0, precision: Optional[PrecisionMode] = None,
                trial: int = 0) -> Tuple[MeasurementMatrix, MeasurementOracle]:
    """
    Construye (A, oracle) desde archivos MMRX capturados externamente.

    Args:
        a_path: Matriz de pre-medición
        au_path: Matriz desconocida A_u
        noise_sigma: Ruido del oráculo
        seed: Semilla del flujo de ruido
        precision: Modo de precisión; por defecto el del archivo A
        trial: Índice de prueba para el flujo de ruido
    """
    A = read_mmrx(a_path)
    A_u = read_mmrx(au_path)
    if A.entries.shape != A_u.entries.shape:
        raise DimensionMismatchError("A y A_u deben tener la misma forma", A.entries.shape, A_u.entries.shape)
    if A.M >= A.N:
        raise DimensionMismatchError("Se requiere M < N", A.entries.shape)
    if precision is not None:
        A, A_u = A.astype(precision), A_u.astype(precision)
    oracle = MeasurementOracle(A_u, noise_sigma, derive_generator(seed, trial, STREAM_NOISE))
    logger.info(f"Sistema cargado desde {a_path} y {au_path} (M={A.M}, N={A.N})")
    return A, oracle

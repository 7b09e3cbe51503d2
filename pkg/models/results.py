# -*- coding: utf-8 -*-
"""
Configuraciones y reportes de los solvers y diagnósticos
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import NumericConfig
from models.errors import DimensionMismatchError, DomainError
from models.measurement import Image, PrecisionMode


@dataclass(frozen=True, eq=False)
class MatchedSolveConfig:
    """Parámetros de los algoritmos de solución emparejada"""
    pm_image: Image
    epochs: int = NumericConfig.DEFAULT_EPOCHS
    stop_tol: float = 0.0
    divergence_factor: float = NumericConfig.DEFAULT_DIVERGENCE_FACTOR
    warm_start: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise DomainError("epochs debe ser un entero positivo")
        if self.stop_tol < 0:
            raise DomainError("stop_tol debe ser >= 0")
        if not self.divergence_factor > 1:
            raise DomainError("divergence_factor debe ser > 1")
        self.pm_image.require_nonzero()


@dataclass(frozen=True)
class IterationRecord:
    """Residuo tras una actualización de A_recv"""
    iteration: int
    error_2: float
    error_inf: float
    oracle_calls: int


@dataclass
class ErrorTrace:
    """Traza de error de una solución emparejada"""
    precision: PrecisionMode
    records: List[IterationRecord] = field(default_factory=list)
    convergence_factor: float = float("nan")
    stopped_early: bool = False

    def append(self, error: np.ndarray, oracle_calls: int) -> IterationRecord:
        error64 = np.asarray(error, dtype=np.float64)
        record = IterationRecord(
            iteration=len(self.records) + 1,
            error_2=float(np.linalg.norm(error64)),
            error_inf=float(np.max(np.abs(error64))) if error64.size else 0.0,
            oracle_calls=oracle_calls,
        )
        self.records.append(record)
        return record

    def __len__(self) -> int:
        return len(self.records)

    @property
    def errors_2(self) -> np.ndarray:
        return np.array([r.error_2 for r in self.records])

    @property
    def final_error(self) -> float:
        return self.records[-1].error_2 if self.records else float("nan")

    @property
    def min_error(self) -> float:
        return min((r.error_2 for r in self.records), default=float("nan"))


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Imágenes base (columnas de Q, N×D)"""
    Q: np.ndarray
    orthonormality_residual: float
    substituted: int = 0

    @staticmethod
    def residual_of(Q: np.ndarray) -> float:
        """‖QᵀQ − I‖∞ como máximo elemento absoluto"""
        Q64 = Q.astype(np.float64)
        gram = Q64.T @ Q64
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    @classmethod
    def from_columns(cls, Q: np.ndarray, substituted: int = 0) -> "BasisSet":
        Q = np.array(Q, copy=True)
        if Q.ndim != 2:
            raise DimensionMismatchError("Q debe ser una matriz N×D", Q.shape)
        Q.setflags(write=False)
        return cls(Q, cls.residual_of(Q), substituted)

    @property
    def N(self) -> int:
        return self.Q.shape[0]

    @property
    def D(self) -> int:
        return self.Q.shape[1]

    def substitute(self, images: Sequence[Image]) -> "BasisSet":
        """
        Reemplaza las últimas columnas de Q por imágenes arbitrarias normalizadas.

        Args:
            images: Imágenes de longitud N, a lo sumo D

        Returns:
            Nueva base con el residuo de ortonormalidad recalculado
        """
        if len(images) > self.D:
            raise DomainError(f"No se pueden sustituir {len(images)} columnas en una base de {self.D}")
        Q = np.array(self.Q, copy=True)
        start = self.D - len(images)
        for offset, image in enumerate(images):
            if image.N != self.N:
                raise DimensionMismatchError("Imagen incompatible con la base", (self.N,), (image.N,))
            column = image.require_nonzero("imagen de sustitución").pixels.astype(Q.dtype)
            Q[:, start + offset] = column / np.linalg.norm(column)
        return BasisSet.from_columns(Q, self.substituted + len(images))


@dataclass(frozen=True, eq=False)
class PremeasureSet:
    """Pre-mediciones Y (D×M), fila j = (A·Q[:, j])ᵀ"""
    Y: np.ndarray

    @property
    def D(self) -> int:
        return self.Y.shape[0]

    @property
    def M(self) -> int:
        return self.Y.shape[1]


@dataclass
class CalibrationReport:
    """Resumen de una calibración"""
    orthonormality_residual: float
    condition_number: float
    max_off_diagonal: float
    identity_residual: float
    oracle_calls: int
    substituted_columns: int
    precision: PrecisionMode

    def as_dict(self) -> Dict[str, Any]:
        return {
            "orthonormality_residual": self.orthonormality_residual,
            "condition_number": self.condition_number,
            "max_off_diagonal": self.max_off_diagonal,
            "identity_residual": self.identity_residual,
            "oracle_calls": self.oracle_calls,
            "substituted_columns": self.substituted_columns,
            "precision": self.precision.value,
        }


class StepRule(str, Enum):
    """Regla de paso del solver de contracción"""
    FIXED = "fixed"
    BACKTRACKING = "backtracking"


@dataclass(frozen=True)
class ReconstructConfig:
    """Parámetros de la reconstrucción ℓ1"""
    lambda_reg: Optional[float] = None
    max_iters: int = NumericConfig.DEFAULT_MAX_ITERS
    step_rule: StepRule = StepRule.BACKTRACKING
    conv_tol: float = NumericConfig.DEFAULT_CONV_TOL
    nonneg: bool = True
    debias: bool = True

    def __post_init__(self):
        if self.lambda_reg is not None and not self.lambda_reg > 0:
            raise DomainError("lambda_reg debe ser > 0")
        if self.max_iters < 1:
            raise DomainError("max_iters debe ser un entero positivo")
        if not self.conv_tol > 0:
            raise DomainError("conv_tol debe ser > 0")


@dataclass
class ReconstructReport:
    """Reporte del solver de reconstrucción"""
    lambda_reg: float
    lipschitz: float
    iterations: int
    converged: bool
    objective_trace: List[float] = field(default_factory=list)
    support_size: int = 0
    debiased: bool = False

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else float("nan")


class LambdaVerdict(str, Enum):
    """Clasificación del vector λ por su coeficiente de variación"""
    CONSTANT_LIKE = "constant-like"
    FLUCTUATING = "fluctuating"


@dataclass(frozen=True, eq=False)
class LambdaReport:
    """Cociente componente a componente (A_recv·x′) ⊘ (A_recv·x)"""
    lambda_: np.ndarray
    min: float
    max: float
    mean: float
    coefficient_of_variation: float
    verdict: LambdaVerdict
    excluded_count: int

    @property
    def M(self) -> int:
        return self.lambda_.size


@dataclass(frozen=True)
class NoiseLimitStats:
    """Estadística estacionaria del error en presencia de ruido"""
    k_eps: float
    sigma: float
    mu: float
    trials: int
    burn_in: int
    empirical_mean: float
    empirical_variance: float
    mean_standard_error: float
    variance_standard_error: float
    closed_form_variance: float
    ar1_variance: float
    discrepancy: bool

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class CurvePoint:
    """Fila (i, x, (1−x)·xⁱ) de la familia de curvas"""
    i: int
    x: float
    value: float


@dataclass(frozen=True)
class RecoveryMetrics:
    """Calidad de una reconstrucción frente a la imagen verdadera"""
    psnr: float
    support_f1: float
    relative_error: float
    success: bool

    def as_row(self) -> Tuple[float, float, float, int]:
        return (self.psnr, self.support_f1, self.relative_error, int(self.success))

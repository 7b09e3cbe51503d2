# -*- coding: utf-8 -*-
"""
Modelos para el sistema de errores numéricos y de configuración
"""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence


class ErrorCategory(Enum):
    """Categorías de errores"""
    CONFIG = "config"
    DIMENSION = "dimension"
    RANK = "rank"
    DENOMINATOR = "denominator"
    DIVERGENCE = "divergence"
    CONDITIONING = "conditioning"
    DOMAIN = "domain"
    IO = "io"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        """Código de salida del CLI asociado a la categoría"""
        if self in (ErrorCategory.CONFIG, ErrorCategory.DIMENSION):
            return 2
        if self is ErrorCategory.IO:
            return 4
        return 3


class ErrorSeverity(Enum):
    """Severidad del error"""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class MismatchError(Exception):
    """Error base de la librería"""
    category: ErrorCategory = ErrorCategory.UNKNOWN


class ConfigError(MismatchError, ValueError):
    """Configuración inválida o claves desconocidas"""
    category = ErrorCategory.CONFIG


class OracleSessionError(MismatchError, RuntimeError):
    """Uso del oráculo fuera de una sesión válida"""
    category = ErrorCategory.CONFIG


class DimensionMismatchError(MismatchError, ValueError):
    """Dimensiones incompatibles entre operandos"""
    category = ErrorCategory.DIMENSION

    def __init__(self, message: str, *shapes: Any):
        if shapes:
            message = f"{message}: " + " vs ".join(str(s) for s in shapes)
        super().__init__(message)
        self.shapes = shapes


class RankDeficiencyError(MismatchError, ArithmeticError):
    """Matriz sin rango completo por filas o columnas"""
    category = ErrorCategory.RANK


class DegenerateDenominatorError(MismatchError, ArithmeticError):
    """Denominador y0ᵀΣy0 numéricamente nulo"""
    category = ErrorCategory.DENOMINATOR

    def __init__(self, message: str, index: Optional[int] = None):
        if index is not None:
            message = f"{message} (índice {index})"
        super().__init__(message)
        self.index = index


class NearZeroComponentError(MismatchError, ArithmeticError):
    """Componentes casi nulos en un cociente elemento a elemento"""
    category = ErrorCategory.DENOMINATOR

    def __init__(self, message: str, indices: Sequence[int]):
        self.indices = [int(i) for i in indices]
        shown = self.indices[:10]
        suffix = "..." if len(self.indices) > 10 else ""
        super().__init__(f"{message}: índices {shown}{suffix}")


class DivergenceError(MismatchError, ArithmeticError):
    """La iteración de error creció por encima del factor de divergencia"""
    category = ErrorCategory.DIVERGENCE

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace


class IllConditionedError(MismatchError, ArithmeticError):
    """Número de condición por encima del límite configurado"""
    category = ErrorCategory.CONDITIONING

    def __init__(self, message: str, condition_number: Optional[float] = None):
        super().__init__(message)
        self.condition_number = condition_number


class DomainError(MismatchError, ValueError):
    """Argumento fuera del dominio de la operación"""
    category = ErrorCategory.DOMAIN


class FormatError(MismatchError, OSError):
    """Archivo con formato inválido (MMRX, PGM)"""
    category = ErrorCategory.IO


def categorize(error: BaseException) -> ErrorCategory:
    """Categoriza cualquier excepción, propia o no"""
    if isinstance(error, MismatchError):
        return error.category
    if isinstance(error, OSError):
        return ErrorCategory.IO
    return ErrorCategory.UNKNOWN


@dataclass
class ErrorPattern:
    """Patrón de error registrado en errors.json"""
    error_id: str
    category: ErrorCategory
    severity: ErrorSeverity
    error_message: str
    original_error: str
    context_info: Dict[str, Any]
    exit_code: int
    command: Optional[str] = None
    frequency: int = 1
    first_seen: str = field(default_factory=lambda: datetime.now().isoformat())
    last_seen: str = field(default_factory=lambda: datetime.now().isoformat())
    hints: List[str] = field(default_factory=list)

# -*- coding: utf-8 -*-
"""
Configuración de experimentos: documento INI validado con pydantic
"""

import configparser
import logging
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import NumericConfig
from models.errors import ConfigError
from models.measurement import PrecisionMode
from models.results import StepRule


logger = logging.getLogger(__name__)


class SolverKind(str, Enum):
    """Algoritmo de construcción de A_recv"""
    ALGO1 = "algo1"
    ALGO2 = "algo2"
    ALGO3 = "algo3"


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


FloatList = Annotated[List[float], BeforeValidator(_split_list)]
IntList = Annotated[List[int], BeforeValidator(_split_list)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)


class SystemSection(_Section):
    M: int = Field(16, ge=1)
    N: int = Field(64, ge=2)
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    noise_sigma: float = Field(0.0, ge=0.0)
    precision: PrecisionMode = PrecisionMode.DOUBLE
    matrix_a: Optional[str] = None
    matrix_au: Optional[str] = None

    @model_validator(mode="after")
    def _check_dimensions(self) -> "SystemSection":
        if self.M >= self.N:
            raise ValueError(f"Se requiere M < N (M={self.M}, N={self.N})")
        if (self.matrix_a is None) != (self.matrix_au is None):
            raise ValueError("matrix_a y matrix_au deben indicarse juntas")
        return self


class SolverSection(_Section):
    kind: SolverKind = SolverKind.ALGO2
    epochs: int = Field(NumericConfig.DEFAULT_EPOCHS, ge=1)
    pm_image: str = "flat_gray"
    pm_level: float = Field(0.5, gt=0.0)
    stop_tol: float = Field(1e-10, ge=0.0)
    divergence_factor: float = Field(NumericConfig.DEFAULT_DIVERGENCE_FACTOR, gt=1.0)
    warm_start: bool = False
    sparsity: int = Field(8, ge=1)
    targets: int = Field(3, ge=1)
    substitute_targets: bool = True


class ReconstructSection(_Section):
    lambda_reg: Optional[float] = Field(None, gt=0.0)
    max_iters: int = Field(NumericConfig.DEFAULT_MAX_ITERS, ge=1)
    step_rule: StepRule = StepRule.BACKTRACKING
    conv_tol: float = Field(NumericConfig.DEFAULT_CONV_TOL, gt=0.0)
    nonneg: bool = True
    debias: bool = True
    success_tol: float = Field(NumericConfig.DEFAULT_SUCCESS_TOL, gt=0.0)

    @field_validator("lambda_reg", mode="before")
    @classmethod
    def _auto_lambda(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in ("", "auto", "none"):
            return None
        return value


class OutputsSection(_Section):
    directory: str = "out"
    emit_svg: bool = False


class SweepSection(_Section):
    sigmas: FloatList = Field(default_factory=lambda: list(NumericConfig.DEFAULT_SIGMAS))
    trials: int = Field(20, ge=1)
    k_eps_values: FloatList = Field(default_factory=lambda: [0.0, 0.3, 0.6])
    limit_sigma: float = Field(1.0, ge=0.0)
    limit_trials: int = Field(10000, ge=100)
    burn_in: int = Field(200, ge=0)

    @field_validator("sigmas")
    @classmethod
    def _check_sigmas(cls, value: List[float]) -> List[float]:
        if not value or any(s < 0 for s in value):
            raise ValueError("sigmas debe ser una lista no vacía de valores >= 0")
        return value

    @field_validator("k_eps_values")
    @classmethod
    def _check_k_eps(cls, value: List[float]) -> List[float]:
        if any(abs(k) >= 1 for k in value):
            raise ValueError("k_eps_values requiere |k| < 1")
        return value


class CurvesSection(_Section):
    i_values: IntList = Field(default_factory=lambda: [0, 1, 2, 4, 8, 16])
    x_min: float = Field(-0.95, gt=-1.0, lt=1.0)
    x_max: float = Field(0.95, gt=-1.0, lt=1.0)
    points: int = Field(39, ge=2)

    @model_validator(mode="after")
    def _check_range(self) -> "CurvesSection":
        if self.x_min >= self.x_max:
            raise ValueError("x_min debe ser menor que x_max")
        if any(i < 0 for i in self.i_values):
            raise ValueError("i_values debe contener enteros >= 0")
        return self


class ExperimentConfig(_Section):
    """Configuración completa de un experimento"""
    system: SystemSection = Field(default_factory=SystemSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    reconstruct: ReconstructSection = Field(default_factory=ReconstructSection)
    outputs: OutputsSection = Field(default_factory=OutputsSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    curves: CurvesSection = Field(default_factory=CurvesSection)

    @classmethod
    def from_mapping(cls, data: Dict[str, Dict[str, Any]]) -> "ExperimentConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
            )
            raise ConfigError(f"Configuración inválida: {problems}") from e

    def with_overrides(self, seed: Optional[int] = None, precision: Optional[PrecisionMode] = None,
                       directory: Optional[str] = None) -> "ExperimentConfig":
        """Aplica las opciones de línea de comandos sobre el archivo"""
        data = self.model_dump(mode="python")
        if seed is not None:
            data["system"]["seed"] = seed
        if precision is not None:
            data["system"]["precision"] = precision
        if directory is not None:
            data["outputs"]["directory"] = directory
        return ExperimentConfig.from_mapping(data)


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """
    Lee un INI de experimento; sin ruta devuelve los valores por defecto.

    Raises:
        ConfigError: archivo ausente, sección o clave desconocida, valor inválido
    """
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"No existe el archivo de configuración: {path}")

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"INI mal formado en {path}: {e}") from e

    known = set(ExperimentConfig.model_fields)
    unknown = [section for section in parser.sections() if section not in known]
    if unknown:
        raise ConfigError(f"Secciones desconocidas en {path}: {', '.join(unknown)}")
    data = {section: dict(parser.items(section)) for section in parser.sections()}
    config = ExperimentConfig.from_mapping(data)
    logger.info(f"Configuración cargada desde {path}")
    return config


def _ini_value(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_ini_value(item) for item in value)
    return str(value)


def write_resolved(config: ExperimentConfig, path: Union[str, Path], notes: Sequence[str] = ()) -> Path:
    """
    Escribe la configuración resuelta como INI reproducible

    Args:
        config: Configuración efectiva
        path: Archivo de salida
        notes: Líneas informativas escritas como comentarios al inicio
    """
    path = Path(path)
    lines: List[str] = [f"# {note}" for note in notes]
    for section, values in config.model_dump(mode="python").items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            if value is None and key in ("matrix_a", "matrix_au"):
                continue
            lines.append(f"{key} = {_ini_value(value)}")
        lines.append("")
    path.write_text("\n".join(lines), encoding="utf-8")
    return path

# -*- coding: utf-8 -*-
"""
Registro de errores de ejecución por directorio de salida
"""

import hashlib
import json
import logging
from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

from models.errors import ErrorCategory, ErrorPattern, ErrorSeverity, categorize


logger = logging.getLogger(__name__)


class RunErrorLog:
    """Registra los fallos de los comandos en errors.json del directorio de salida"""

    FILE_NAME = "errors.json"

    HINTS = {
        ErrorCategory.CONFIG: [
            "Revisar las secciones y claves del archivo INI",
            "Comprobar que M < N en la sección [system]",
        ],
        ErrorCategory.DIMENSION: [
            "Verificar que A, A_u y las imágenes compartan M y N",
        ],
        ErrorCategory.RANK: [
            "A debe tener rango completo por filas; probar otra semilla o matriz",
        ],
        ErrorCategory.DENOMINATOR: [
            "Elegir una imagen de pre-medición con y0ᵀΣy0 lejos de cero",
            "Evitar componentes nulos en A_recv^y0·PM",
        ],
        ErrorCategory.DIVERGENCE: [
            "La imagen de pre-medición da |k_ε| >= 1; probar otra PM o escalarla",
            "Aumentar divergence_factor solo si la divergencia es transitoria",
        ],
        ErrorCategory.CONDITIONING: [
            "Reducir las sustituciones de la base o usar precisión doble",
        ],
        ErrorCategory.DOMAIN: [
            "Revisar los rangos de los parámetros numéricos",
        ],
        ErrorCategory.IO: [
            "Verificar rutas, permisos y el formato MMRX/PGM de los archivos",
        ],
    }

    def __init__(self, output_dir: Union[str, Path]):
        self.storage_path = Path(output_dir) / self.FILE_NAME
        self.error_patterns: Dict[str, ErrorPattern] = {}
        self.load_errors()

    def capture_error(self, error: BaseException, command: str,
                      context_info: Optional[Dict[str, Any]] = None) -> str:
        """
        Registra un error y devuelve su identificador estable

        Args:
            error: Excepción capturada
            command: Comando del CLI que falló
            context_info: Parámetros relevantes de la ejecución

        Returns:
            ID del patrón de error
        """
        context_info = context_info or {}
        error_id = self._generate_error_signature(error, command)
        category = categorize(error)
        current_time = datetime.now().isoformat()

        if error_id in self.error_patterns:
            pattern = self.error_patterns[error_id]
            pattern.frequency += 1
            pattern.last_seen = current_time
            pattern.context_info = context_info
            logger.info(f"Error conocido actualizado: {error_id} (frecuencia: {pattern.frequency})")
        else:
            pattern = ErrorPattern(
                error_id=error_id,
                category=category,
                severity=self._determine_severity(category),
                error_message=str(error),
                original_error=type(error).__name__,
                context_info=context_info,
                exit_code=category.exit_code,
                command=command,
                hints=list(self.HINTS.get(category, ["Consultar el registro de la ejecución"])),
            )
            self.error_patterns[error_id] = pattern
            logger.info(f"Nuevo error capturado: {error_id}")

        self.save_errors()
        return error_id

    def _generate_error_signature(self, error: BaseException, command: str) -> str:
        signature_data = f"{type(error).__name__}:{str(error)[:100]}:{command}"
        return hashlib.md5(signature_data.encode()).hexdigest()[:12]

    def _determine_severity(self, category: ErrorCategory) -> ErrorSeverity:
        if category is ErrorCategory.UNKNOWN:
            return ErrorSeverity.CRITICAL
        if category in (ErrorCategory.IO, ErrorCategory.DIVERGENCE, ErrorCategory.CONDITIONING, ErrorCategory.RANK):
            return ErrorSeverity.HIGH
        if category in (ErrorCategory.CONFIG, ErrorCategory.DIMENSION):
            return ErrorSeverity.MEDIUM
        return ErrorSeverity.LOW

    def load_errors(self):
        """Carga errores previos desde el archivo JSON"""
        try:
            if self.storage_path.exists():
                with open(self.storage_path, "r", encoding="utf-8") as f:
                    data = json.load(f)

                for error_id, error_data in data.items():
                    error_data["category"] = ErrorCategory(error_data["category"])
                    error_data["severity"] = ErrorSeverity(error_data["severity"])
                    self.error_patterns[error_id] = ErrorPattern(**error_data)

                logger.debug(f"Cargados {len(self.error_patterns)} patrones de error desde {self.storage_path}")
        except Exception as e:
            logger.error(f"Error cargando patrones de error: {e}")
            self.error_patterns = {}

    def save_errors(self):
        """Guarda los errores en el archivo JSON"""
        try:
            data = {}
            for error_id, pattern in sorted(self.error_patterns.items()):
                pattern_dict = asdict(pattern)
                pattern_dict["category"] = pattern.category.value
                pattern_dict["severity"] = pattern.severity.value
                data[error_id] = pattern_dict

            self.storage_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.storage_path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, ensure_ascii=False, default=str)
        except Exception as e:
            logger.error(f"Error guardando patrones de error: {e}")

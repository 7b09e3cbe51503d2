# -*- coding: utf-8 -*-
"""
Decorador para captura automática de errores de los comandos
"""

import functools
import logging
from typing import Any, Callable, Dict, Optional

from models.errors import categorize
from tools.error_manager import RunErrorLog


logger = logging.getLogger(__name__)


def capture_command_errors(command: str, error_log: RunErrorLog,
                           context_info: Optional[Dict[str, Any]] = None) -> Callable:
    """
    Decorador que registra cualquier fallo del comando y lo vuelve a lanzar

    Args:
        command: Nombre del comando del CLI
        error_log: Registro del directorio de salida
        context_info: Parámetros de la ejecución guardados con el error

    Returns:
        Decorador que captura errores
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                result = func(*args, **kwargs)
                logger.debug(f"✅ {command} ejecutado exitosamente")
                return result
            except Exception as e:
                try:
                    error_id = error_log.capture_error(e, command, context_info)
                    logger.error(f"❌ {command} falló ({categorize(e).value}): {e} [{error_id}]")
                except Exception as capture_error:
                    logger.error(f"Error en captura: {capture_error}")
                raise

        return wrapper
    return decorator

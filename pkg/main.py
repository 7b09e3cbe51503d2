#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Punto de entrada principal del CLI mmrx
"""

import sys
import logging
from pathlib import Path

# Agregar el directorio del proyecto al path para importaciones
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from cli import MismatchCLI


def main():
    """Función principal"""
    cli = MismatchCLI()
    args = cli.parse_args()

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    logger = logging.getLogger(__name__)
    logger.info(f"Iniciando mmrx {args.command}")

    try:
        code = cli.execute(args)
    except KeyboardInterrupt:
        logger.info("Ejecución detenida por el usuario")
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    main()

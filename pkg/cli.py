# -*- coding: utf-8 -*-
"""
Interfaz de línea de comandos con registro de errores por directorio de salida
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from config.experiment import ExperimentConfig, load_config
from config.settings import NumericConfig
from models.errors import MismatchError, categorize
from models.measurement import PrecisionMode
from tools.error_manager import RunErrorLog
from tools.error_wrapper import capture_command_errors
from tools.experiments import ExperimentTools


logger = logging.getLogger(__name__)


class MismatchCLI:
    """Construye A_recv y reproduce los experimentos desde la terminal"""

    COMMANDS: Dict[str, str] = {
        "gen": "cmd_gen",
        "matched": "cmd_matched",
        "calibrate": "cmd_calibrate",
        "precision-study": "cmd_precision_study",
        "noise-sweep": "cmd_noise_sweep",
        "curves": "cmd_curves",
    }

    HELP = {
        "gen": "Genera A y A_u y las escribe en MMRX",
        "matched": "Solución emparejada (algo1/algo2) y reconstrucción",
        "calibrate": "Calibración con la base ortonormal (algo3) y varias reconstrucciones",
        "precision-study": "Vector λ en precisión simple y doble para los tres algoritmos",
        "noise-sweep": "Barrido de σ × pruebas y estadística del ruido límite",
        "curves": "Familia de curvas (1−x)·xⁱ",
    }

    def __init__(self):
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", type=str, default=None, help="Archivo INI del experimento")
        common.add_argument("--seed", type=int, default=None, help="Semilla u64; reemplaza la del archivo")
        common.add_argument("--precision", choices=[p.value for p in PrecisionMode], default=None)
        common.add_argument("--out", type=str, default=None, help="Directorio de salida")
        common.add_argument("--quiet", action="store_true", help="Solo advertencias y errores")

        parser = argparse.ArgumentParser(
            prog="mmrx",
            description="Matriz de medición recuperada por la ecuación de desajuste",
            epilog="Códigos de salida: 0 éxito, 2 configuración, 3 fallo numérico o no categorizado, 4 E/S",
        )
        parser.add_argument("--version", action="version", version=NumericConfig.TOOL_VERSION)
        sub = parser.add_subparsers(dest="command", required=True)
        for name in self.COMMANDS:
            sub.add_parser(name, parents=[common], help=self.HELP[name])
        return parser

    def parse_args(self, argv: Optional[List[str]] = None) -> argparse.Namespace:
        args = self.parser.parse_args(argv)
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            self.parser.error("--seed debe ser un entero u64")
        return args

    def resolve_config(self, args: argparse.Namespace) -> ExperimentConfig:
        """Archivo INI (o valores por defecto) más las opciones de la línea de comandos"""
        precision = PrecisionMode(args.precision) if args.precision else None
        return load_config(args.config).with_overrides(seed=args.seed, precision=precision, directory=args.out)

    def execute(self, args: argparse.Namespace) -> int:
        """
        Ejecuta un subcomando y devuelve el código de salida

        Returns:
            0 en éxito; 2 configuración, 3 fallo numérico o no categorizado, 4 E/S
        """
        try:
            config = self.resolve_config(args)
        except MismatchError as e:
            print(f"mmrx {args.command}: {e}", file=sys.stderr)
            return categorize(e).exit_code

        tools = ExperimentTools(config)
        context_info = {
            "seed": config.system.seed,
            "precision": config.system.precision.value,
            "solver": config.solver.kind.value,
            "config": args.config,
        }
        command = capture_command_errors(args.command, RunErrorLog(tools.output_dir), context_info)(
            getattr(tools, self.COMMANDS[args.command])
        )
        try:
            summary = command()
        except Exception as e:
            print(f"mmrx {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
            return categorize(e).exit_code

        logger.info(f"✅ {args.command} completado: {len(summary.get('files', []))} archivos en {summary['output_dir']}")
        return 0

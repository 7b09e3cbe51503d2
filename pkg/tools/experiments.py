# -*- coding: utf-8 -*-
"""
Herramientas de experimentos: cada comando produce artefactos deterministas en disco
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.experiment import ExperimentConfig, SolverKind, write_resolved
from config.settings import NumericConfig
from models.errors import ConfigError, DimensionMismatchError
from models.measurement import Image, MeasurementMatrix, MeasurementVector, PrecisionMode
from models.recv import FactoredRecvMatrix
from models.results import (
    CalibrationReport, ErrorTrace, MatchedSolveConfig, NoiseLimitStats, ReconstructConfig, ReconstructReport,
    RecoveryMetrics,
)
from simulation.oracle import (
    RNG_ALGORITHM, STREAM_PM, STREAM_TARGET, MeasurementOracle, SystemSpec, derive_generator, generate_system,
    load_system,
)
from tools.calibration import calibrate
from tools.diagnostics import convergence_factors, curve_family, lambda_vector, match_error, noise_limit_stats, recovery_metrics
from tools.formats import read_pgm, write_csv, write_factored, write_mmrx, write_pgm, write_svg_lines
from tools.images import BuiltinPM, builtin_pm, sparse_target
from tools.matched import error_iteration, matched_solution
from tools.mismatch import default_sigma
from tools.reconstruction import reconstruct


logger = logging.getLogger(__name__)


@dataclass
class TargetResult:
    """Reconstrucción de una imagen objetivo con A_recv"""
    index: int
    target: Image
    measurement: MeasurementVector
    reconstruction: Image
    metrics: RecoveryMetrics
    final_error: float
    report: ReconstructReport


@dataclass
class TrialOutcome:
    """Resultado de una prueba completa: A_recv, contabilidad y reconstrucciones"""
    kind: SolverKind
    sigma: float
    trial: int
    precision: PrecisionMode
    recv: FactoredRecvMatrix
    oracle_calls: int
    results: List[TargetResult] = field(default_factory=list)
    trace: Optional[ErrorTrace] = None
    k_eps: Optional[float] = None
    calibration: Optional[CalibrationReport] = None

    @property
    def primary(self) -> TargetResult:
        return self.results[0]


class ExperimentTools:
    """Comandos del CLI sobre una configuración resuelta"""

    VERSION_FILE = "VERSION"
    RESOLVED_FILE = "resolved_config.ini"

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.output_dir = Path(config.outputs.directory)

    # ---- piezas comunes ----

    def _prepare_output(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        write_resolved(self.config, self.output_dir / self.RESOLVED_FILE,
                       notes=[f"mmrx {NumericConfig.TOOL_VERSION}", f"rng = {RNG_ALGORITHM}"])
        (self.output_dir / self.VERSION_FILE).write_text(f"{NumericConfig.TOOL_VERSION}\n", encoding="utf-8")
        return self.output_dir

    def _precision(self, precision: Optional[PrecisionMode]) -> PrecisionMode:
        return precision if precision is not None else self.config.system.precision

    def _system(self, sigma: float, trial: int,
                precision: Optional[PrecisionMode] = None) -> Tuple[MeasurementMatrix, MeasurementOracle]:
        system = self.config.system
        precision = self._precision(precision)
        if system.matrix_a is not None:
            return load_system(system.matrix_a, system.matrix_au, noise_sigma=sigma,
                               seed=system.seed, precision=precision, trial=trial)
        spec = SystemSpec(M=system.M, N=system.N, seed=system.seed, noise_sigma=sigma, precision=precision)
        return generate_system(spec, trial)

    def _target(self, N: int, trial: int, index: int, precision: PrecisionMode) -> Image:
        generator = derive_generator(self.config.system.seed, trial, STREAM_TARGET, index)
        return sparse_target(N, min(self.config.solver.sparsity, N), generator, precision)

    def _pm_image(self, target: Image, trial: int, precision: PrecisionMode) -> Image:
        solver = self.config.solver
        name = solver.pm_image
        if name == BuiltinPM.TARGET.value:
            return target
        if name in {kind.value for kind in BuiltinPM}:
            generator = derive_generator(self.config.system.seed, trial, STREAM_PM)
            return builtin_pm(name, target.N, generator, level=solver.pm_level,
                              sparsity=solver.sparsity, precision=precision)
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"pm_image no es una imagen integrada ni un archivo PGM: {name}")
        pm = read_pgm(path, precision)
        if pm.N != target.N:
            raise DimensionMismatchError("La imagen de pre-medición no coincide con N", (pm.N,), (target.N,))
        return pm

    def _reconstruct_config(self) -> ReconstructConfig:
        section = self.config.reconstruct
        return ReconstructConfig(
            lambda_reg=section.lambda_reg,
            max_iters=section.max_iters,
            step_rule=section.step_rule,
            conv_tol=section.conv_tol,
            nonneg=section.nonneg,
            debias=section.debias,
        )

    def _evaluate(self, index: int, target: Image, y: MeasurementVector, recv: FactoredRecvMatrix) -> TargetResult:
        reconstruction, report = reconstruct(y, recv, self._reconstruct_config(), shape=target.shape)
        metrics = recovery_metrics(reconstruction, target, self.config.reconstruct.success_tol)
        return TargetResult(
            index=index,
            target=target,
            measurement=y,
            reconstruction=reconstruction,
            metrics=metrics,
            final_error=match_error(y, recv, target),
            report=report,
        )

    # ---- pruebas ----

    def run_matched_trial(self, sigma: float, trial: int, kind: Optional[SolverKind] = None,
                          precision: Optional[PrecisionMode] = None) -> TrialOutcome:
        """
        Una prueba de solución emparejada (algo1 o algo2) sobre un objetivo disperso

        Args:
            sigma: Ruido del oráculo
            trial: Índice de la prueba; deriva A, A_u, ruido y objetivo
            kind: Algoritmo; por defecto el de la configuración
            precision: Precisión; por defecto la de la configuración
        """
        kind = kind or self.config.solver.kind
        if kind is SolverKind.ALGO3:
            raise ConfigError("La solución emparejada admite algo1 o algo2; algo3 usa la calibración")
        precision = self._precision(precision)
        solver = self.config.solver

        A, oracle = self._system(sigma, trial, precision)
        target = self._target(A.N, trial, 0, precision)
        y = oracle.pin_target(target)
        pm = self._pm_image(target, trial, precision)
        cfg = MatchedSolveConfig(
            pm_image=pm,
            epochs=solver.epochs,
            stop_tol=solver.stop_tol,
            divergence_factor=solver.divergence_factor,
            warm_start=solver.warm_start,
        )

        Sigma = default_sigma(A)
        run = error_iteration if kind is SolverKind.ALGO1 else matched_solution
        recv, trace = run(oracle, y, A, cfg, Sigma)
        k_eps, _ = convergence_factors(A, pm, target, Sigma)

        outcome = TrialOutcome(
            kind=kind,
            sigma=sigma,
            trial=trial,
            precision=precision,
            recv=recv,
            oracle_calls=oracle.call_count,
            trace=trace,
            k_eps=k_eps,
        )
        outcome.results.append(self._evaluate(0, target, y, recv))
        return outcome

    def run_calibration_trial(self, sigma: float, trial: int, precision: Optional[PrecisionMode] = None,
                              count: Optional[int] = None) -> TrialOutcome:
        """Una calibración y la reconstrucción de `count` objetivos con la misma A_recv"""
        precision = self._precision(precision)
        count = count if count is not None else self.config.solver.targets

        A, oracle = self._system(sigma, trial, precision)
        targets = [self._target(A.N, trial, index, precision) for index in range(count)]
        substitutes = targets if self.config.solver.substitute_targets else []
        recv, report = calibrate(oracle, A, substitutes)

        outcome = TrialOutcome(
            kind=SolverKind.ALGO3,
            sigma=sigma,
            trial=trial,
            precision=precision,
            recv=recv,
            oracle_calls=report.oracle_calls,
            calibration=report,
        )
        for index, target in enumerate(targets):
            y = oracle.pin_target(target)
            outcome.results.append(self._evaluate(index, target, y, recv))
        return outcome

    def _run_trial(self, sigma: float, trial: int) -> TrialOutcome:
        if self.config.solver.kind is SolverKind.ALGO3:
            return self.run_calibration_trial(sigma, trial)
        return self.run_matched_trial(sigma, trial)

    # ---- comandos ----

    def cmd_gen(self) -> Dict[str, Any]:
        """Escribe A.mmrx y A_u.mmrx de la prueba 0"""
        out = self._prepare_output()
        A, oracle = self._system(self.config.system.noise_sigma, 0)
        files = [
            write_mmrx(out / "A.mmrx", A),
            write_mmrx(out / "A_u.mmrx", oracle.reveal_hidden_matrix()),
        ]
        logger.info(f"✅ Sistema escrito en {out} (M={A.M}, N={A.N}, {A.precision.value})")
        return {"output_dir": str(out), "M": A.M, "N": A.N, "files": [str(f) for f in files]}

    def cmd_matched(self) -> Dict[str, Any]:
        """
        Solución emparejada sin ruido salvo el de [system]

        Returns:
            Resumen con error final, k_ε, llamadas al oráculo y métricas
        """
        out = self._prepare_output()
        outcome = self.run_matched_trial(self.config.system.noise_sigma, 0)
        precision = outcome.precision
        result = outcome.primary
        trace = outcome.trace

        files = [write_csv(
            out / "trace.csv",
            ["iteration", "error_2", "error_inf", "oracle_calls"],
            [(r.iteration, r.error_2, r.error_inf, r.oracle_calls) for r in trace.records],
            precision,
        )]
        files.append(write_csv(
            out / "summary.csv",
            ["solver", "precision", "sigma", "iterations", "oracle_calls", "k_eps", "convergence_factor",
             "final_error", "psnr", "support_f1", "relative_error", "success", "lambda_reg", "solver_iterations",
             "converged"],
            [(outcome.kind.value, precision.value, outcome.sigma, len(trace), outcome.oracle_calls, outcome.k_eps,
              trace.convergence_factor, result.final_error, *result.metrics.as_row(), result.report.lambda_reg,
              result.report.iterations, int(result.report.converged))],
            precision,
        ))
        files.extend(write_factored(out / "recv", outcome.recv))
        files.append(write_pgm(out / "target.pgm", result.target))
        files.append(write_pgm(out / "reconstruction.pgm", result.reconstruction))
        if self.config.outputs.emit_svg:
            files.append(write_svg_lines(
                out / "trace.svg",
                {"error_2": ([r.iteration for r in trace.records], trace.errors_2.tolist())},
                title=f"Error de {outcome.kind.value}",
                log_y=True,
            ))

        if not result.metrics.success:
            logger.warning(f"⚠️ Reconstrucción fallida: F1={result.metrics.support_f1:.3f}, "
                           f"error relativo {result.metrics.relative_error:.3e}")
        return {
            "output_dir": str(out),
            "iterations": len(trace),
            "final_error": result.final_error,
            "k_eps": outcome.k_eps,
            "oracle_calls": outcome.oracle_calls,
            "psnr": result.metrics.psnr,
            "support_f1": result.metrics.support_f1,
            "success": result.metrics.success,
            "files": [str(f) for f in files],
        }

    def cmd_calibrate(self) -> Dict[str, Any]:
        """Una calibración y varias reconstrucciones con la misma A_recv"""
        out = self._prepare_output()
        outcome = self.run_calibration_trial(self.config.system.noise_sigma, 0)
        precision = outcome.precision

        files = [write_csv(out / "calibration.csv", ["key", "value"],
                           outcome.calibration.as_dict().items(), precision)]
        files.extend(write_factored(out / "recv", outcome.recv))
        files.append(write_csv(
            out / "targets.csv",
            ["target", "final_error", "psnr", "support_f1", "relative_error", "success"],
            [(r.index, r.final_error, *r.metrics.as_row()) for r in outcome.results],
            precision,
        ))
        for result in outcome.results:
            files.append(write_pgm(out / f"target_{result.index}.pgm", result.target))
            files.append(write_pgm(out / f"reconstruction_{result.index}.pgm", result.reconstruction))

        succeeded = sum(r.metrics.success for r in outcome.results)
        logger.info(f"✅ Calibración: {succeeded}/{len(outcome.results)} reconstrucciones exitosas")
        return {
            "output_dir": str(out),
            "oracle_calls": outcome.oracle_calls,
            "succeeded": succeeded,
            "targets": len(outcome.results),
            "report": outcome.calibration.as_dict(),
            "files": [str(f) for f in files],
        }

    def cmd_precision_study(self) -> Dict[str, Any]:
        """
        λ para algo1, algo2 y algo3 en precisión simple y doble sobre el mismo par (x, x′)
        """
        out = self._prepare_output()
        sigma = self.config.system.noise_sigma
        files: List[Path] = []
        verdicts = []

        for precision in (PrecisionMode.SINGLE, PrecisionMode.DOUBLE):
            for kind in (SolverKind.ALGO1, SolverKind.ALGO2, SolverKind.ALGO3):
                if kind is SolverKind.ALGO3:
                    outcome = self.run_calibration_trial(sigma, 0, precision, count=2)
                    x = outcome.results[0].target
                    x_prime = outcome.results[1].target
                else:
                    outcome = self.run_matched_trial(sigma, 0, kind, precision)
                    x = outcome.primary.target
                    x_prime = self._target(x.N, 0, 1, precision)
                report = lambda_vector(outcome.recv, x, x_prime)
                files.append(write_csv(
                    out / f"lambda_{kind.value}_{precision.value}.csv",
                    ["component", "lambda"],
                    enumerate(report.lambda_.tolist()),
                    precision,
                ))
                metrics = outcome.primary.metrics
                verdicts.append((kind.value, precision.value, report.coefficient_of_variation, report.verdict.value,
                                 report.excluded_count, int(metrics.success), metrics.support_f1,
                                 metrics.relative_error))
                logger.info(f"λ {kind.value}/{precision.value}: CV={report.coefficient_of_variation:.3e} "
                            f"({report.verdict.value})")

        files.append(write_csv(
            out / "verdicts.csv",
            ["algorithm", "precision", "cv", "verdict", "excluded", "success", "support_f1", "relative_error"],
            verdicts,
        ))
        return {"output_dir": str(out), "verdicts": verdicts, "files": [str(f) for f in files]}

    def _sweep_row(self, sigma: float, trial: int) -> Tuple[float, int, float, float, float]:
        result = self._run_trial(sigma, trial).primary
        return sigma, trial, result.final_error, result.metrics.psnr, result.metrics.support_f1

    def cmd_noise_sweep(self) -> Dict[str, Any]:
        """Barrido de σ × pruebas con el solver configurado y estadística del ruido límite"""
        out = self._prepare_output()
        sweep = self.config.sweep
        precision = self.config.system.precision
        tasks = [(sigma, trial) for sigma in sweep.sigmas for trial in range(sweep.trials)]
        workers = max(1, min(NumericConfig.max_threads(), len(tasks)))
        logger.info(f"🔁 Barrido de ruido: {len(sweep.sigmas)} niveles × {sweep.trials} pruebas, {workers} hilos")

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda task: self._sweep_row(*task), tasks))

        files = [write_csv(out / "sweep.csv", ["sigma", "trial", "final_error", "psnr", "support_f1"], rows,
                           precision)]

        summary = []
        for sigma in sweep.sigmas:
            block = np.array([row[2:] for row in rows if row[0] == sigma], dtype=np.float64)
            errors = block[:, 0]
            spread = float(np.std(errors, ddof=1) / np.sqrt(errors.size)) if errors.size > 1 else 0.0
            summary.append((sigma, errors.size, float(np.mean(errors)), spread, float(np.mean(block[:, 1])),
                            float(np.mean(block[:, 2])), float(np.mean(block[:, 2] == 1.0))))
        files.append(write_csv(
            out / "summary.csv",
            ["sigma", "trials", "mean_final_error", "se_final_error", "mean_psnr", "mean_support_f1",
             "support_exact_rate"],
            summary,
        ))

        limits = [
            noise_limit_stats(k, sweep.limit_sigma, trials=sweep.limit_trials, burn_in=sweep.burn_in,
                              seed=self.config.system.seed)
            for k in sweep.k_eps_values
        ]
        columns = [f.name for f in fields(NoiseLimitStats)]
        files.append(write_csv(out / "noise_limit.csv", columns,
                               [[stats.as_dict()[c] for c in columns] for stats in limits]))

        if self.config.outputs.emit_svg:
            files.append(write_svg_lines(
                out / "sweep.svg",
                {"mean_final_error": ([s[0] for s in summary], [s[2] for s in summary])},
                title="Error final medio frente a σ",
                log_y=True,
            ))
        return {
            "output_dir": str(out),
            "rows": len(rows),
            "summary": summary,
            "files": [str(f) for f in files],
        }

    def cmd_curves(self) -> Dict[str, Any]:
        """Tabla (i, x, (1−x)·xⁱ) y gráfica opcional"""
        out = self._prepare_output()
        curves = self.config.curves
        grid = np.linspace(curves.x_min, curves.x_max, curves.points)
        points = curve_family(curves.i_values, grid)
        files = [write_csv(out / "curves.csv", ["i", "x", "value"], [(p.i, p.x, p.value) for p in points])]

        if self.config.outputs.emit_svg:
            series: Dict[str, Tuple[List[float], List[float]]] = {}
            for p in points:
                xs, values = series.setdefault(f"i={p.i}", ([], []))
                xs.append(p.x)
                values.append(p.value)
            files.append(write_svg_lines(out / "curves.svg", series, title="(1−x)·xⁱ"))
        return {"output_dir": str(out), "rows": len(points), "files": [str(f) for f in files]}

# -*- coding: utf-8 -*-
"""Configuración INI del experimento y política numérica"""

import pytest

from config.experiment import ExperimentConfig, SolverKind, load_config, write_resolved
from config.settings import NumericConfig
from models.errors import ConfigError
from models.measurement import PrecisionMode
from models.results import StepRule


class TestDefaults:

    def test_defaults_without_file(self):
        config = load_config()
        assert config.system.M < config.system.N
        assert config.solver.kind is SolverKind.ALGO2
        assert config.reconstruct.lambda_reg is None
        assert config.sweep.sigmas == list(NumericConfig.DEFAULT_SIGMAS)

    def test_numeric_policy_is_per_precision(self):
        for table in (NumericConfig.DENOM_TOL, NumericConfig.RANK_TOL, NumericConfig.INVERSE_TOL,
                      NumericConfig.COND_BOUND, NumericConfig.ZERO_TOL, NumericConfig.CSV_DIGITS):
            assert set(table) == set(PrecisionMode)
        assert NumericConfig.CSV_DIGITS[PrecisionMode.DOUBLE] == 17
        assert NumericConfig.CSV_DIGITS[PrecisionMode.SINGLE] == 9

    def test_thread_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv(NumericConfig.THREADS_ENV, "3")
        assert NumericConfig.max_threads() == 3
        monkeypatch.setenv(NumericConfig.THREADS_ENV, "0")
        assert NumericConfig.max_threads() == 1
        monkeypatch.setenv(NumericConfig.THREADS_ENV, "muchos")
        assert NumericConfig.max_threads() >= 1


class TestLoadConfig:

    def test_reads_every_section(self, write_ini):
        path = write_ini({
            "system": {"M": 8, "N": 32, "seed": 9, "noise_sigma": 0.5, "precision": "single"},
            "solver": {"kind": "algo1", "epochs": 5, "pm_image": "random", "warm_start": "true"},
            "reconstruct": {"lambda_reg": "auto", "max_iters": 100, "step_rule": "fixed", "nonneg": "false"},
            "outputs": {"directory": "salida", "emit_svg": "yes"},
            "sweep": {"sigmas": "0, 0.5, 2", "trials": 4, "k_eps_values": "0.1,0.2"},
            "curves": {"i_values": "0, 3", "points": 5},
        })
        config = load_config(path)
        assert (config.system.M, config.system.N, config.system.seed) == (8, 32, 9)
        assert config.system.precision is PrecisionMode.SINGLE
        assert config.solver.kind is SolverKind.ALGO1
        assert config.solver.warm_start is True
        assert config.reconstruct.lambda_reg is None
        assert config.reconstruct.step_rule is StepRule.FIXED
        assert config.reconstruct.nonneg is False
        assert config.outputs.emit_svg is True
        assert config.sweep.sigmas == [0.0, 0.5, 2.0]
        assert config.sweep.k_eps_values == [0.1, 0.2]
        assert config.curves.i_values == [0, 3]

    @pytest.mark.parametrize("sections", [
        {"system": {"M": 8, "N": 32, "colour": "blue"}},
        {"plots": {"dpi": 300}},
        {"system": {"M": 32, "N": 32}},
        {"system": {"M": 8, "N": 32, "matrix_a": "A.mmrx"}},
        {"solver": {"kind": "algo9"}},
        {"sweep": {"sigmas": "0, -1"}},
        {"sweep": {"k_eps_values": "1.0"}},
        {"curves": {"x_min": 0.5, "x_max": 0.1}},
        {"reconstruct": {"lambda_reg": "-1"}},
    ])
    def test_invalid_documents(self, write_ini, sections):
        with pytest.raises(ConfigError):
            load_config(write_ini(sections))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nada.ini")

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "roto.ini"
        path.write_text("sin seccion = 1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)


class TestOverridesAndResolvedCopy:

    def test_overrides(self):
        config = ExperimentConfig().with_overrides(seed=123, precision=PrecisionMode.SINGLE, directory="otra")
        assert config.system.seed == 123
        assert config.system.precision is PrecisionMode.SINGLE
        assert config.outputs.directory == "otra"

    def test_override_keeps_validation(self):
        with pytest.raises(ConfigError):
            ExperimentConfig().with_overrides(seed=-1)

    def test_resolved_copy_reloads_identically(self, tmp_path, write_ini):
        original = load_config(write_ini({
            "system": {"M": 8, "N": 32, "seed": 4},
            "sweep": {"sigmas": "0, 1.5"},
            "reconstruct": {"lambda_reg": 0.01},
        }))
        path = write_resolved(original, tmp_path / "resolved_config.ini")
        reloaded = load_config(path)
        assert reloaded.model_dump() == original.model_dump()

    def test_resolved_copy_is_deterministic(self, tmp_path):
        first = write_resolved(ExperimentConfig(), tmp_path / "a.ini").read_bytes()
        second = write_resolved(ExperimentConfig(), tmp_path / "b.ini").read_bytes()
        assert first == second
        assert b"matrix_a" not in first
        assert b"lambda_reg = auto" in first

    def test_notes_are_comments_and_reload(self, tmp_path):
        path = write_resolved(ExperimentConfig(), tmp_path / "notes.ini", notes=["rng = Philox", "mmrx 0.1.0"])
        assert path.read_text(encoding="utf-8").startswith("# rng = Philox\n# mmrx 0.1.0\n[system]")
        assert load_config(path).model_dump() == ExperimentConfig().model_dump()

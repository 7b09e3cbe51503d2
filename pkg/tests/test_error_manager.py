# -*- coding: utf-8 -*-
"""Registro de errores por directorio de salida"""

import json

import numpy as np
import pytest

from models.errors import (
    ConfigError, DivergenceError, ErrorCategory, ErrorSeverity, FormatError, IllConditionedError, categorize,
)
from tools.error_manager import RunErrorLog
from tools.error_wrapper import capture_command_errors


class TestCategories:

    @pytest.mark.parametrize("error, category, exit_code", [
        (ConfigError("x"), ErrorCategory.CONFIG, 2),
        (DivergenceError("x"), ErrorCategory.DIVERGENCE, 3),
        (IllConditionedError("x", 1e9), ErrorCategory.CONDITIONING, 3),
        (FormatError("x"), ErrorCategory.IO, 4),
        (FileNotFoundError("x"), ErrorCategory.IO, 4),
        (RuntimeError("x"), ErrorCategory.UNKNOWN, 3),
        (np.linalg.LinAlgError("x"), ErrorCategory.UNKNOWN, 3),
    ])
    def test_exit_codes(self, error, category, exit_code):
        assert categorize(error) is category
        assert category.exit_code == exit_code


class TestRunErrorLog:

    def test_capture_writes_json(self, tmp_path):
        log = RunErrorLog(tmp_path)
        error_id = log.capture_error(ConfigError("clave desconocida"), "gen", {"seed": 1})
        data = json.loads((tmp_path / "errors.json").read_text(encoding="utf-8"))
        entry = data[error_id]
        assert entry["category"] == "config"
        assert entry["severity"] == ErrorSeverity.MEDIUM.value
        assert entry["exit_code"] == 2
        assert entry["command"] == "gen"
        assert entry["context_info"] == {"seed": 1}
        assert entry["hints"]

    def test_repeats_increment_frequency_across_instances(self, tmp_path):
        first_id = RunErrorLog(tmp_path).capture_error(DivergenceError("crece"), "matched")
        second_log = RunErrorLog(tmp_path)
        second_id = second_log.capture_error(DivergenceError("crece"), "matched")
        assert first_id == second_id
        assert second_log.error_patterns[first_id].frequency == 2
        assert json.loads((tmp_path / RunErrorLog.FILE_NAME).read_text(encoding="utf-8"))[first_id]["frequency"] == 2

    def test_different_commands_are_different_patterns(self, tmp_path):
        log = RunErrorLog(tmp_path)
        assert log.capture_error(ConfigError("x"), "gen") != log.capture_error(ConfigError("x"), "curves")

    def test_corrupt_log_is_ignored(self, tmp_path):
        (tmp_path / "errors.json").write_text("{no es json", encoding="utf-8")
        assert RunErrorLog(tmp_path).error_patterns == {}


class TestCaptureDecorator:

    def test_records_and_reraises(self, tmp_path):
        log = RunErrorLog(tmp_path)

        @capture_command_errors("calibrate", log, {"solver": "algo3"})
        def failing():
            raise IllConditionedError("cond alto", 1e9)

        with pytest.raises(IllConditionedError):
            failing()
        (pattern,) = log.error_patterns.values()
        assert pattern.category is ErrorCategory.CONDITIONING
        assert pattern.command == "calibrate"

    def test_success_passes_result_through(self, tmp_path):
        log = RunErrorLog(tmp_path)
        assert capture_command_errors("curves", log)(lambda: {"rows": 3})() == {"rows": 3}
        assert not (tmp_path / "errors.json").exists()

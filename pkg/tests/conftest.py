# -*- coding: utf-8 -*-
"""
Fixtures compartidas: sistemas pequeños, imágenes dispersas y archivos INI
"""

from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from models.measurement import Image, PrecisionMode
from simulation.oracle import STREAM_TARGET, SystemSpec, derive_generator, generate_system
from tools.images import sparse_target


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def small_system():
    """(A, oracle) de 16×64 sin ruido"""
    return generate_system(SystemSpec(M=16, N=64, seed=11))


@pytest.fixture
def make_system() -> Callable[..., tuple]:
    def factory(M: int = 16, N: int = 64, seed: int = 11, noise_sigma: float = 0.0,
                precision: PrecisionMode = PrecisionMode.DOUBLE, trial: int = 0):
        return generate_system(SystemSpec(M=M, N=N, seed=seed, noise_sigma=noise_sigma, precision=precision), trial)
    return factory


@pytest.fixture
def make_target() -> Callable[..., Image]:
    def factory(N: int = 64, sparsity: int = 4, seed: int = 5, index: int = 0,
                precision: PrecisionMode = PrecisionMode.DOUBLE) -> Image:
        return sparse_target(N, sparsity, derive_generator(seed, 0, STREAM_TARGET, index), precision)
    return factory


@pytest.fixture
def write_ini(tmp_path: Path) -> Callable[[Dict[str, Dict[str, Any]]], Path]:
    """Escribe un INI de experimento en tmp_path y devuelve su ruta"""
    def writer(sections: Dict[str, Dict[str, Any]], name: str = "experiment.ini") -> Path:
        lines = []
        for section, values in sections.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in values.items())
            lines.append("")
        path = tmp_path / name
        path.write_text("\n".join(lines), encoding="utf-8")
        return path
    return writer

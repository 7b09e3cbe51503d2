# -*- coding: utf-8 -*-
"""
Matriz construida A_recv almacenada como suma de términos de rango 1
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Protocol, Tuple

import numpy as np

from models.errors import DimensionMismatchError, DomainError
from models.measurement import PrecisionMode


class LinearMeasurement(Protocol):
    """Operador lineal M×N con aplicación directa y adjunta"""

    @property
    def M(self) -> int: ...

    @property
    def N(self) -> int: ...

    @property
    def precision(self) -> PrecisionMode: ...

    def apply(self, x: np.ndarray) -> np.ndarray: ...

    def adjoint(self, u: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class MismatchTerm:
    """
    Término scale·left·rightᵀ de la ecuación de desajuste.

    `right` es Aᵀ Σᵀ y0, es decir la fila y0ᵀΣA guardada como columna.
    """
    scale: np.floating
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.scale) or self.scale == 0:
            raise DomainError("La escala del término debe ser finita y no nula")
        if self.left.dtype != self.right.dtype:
            raise DomainError("left y right deben compartir dtype")

    @property
    def M(self) -> int:
        return self.left.size

    @property
    def N(self) -> int:
        return self.right.size

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.left * (self.scale * (self.right @ x))

    def materialize(self) -> np.ndarray:
        return self.scale * np.outer(self.left, self.right)


@dataclass(frozen=True, eq=False)
class FactoredRecvMatrix:
    """A_recv = Σ_t scale_t · left_t · right_tᵀ, nunca materializada salvo a pedido"""
    terms: Tuple[MismatchTerm, ...]
    M: int
    N: int
    precision: PrecisionMode = PrecisionMode.DOUBLE

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.M != self.M or term.N != self.N:
                raise DimensionMismatchError("Término incompatible con A_recv", (term.M, term.N), (self.M, self.N))
            if term.left.dtype != self.precision.dtype:
                raise DomainError("Término con precisión distinta a la de A_recv")

    @classmethod
    def empty(cls, M: int, N: int, precision: PrecisionMode = PrecisionMode.DOUBLE) -> "FactoredRecvMatrix":
        return cls((), M, N, precision)

    def extend(self, *terms: MismatchTerm) -> "FactoredRecvMatrix":
        return FactoredRecvMatrix(self.terms + tuple(terms), self.M, self.N, self.precision)

    def truncated(self, count: int) -> "FactoredRecvMatrix":
        return FactoredRecvMatrix(self.terms[:count], self.M, self.N, self.precision)

    @property
    def rank_terms(self) -> int:
        return len(self.terms)

    @cached_property
    def _lefts(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((self.M, 0), dtype=self.precision.dtype)
        return np.stack([t.left for t in self.terms], axis=1)

    @cached_property
    def _rights(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((self.N, 0), dtype=self.precision.dtype)
        return np.stack([t.right for t in self.terms], axis=1)

    @cached_property
    def _scales(self) -> np.ndarray:
        return np.array([t.scale for t in self.terms], dtype=self.precision.dtype)

    @cached_property
    def _scaled_rights(self) -> np.ndarray:
        return self._rights * self._scales

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[0] != self.N:
            raise DimensionMismatchError("Imagen incompatible con A_recv", (self.M, self.N), x.shape)
        return self._lefts @ (self._scaled_rights.T @ x.astype(self.precision.dtype, copy=False))

    def adjoint(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.shape[0] != self.M:
            raise DimensionMismatchError("Medición incompatible con A_recvᵀ", (self.N, self.M), u.shape)
        return self._scaled_rights @ (self._lefts.T @ u.astype(self.precision.dtype, copy=False))

    def materialize(self) -> np.ndarray:
        """Matriz densa M×N; solo para pruebas e instancias pequeñas"""
        return self._lefts @ self._scaled_rights.T

    def distinct_right_count(self) -> int:
        """Número de vectores `right` distintos (1 para soluciones emparejadas)"""
        distinct: list = []
        for term in self.terms:
            if not any(term.right is r or np.array_equal(term.right, r) for r in distinct):
                distinct.append(term.right)
        return len(distinct)

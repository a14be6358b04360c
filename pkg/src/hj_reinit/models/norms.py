"""Normen auf R^n mit exakt berechenbarer Dualnorm.

Unterstuetzt werden nur Familien mit geschlossener Dualform: p-Normen
(1 <= p <= inf) und ellipsoidale Normen ||v|| = sqrt(v^T A v). Die Dualnorm
ist die Grundwahrheit fuer den Grenzwert der Reinitialisierung, sie wird
deshalb nie numerisch angenaehert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError

# p = inf ist ein eigener Wert, keine grosse Gleitkommazahl.
P_INF = math.inf


class NormKind(Enum):
    """Normfamilie."""

    P = "p"
    ELLIPSOIDAL = "ellipsoidal"


@dataclass(frozen=True)
class NormSpec:
    """Eine Norm auf R^1 oder R^2.

    Attributes:
        kind:
            Familie (p-Norm oder ellipsoidal).
        p:
            Exponent der p-Norm (``P_INF`` fuer die Maximumsnorm).
        matrix:
            Symmetrische, positiv definite Matrix der ellipsoidalen Norm
            (Zeilen als Tupel).
        dim:
            Raumdimension (1 oder 2).
    """

    kind: NormKind
    p: float = 2.0
    matrix: tuple[tuple[float, ...], ...] = field(default_factory=tuple)
    dim: int = 2

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError("norm_dimension", dim=self.dim)
        if self.kind is NormKind.P:
            if not self.p >= 1.0:
                raise ConfigError("norm_p_range", p=self.p)
            return
        matrix = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", matrix)
        arr = np.asarray(matrix, dtype=np.float64)
        if arr.shape != (self.dim, self.dim):
            raise ConfigError("norm_matrix_shape", shape=list(arr.shape), dim=self.dim)
        if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-14):
            raise ConfigError("norm_matrix_symmetric")
        if np.min(np.linalg.eigvalsh(arr)) <= 0.0:
            raise ConfigError("norm_matrix_definite")

    # -- Konstruktoren -------------------------------------------------------

    @classmethod
    def p_norm(cls, p: float, dim: int = 2) -> NormSpec:
        return cls(kind=NormKind.P, p=float(p), dim=dim)

    @classmethod
    def euclidean(cls, dim: int = 2) -> NormSpec:
        return cls.p_norm(2.0, dim)

    @classmethod
    def ellipsoidal(cls, matrix: np.ndarray | list[list[float]]) -> NormSpec:
        arr = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        return cls(kind=NormKind.ELLIPSOIDAL, matrix=tuple(tuple(row) for row in arr), dim=arr.shape[0])

    @classmethod
    def from_dict(cls, data: dict, dim: int = 2) -> NormSpec:
        """Liest ``{"type": "p", "p": 2}`` bzw. ``{"type": "ellipsoidal", "a": [[...]]}``.

        ``"p": "inf"`` steht fuer die Maximumsnorm.
        """
        if not isinstance(data, dict):
            raise ConfigError("norm_format", value=repr(data))
        kind = data.get("type")
        if kind == "p":
            unknown = set(data) - {"type", "p"}
            if unknown:
                raise ConfigError("unknown_key", key=f"norm.{sorted(unknown)[0]}")
            raw = data.get("p", 2)
            p = P_INF if raw in ("inf", "infinity", math.inf) else raw
            if not isinstance(p, (int, float)) or isinstance(p, bool):
                raise ConfigError("norm_p_range", p=raw)
            return cls.p_norm(float(p), dim)
        if kind == "ellipsoidal":
            unknown = set(data) - {"type", "a"}
            if unknown:
                raise ConfigError("unknown_key", key=f"norm.{sorted(unknown)[0]}")
            spec = cls.ellipsoidal(data.get("a", []))
            if spec.dim != dim:
                raise ConfigError("dimension_mismatch", field=dim, norm=spec.dim)
            return spec
        raise ConfigError("norm_type", value=repr(kind))

    def to_dict(self) -> dict:
        if self.kind is NormKind.P:
            return {"type": "p", "p": "inf" if math.isinf(self.p) else self.p}
        return {"type": "ellipsoidal", "a": [list(row) for row in self.matrix]}

    # -- Auswertung ----------------------------------------------------------

    @property
    def label(self) -> str:
        if self.kind is NormKind.P:
            return "l_inf" if math.isinf(self.p) else f"l_{self.p:g}"
        return "ellipsoidal(" + ";".join(",".join(f"{v:g}" for v in row) for row in self.matrix) + ")"

    @property
    def matrix_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=np.float64)

    def evaluate(self, vectors: np.ndarray) -> np.ndarray:
        """Norm vieler Vektoren; ``vectors`` hat die Form (..., dim)."""
        v = np.asarray(vectors, dtype=np.float64)
        if v.shape[-1] != self.dim:
            raise ConfigError("dimension_mismatch", field=v.shape[-1], norm=self.dim)
        if self.kind is NormKind.ELLIPSOIDAL:
            quad = np.einsum("...i,ij,...j->...", v, self.matrix_array, v)
            return np.sqrt(np.maximum(quad, 0.0))
        if math.isinf(self.p):
            return np.max(np.abs(v), axis=-1)
        if self.p == 1.0:
            return np.sum(np.abs(v), axis=-1)
        if self.p == 2.0:
            return np.sqrt(np.sum(v * v, axis=-1))
        return np.linalg.norm(v, ord=self.p, axis=-1)

    def is_axis_separable(self) -> bool:
        """Gilt die achsweise Godunov-Aufwindung (p in {1, 2, inf} oder diagonales A)?"""
        if self.kind is NormKind.P:
            return self.p in (1.0, 2.0) or math.isinf(self.p)
        arr = self.matrix_array
        return bool(np.all(arr[~np.eye(self.dim, dtype=bool)] == 0.0))

    def axis_norms(self) -> np.ndarray:
        """||e_a|| pro Achse."""
        return self.evaluate(np.eye(self.dim))

    def equivalence_to_euclidean(self) -> tuple[float, float]:
        """Konstanten (c, C) mit c*||v||_2 <= ||v|| <= C*||v||_2."""
        if self.kind is NormKind.ELLIPSOIDAL:
            eig = np.linalg.eigvalsh(self.matrix_array)
            return float(np.sqrt(eig[0])), float(np.sqrt(eig[-1]))
        # Fuer q >= 2 ist n^(1/q - 1/2) <= ||v||_q/||v||_2 <= 1, fuer q <= 2 umgekehrt.
        factor = self.dim ** (abs(0.5 - (0.0 if math.isinf(self.p) else 1.0 / self.p)))
        if self.p >= 2.0:
            return 1.0 / factor, 1.0
        return 1.0, factor


def norm_eval(spec: NormSpec, vector: np.ndarray | list[float] | tuple[float, ...]) -> float:
    """Wert der Norm fuer einen einzelnen Vektor."""
    return float(spec.evaluate(np.asarray(vector, dtype=np.float64)))


def conjugate_exponent(p: float) -> float:
    """Hoelder-Konjugierte q mit 1/p + 1/q = 1."""
    if p == 1.0:
        return P_INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def dual_of(spec: NormSpec) -> NormSpec:
    """Dualnorm: p -> q (Hoelder), A -> A^{-1}."""
    if spec.kind is NormKind.P:
        return NormSpec.p_norm(conjugate_exponent(spec.p), spec.dim)
    inverse = np.linalg.inv(spec.matrix_array)
    # inv() liefert bis auf Rundung symmetrisch; exakt symmetrisieren.
    return NormSpec.ellipsoidal(0.5 * (inverse + inverse.T))

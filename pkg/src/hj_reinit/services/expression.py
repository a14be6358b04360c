"""Kleine, geschlossene Ausdruckssprache fuer die Anfangsdaten u0.

Erlaubt sind ``+ - * / ^`` (``^`` = Potenz, rechtsassoziativ), Klammern,
unaeres Minus, die Funktionen ``sin cos exp sqrt``, Zahlen, die Konstanten
``pi`` und ``e`` sowie die Variablen ``x`` (1D) bzw. ``x, y`` (2D).

Geparst wird mit dem Python-``ast``-Modul; ausgewertet wird ausschliesslich
ueber eine Whitelist der Knotentypen, es gibt also kein ``eval``. Der
Ausdruck bleibt als Quelltext erhalten, damit Verfeinerungsstudien dieselbe
analytische Funktion auf jedem Gitter neu abtasten koennen.
"""

from __future__ import annotations

import ast
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from ..models.errors import ConfigError

_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINARY: dict[type, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

_VARIABLES = ("x", "y")


@dataclass(frozen=True)
class Expression:
    """Geparster u0-Ausdruck, aufrufbar mit Koordinatenarrays.

    Attributes:
        source:
            Der Quelltext, wie er in der Konfiguration steht.
        dim:
            Anzahl der Variablen (1: nur ``x``, 2: ``x`` und ``y``).
    """

    source: str
    dim: int = 2
    _tree: ast.Expression = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_tree", parse_expression(self.source, self.dim))

    def __call__(self, *coords: np.ndarray) -> np.ndarray:
        if len(coords) != self.dim:
            raise ConfigError("expression_arity", expected=self.dim, actual=len(coords))
        env = dict(zip(_VARIABLES, (np.asarray(c, dtype=np.float64) for c in coords), strict=False))
        with np.errstate(all="ignore"):
            return np.asarray(_evaluate(self._tree.body, env), dtype=np.float64)


def parse_expression(source: str, dim: int = 2) -> ast.Expression:
    """Parst und prueft einen Ausdruck gegen die Grammatik.

    Raises:
        ConfigError: Bei Syntaxfehlern oder nicht erlaubten Konstrukten.
    """
    if not isinstance(source, str) or not source.strip():
        raise ConfigError("expression_empty")
    # '^' ist in Python XOR mit falscher Prioritaet - vor dem Parsen umschreiben.
    text = source.replace("**", "\x00").replace("^", "**").replace("\x00", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError("expression_syntax", expression=source, column=exc.offset or 0) from exc
    allowed_names = set(_VARIABLES[:dim]) | set(_CONSTANTS)
    for node in ast.walk(tree):
        _check_node(node, source, allowed_names)
    return tree


def _check_node(node: ast.AST, source: str, allowed_names: set[str]) -> None:
    if isinstance(node, (ast.Expression, ast.Load)) or type(node) in _BINARY:
        return
    if isinstance(node, (ast.BinOp, ast.UnaryOp, ast.UAdd, ast.USub)):
        return
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ConfigError("expression_token", expression=source, token=repr(node.value))
        return
    if isinstance(node, ast.Name):
        if node.id not in allowed_names and node.id not in _FUNCTIONS:
            raise ConfigError("expression_token", expression=source, token=node.id)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConfigError("expression_token", expression=source, token=ast.unparse(node.func))
        if len(node.args) != 1 or node.keywords:
            raise ConfigError("expression_call", expression=source, function=node.func.id)
        return
    raise ConfigError("expression_token", expression=source, token=type(node).__name__)


def _evaluate(node: ast.AST, env: dict[str, np.ndarray]) -> np.ndarray | float:
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        raise ConfigError("expression_token", expression="", token=node.id)
    if isinstance(node, ast.UnaryOp):
        operand = _evaluate(node.operand, env)
        return -operand if isinstance(node.op, ast.USub) else operand
    if isinstance(node, ast.BinOp):
        return _BINARY[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](_evaluate(node.args[0], env))  # type: ignore[union-attr]
    raise ConfigError("expression_token", expression="", token=type(node).__name__)


@dataclass(frozen=True)
class StarShaped:
    """Zufaellige glatte sterngebietsfoermige Kurve r = R(theta) als Nullniveau von r - R(theta).

    R(theta) = radius * (1 + sum_k a_k cos(k*theta + phi_k)) mit k = 2..modes+1;
    die Amplituden sind so klein, dass R positiv und die Kurve glatt bleibt.
    Gleicher ``seed`` ergibt dieselbe Kurve.
    """

    seed: int = 0
    modes: int = 3
    radius: float = 1.0
    amplitude: float = 0.08

    def __post_init__(self) -> None:
        if self.modes < 1 or not 0.0 < self.amplitude * self.modes < 1.0 or not self.radius > 0.0:
            raise ConfigError("star_parameters", modes=self.modes, amplitude=self.amplitude, radius=self.radius)

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        amplitudes = rng.uniform(0.0, self.amplitude, size=self.modes)
        phases = rng.uniform(0.0, 2.0 * math.pi, size=self.modes)
        return amplitudes, phases

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        amplitudes, phases = self.coefficients()
        theta = np.arctan2(y, x)
        wobble = sum(a * np.cos((k + 2) * theta + phi) for k, (a, phi) in enumerate(zip(amplitudes, phases, strict=True)))
        return np.hypot(x, y) - self.radius * (1.0 + wobble)

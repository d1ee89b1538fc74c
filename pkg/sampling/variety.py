"""
Variety specifications and shell samples for Tropiscope
"""

import io
import logging
import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from algebra.expr import Const, Expression, Func, Neg, Product, Sum, parse_expression, split_top_level
from algebra.laurent import LaurentPolynomial, try_laurent
from core.exceptions import ConfigError, EmptySampleError

logger = logging.getLogger(__name__)

IMPLICIT = "implicit"
PARAMETRIZED = "parametrized"


def shell_band(R: float) -> float:
    """Half-width of the shell band around radius R"""
    return max(0.5, 0.02 * R)


@dataclass
class VarietySpec:
    """Implicit system in n torus variables, or a map from p parameters into the torus"""
    mode: str
    expressions: Tuple[Expression, ...]
    ambient: int
    k: int
    source: str = ""

    def __post_init__(self):
        if self.mode == IMPLICIT:
            if not 1 <= len(self.expressions) <= self.ambient - 1:
                raise ConfigError(f"an implicit variety in {self.ambient} variables needs 1..{self.ambient - 1} equations")
        elif self.mode == PARAMETRIZED:
            if not 1 <= self.params < self.ambient:
                raise ConfigError("a parametrization needs 1 <= p < n")
            if self.k != self.params:
                raise ConfigError(f"a parametrization by {self.params} parameters has dimension {self.params}")
        else:
            raise ConfigError(f"unknown variety mode '{self.mode}'")
        if self.k < 1:
            raise ConfigError("declared dimension k must be at least 1")

    @classmethod
    def implicit(cls, texts: Sequence[str], n: int, k: Optional[int] = None) -> "VarietySpec":
        expressions = tuple(parse_expression(t, n) for t in texts)
        return cls(IMPLICIT, expressions, n, k if k is not None else n - len(expressions), "; ".join(texts))

    @classmethod
    def parametrized(cls, text: str, p: int = 1) -> "VarietySpec":
        parts = split_top_level(text)
        expressions = tuple(parse_expression(part, p) for part in parts)
        return cls(PARAMETRIZED, expressions, len(parts), p, text)

    @property
    def params(self) -> int:
        return self.expressions[0].arity

    @property
    def is_hypersurface(self) -> bool:
        return self.mode == IMPLICIT and len(self.expressions) == 1

    @property
    def polynomial(self) -> Optional[LaurentPolynomial]:
        """Laurent form of a single polynomial equation, None otherwise"""
        if not self.is_hypersurface:
            return None
        return try_laurent(self.expressions[0])

    def __str__(self) -> str:
        return self.source or ", ".join(str(e) for e in self.expressions)


def _pi_factor_split(node) -> Optional[Product]:
    # sin(pi*g) or sin(g*pi) -> g
    if not isinstance(node, Product):
        return None
    rest = [f for f in node.factors if not (isinstance(f, Const) and f.symbol == "pi")]
    if len(rest) != len(node.factors) - 1:
        return None
    return rest[0] if len(rest) == 1 else Product(tuple(rest))


def select_component(spec: VarietySpec, component: Optional[int]) -> VarietySpec:
    """Replace sin(pi*g) = 0 by its irreducible component g = c

    Without a selected component the union of all components is kept and a
    warning is logged.
    """
    if not spec.is_hypersurface:
        return spec
    root = spec.expressions[0].root
    if not (isinstance(root, Func) and root.name == "sin"):
        return spec
    inner = _pi_factor_split(root.arg)
    if inner is None or try_laurent(Expression(inner, spec.ambient)) is None:
        return spec
    if component is None:
        logger.warning(f"'{spec}' is a union of infinitely many components g = m; "
                       f"classifying the union (select one with variety.component)")
        return spec
    if component == 0:
        raise ConfigError("the component g = 0 does not meet the torus; choose a nonzero integer")
    shifted = Sum((inner, Neg(Const(complex(abs(component))))) if component > 0
                  else (inner, Const(complex(abs(component)))))
    expression = Expression(shifted, spec.ambient)
    logger.info(f"Selected component {expression} = 0 of '{spec}'")
    return VarietySpec(IMPLICIT, (expression,), spec.ambient, spec.k, str(expression))


@dataclass
class ShellSample:
    """Points of V with log-norm in [R - band, R + band]"""
    radius: float
    band: float
    points: np.ndarray
    residuals: np.ndarray
    seed: int
    parameters: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ambient(self) -> int:
        return self.points.shape[1]

    def log_points(self) -> np.ndarray:
        return np.log(np.abs(self.points))

    def to_lines(self) -> str:
        out = io.StringIO()
        for z, residual in zip(self.points, self.residuals):
            fields = [repr(float(self.radius))]
            for value in z:
                fields.extend((repr(float(value.real)), repr(float(value.imag))))
            fields.append(repr(float(residual)))
            out.write(" ".join(fields) + "\n")
        return out.getvalue()

    @classmethod
    def from_lines(cls, text: str, seed: int = 0) -> "ShellSample":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows:
            raise EmptySampleError("no sample lines")
        data = np.array([[float(x) for x in row] for row in rows])
        radius = float(data[0, 0])
        points = data[:, 1:-1:2] + 1j * data[:, 2:-1:2]
        return cls(radius, shell_band(radius), points, data[:, -1], seed)


def merge_samples(samples: Sequence[ShellSample]) -> Tuple[np.ndarray, np.ndarray]:
    """All points of several shells with their originating radius"""
    if not samples:
        raise EmptySampleError("no shell samples")
    points = np.vstack([s.points for s in samples])
    radii = np.concatenate([np.full(len(s), s.radius) for s in samples])
    return points, radii


def shell_schedule(Rmin: float, Rmax: float, m: int) -> List[float]:
    """Geometric progression of m radii from Rmin to Rmax"""
    if not (0 < Rmin < Rmax) or m < 2:
        raise ConfigError(f"invalid shell schedule ({Rmin}, {Rmax}, {m})")
    radii = np.geomspace(Rmin, Rmax, m)
    radii[0], radii[-1] = Rmin, Rmax
    return [float(r) for r in radii]


def parse_variety(text: str, mode: str, n: Optional[int], k: Optional[int], params: int = 1) -> VarietySpec:
    """Build a spec from configuration text; implicit systems are ';'-separated"""
    if mode == PARAMETRIZED:
        spec = VarietySpec.parametrized(text, params)
        if k is not None and k != spec.k:
            raise ConfigError(f"a parametrization by {spec.k} parameters has dimension {spec.k}, not {k}")
        return spec
    texts: List[str] = [t for t in (part.strip() for part in text.split(";")) if t]
    if n is None:
        n = _infer_arity(texts)
    return VarietySpec.implicit(texts, n, k)


def _infer_arity(texts: Sequence[str]) -> int:
    indices = [int(m) for text in texts for m in re.findall(r"z(\d+)", text)]
    if not indices:
        raise ConfigError("cannot infer the number of variables; set variety.n")
    return max(max(indices), 2)

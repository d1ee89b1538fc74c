"""
Exception hierarchy for Tropiscope
Every failure the library can signal derives from TropiscopeError
"""


class TropiscopeError(Exception):
    """Base class for all Tropiscope errors"""


class ConfigError(TropiscopeError):
    """Invalid run configuration"""


# Expressions

class ExpressionSyntaxError(TropiscopeError):
    """Text does not conform to the expression grammar"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    """Identifier is neither a variable, a constant nor a known function"""


class VariableIndexError(ExpressionSyntaxError):
    """Variable index outside [1, n]"""


class NegativePowerError(ExpressionSyntaxError):
    """Negative exponent applied to something other than a variable"""


class NotPolynomialError(TropiscopeError):
    """Expression contains a transcendental node"""


class NegativePowerInEntireContextError(TropiscopeError):
    """Taylor expansion requested for an expression with negative powers"""


class SeriesDepthError(TropiscopeError):
    """Too many nested transcendental nodes for formal expansion"""


# Geometry and polyhedra

class ZeroCoordinateError(TropiscopeError):
    """A point of the torus must not have zero coordinates"""


class ZeroVectorError(TropiscopeError):
    """Direction of the zero vector requested"""


class EmptySupportError(TropiscopeError):
    """Polynomial has no monomials"""


class MonomialInputError(TropiscopeError):
    """A monomial defines the empty variety in the torus"""


class DimensionTooLargeError(TropiscopeError):
    """Exact enumeration is limited to small ambient dimension"""


class NotCompactError(TropiscopeError):
    """Operation requires a bounded polyhedron"""


# Sampling and estimation

class ShellUnreachableError(TropiscopeError):
    """No point of the variety was found on the requested shell"""


class RootFindingBudgetExceededError(TropiscopeError):
    """Draw budget exhausted before enough points were found"""


class NoPointsNearDirectionError(TropiscopeError):
    """No sample point lies near the requested direction"""


class EmptyAfterCutoffError(TropiscopeError):
    """Every sample point was removed by the radius cutoff"""


class DegenerateScalesError(TropiscopeError):
    """Box counting needs enough points and at least three distinct scales"""


class EmptyBoxError(TropiscopeError):
    """Raster bounding box is degenerate"""


class EmptySampleError(TropiscopeError):
    """Operation requires at least one sample point"""

"""Exception hierarchy shared by all curveforge modules."""


class CurveForgeError(Exception):
    """Base class for every error raised by curveforge."""

    #: pipeline stage reported by the command-line front-end
    stage = "curveforge"


class ExprError(CurveForgeError, ValueError):
    stage = "parse"


class ExprSyntaxError(ExprError):
    """Malformed formula text.

    ``offset`` is the byte offset (UTF-8) of the offending position and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message, offset, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class UnknownIdentifierError(ExprError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ExprDomainError(ExprError):
    """Out-of-domain evaluation, e.g. ``sqrt`` of a negative number."""

    stage = "evaluate"

    def __init__(self, node, argument, reason):
        self.node = node
        self.argument = argument
        super().__init__(f"{node}: {reason} (argument {argument!r})")


class ProfileError(CurveForgeError, ValueError):
    """Curvature/torsion data violating the admissibility requirements."""

    stage = "profile"


class SlantDomainError(CurveForgeError, ValueError):
    """Evaluation outside the range where the slant-helix torsion exists."""

    stage = "helix"


class InitialConditionError(CurveForgeError, ValueError):
    stage = "ode"


class NegativeRadicandError(CurveForgeError, ArithmeticError):
    stage = "ode"


class ChartBoundaryError(CurveForgeError, ArithmeticError):
    """The binormal is (nearly) orthogonal to the fixed direction e3."""

    stage = "ode"


class PoleError(CurveForgeError, ArithmeticError):
    """Tangent (nearly) parallel to e3, where the polar angle is singular."""

    stage = "reconstruct"


class RestartLimitError(CurveForgeError, ArithmeticError):
    stage = "reconstruct"


class DegenerateCurveError(CurveForgeError, ArithmeticError):
    stage = "estimate"


class GridMismatchError(CurveForgeError, ValueError):
    stage = "align"


class NonFiniteOutputError(CurveForgeError, ArithmeticError):
    """A NaN or infinity was about to be written out."""

    stage = "output"

"""Exception hierarchy."""


class SubcurvError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SubcurvError):
    """A point lies outside the coordinate domain of its chart."""


class DegenerateMetric(SubcurvError):
    """A metric matrix is not symmetric positive definite."""


class ParseError(SubcurvError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        where = f"line {line}, column {column}"
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(f"{where}: {message}")


class ArityError(SubcurvError):
    """Metric matrix is not square, not symmetric, or has the wrong size."""


class UnknownSymbol(SubcurvError):
    """An expression refers to a name that is neither a coordinate nor a function."""


class RankError(SubcurvError):
    """The differential of the projection does not have full rank."""


class FrameDegenerate(SubcurvError):
    """Gram-Schmidt could not produce a well-conditioned frame."""


class DimensionError(SubcurvError):
    """Manifold dimension too small for the requested curvature tensor."""


class UnsupportedCase(SubcurvError):
    """An identity/case combination that has no stated relation."""


class UnknownExample(SubcurvError):
    """No gallery entry with the requested name."""


class ConfigError(SubcurvError):
    """Invalid run configuration."""

"""Exception hierarchy shared by every module of the package."""


class MRTLBError(Exception):
    """Base class for all package errors."""


class RangeError(MRTLBError, ValueError):
    """A derived or supplied parameter falls outside its legal interval."""


class NegativeRadicand(RangeError):
    """The square-root argument of the modified-rate formula is negative."""


class DegenerateScaling(MRTLBError, ZeroDivisionError):
    """The linear-source rescaling 1 - zeta*dt/2 vanishes."""


class SingularRelaxation(MRTLBError, ValueError):
    """A relaxation rate is zero so the collision operator cannot be inverted."""


class BoundaryError(MRTLBError):
    """Dirichlet boundary data (values or derivatives) are missing."""


class SchemeMismatch(MRTLBError, ValueError):
    """A parameter set is incompatible with the requested scheme."""


class HistoryUnderflow(MRTLBError):
    """A multi-level scheme was stepped before its history was filled."""


class NoAnalyticSolution(MRTLBError):
    """An analytic bootstrap was requested for a problem without a closed form."""


class ShapeMismatch(MRTLBError, ValueError):
    """Two fields that must share a shape do not."""


class ParseError(MRTLBError, ValueError):
    """A run configuration could not be parsed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(MRTLBError, ValueError):
    """A parsed configuration violates one or more semantic constraints."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))

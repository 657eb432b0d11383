"""Exception hierarchy shared across the package."""


class GradInvError(Exception):
    """Base class for all package errors."""


class ArgumentIdError(GradInvError, KeyError):
    """An argument identifier is unknown, duplicated or mismatched."""

    def __str__(self):
        # KeyError quotes its message; keep it readable
        return Exception.__str__(self)


class ValidationError(GradInvError, ValueError):
    """Malformed input data (framework, ranking, plan or config)."""


class FormatError(ValidationError):
    """A JSON input file could not be parsed into a domain object.

    ``line`` is the 1-based line of the offending token when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = str(path)
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class BracketError(GradInvError, ValueError):
    """Bisection precondition f(alpha) >= 0 >= f(beta) does not hold."""


class UnsupportedSemanticsError(GradInvError, ValueError):
    """The requested operation is not defined for this semantics."""


class NonConvergenceError(GradInvError, RuntimeError):
    """A fixed-point evaluation did not converge within its iteration cap."""


class AnalysisError(GradInvError, ValueError):
    """Not enough data for a requested aggregate (e.g. a linear fit)."""

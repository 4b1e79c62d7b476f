"""Exception hierarchy.

Input problems raise; statistical degeneracies (zero variance, singular
covariance) are not errors and are reported inside outcomes instead.
"""


class RatercheckError(Exception):
    """Base class for all package errors."""


class DomainError(RatercheckError, ValueError):
    """Argument outside the domain of a distribution function."""


class CapExceeded(RatercheckError, ValueError):
    """Exact distribution requested beyond its configured size cap."""


class DatasetError(RatercheckError, ValueError):
    """Invalid or incomplete measurement data."""


class MalformedLine(DatasetError):
    def __init__(self, line, reason=""):
        self.line = line
        self.reason = reason
        msg = f"line {line}: malformed record"
        super().__init__(f"{msg} ({reason})" if reason else msg)


class NonPositiveValue(DatasetError):
    def __init__(self, line, value):
        self.line = line
        self.value = value
        super().__init__(f"line {line}: value {value!r} is not strictly positive")


class DuplicateCell(DatasetError):
    def __init__(self, project, method, rater, line=None):
        self.project = project
        self.method = method
        self.rater = rater
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(
            f"{where}duplicate measurement for project={project!r} "
            f"method={method!r} rater={rater!r}"
        )


class IncompleteDesign(DatasetError):
    def __init__(self, projects, method=None):
        self.projects = list(projects)
        self.method = method
        super().__init__(
            f"method {method!r}: incomplete rater design for projects {self.projects}"
        )


class TooManyRaters(DatasetError):
    def __init__(self, count, method=None):
        self.count = count
        self.method = method
        super().__init__(
            f"method {method!r} has {count} raters; pair-based analyses need exactly 2"
        )


class UnknownMethod(DatasetError):
    def __init__(self, method):
        self.method = method
        super().__init__(f"unknown method {method!r}")


class ProjectSetMismatch(DatasetError):
    def __init__(self, only_a, only_b):
        self.only_a = list(only_a)
        self.only_b = list(only_b)
        super().__init__(
            f"project sets differ: only in first method {self.only_a}, "
            f"only in second {self.only_b}"
        )


class NonPositiveInput(RatercheckError, ValueError):
    """A measurement passed to the consistency statistic was not > 0."""


class ImpossiblePositivity(RatercheckError):
    """Rejection resampling could not produce a positive measurement."""


class SpecError(RatercheckError, ValueError):
    """Invalid simulation or analysis configuration."""


class InsufficientData(RatercheckError, ValueError):
    """Sample too small (or mismatched) for the requested test."""

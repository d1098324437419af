"""Exception hierarchy; the CLI maps `InputError` to exit code 2, the rest to 1."""


class MultlabError(Exception):
    exit_code = 1


class InputError(MultlabError):
    exit_code = 2


class ModeMismatch(InputError):
    pass


class DegeneratePointSet(InputError):
    pass


class NoSecondDistance(InputError):
    pass


class AngleOutOfRange(InputError):
    pass


class NotApplicable(InputError):
    pass


class RangeExceeded(InputError):
    pass


class DivisibilityError(InputError):
    pass


class NotConvex(InputError):
    pass


class TooSmall(InputError):
    pass


class PointFileError(InputError):
    pass


class UnreliableClustering(MultlabError):
    pass


class InfeasibleGeometry(MultlabError):
    pass


class RetryBudgetExhausted(MultlabError):
    pass

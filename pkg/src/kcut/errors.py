"""Exception taxonomy.

Every error carries a short ``code`` string so that the CLI can report the
failure category and the operation that raised it.
"""


class KcutError(Exception):
    code = "kcut-error"

    def __init__(self, message="", *, operation=None):
        super().__init__(message)
        self.operation = operation

    def __str__(self):
        msg = super().__str__()
        if self.operation:
            return f"[{self.code}] {self.operation}: {msg}"
        return f"[{self.code}] {msg}"


class InvalidParameter(KcutError, ValueError):
    code = "invalid-parameter"


class InconsistentDerivatives(KcutError, ValueError):
    code = "inconsistent-derivatives"


class OutOfRange(KcutError, ValueError):
    code = "out-of-range"


class NoConvergence(KcutError, RuntimeError):
    code = "no-convergence"


class DomainViolation(KcutError, ValueError):
    code = "domain-violation"


class NumericFailure(KcutError, ArithmeticError):
    code = "numeric-failure"


class NotKahlerHere(KcutError, ValueError):
    code = "not-kahler-here"


class MalformedForm(KcutError, ValueError):
    code = "malformed-form"


class DimensionError(KcutError, ValueError):
    code = "dimension-error"


class OutsideCutRegion(KcutError, ValueError):
    code = "outside-cut-region"


class NotSemistable(KcutError, ValueError):
    code = "not-semistable"


class LevelSolveFailure(KcutError, RuntimeError):
    code = "level-solve-failure"


class RegularityViolation(KcutError, ValueError):
    code = "regularity-violation"


class InvalidLevel(KcutError, ValueError):
    code = "invalid-level"


class Misconfigured(KcutError, ValueError):
    code = "misconfigured"


class NotEinsteinAmbient(KcutError, ValueError):
    code = "not-einstein-ambient"


class OutsidePolytope(KcutError, ValueError):
    code = "outside-polytope"


class TooLarge(KcutError, ValueError):
    code = "too-large"


class Unsupported(KcutError, ValueError):
    code = "unsupported"


class Inconclusive(KcutError, RuntimeError):
    code = "inconclusive"


class ConfigError(KcutError, ValueError):
    code = "config-error"


class OutputError(KcutError, OSError):
    code = "io-error"

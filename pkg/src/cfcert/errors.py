"""Exception types raised across the package."""


class CfcertError(Exception):
    """Base class for all package errors."""


class NotMonicForIntegerContext(CfcertError):
    pass


class IrreducibilityUndecided(CfcertError):
    pass


class SelectorAmbiguous(CfcertError):
    pass


class PrecisionExhausted(CfcertError):
    pass


class ZeroInput(CfcertError, ZeroDivisionError):
    pass


class DegreeCapExceeded(CfcertError):
    pass


class ConjugateInputs(CfcertError):
    pass


class QNearZero(CfcertError):
    pass


class MonotonicityNotCertified(CfcertError):
    pass


class SearchBudgetExceeded(CfcertError):
    pass


class GenerationBudgetExceeded(CfcertError):
    pass


class HypothesisViolated(CfcertError):
    """A hypothesis of the criterion certifiably fails on the input prefix."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}" if detail else name)


class SpecError(CfcertError):
    """Invalid sequence specification; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = path or "<root>"
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}")


class SchemaError(SpecError):
    pass


class ExpressionError(SpecError):
    pass


class HypothesisShapeError(SpecError):
    pass

"""Error kinds raised by the henselian library.

Every error carries a stable ``kind`` string so callers (the CLI in
particular) can report it without parsing messages.
"""


class HenselianError(Exception):
    kind = "henselian-error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.kind)


class PrecisionExhaustedError(HenselianError, ArithmeticError):
    kind = "precision-exhausted"


class NotInValuationRingError(HenselianError, ValueError):
    kind = "not in valuation ring"


class DivisionByZeroError(HenselianError, ZeroDivisionError):
    kind = "division by zero"


class FieldMismatchError(HenselianError, TypeError):
    kind = "field-mismatch"


class HenselConditionError(HenselianError, ValueError):
    kind = "hensel-condition-failed"


class UnsupportedPolynomialError(HenselianError, ValueError):
    kind = "unsupported-polynomial"


class ValuationOfZeroError(HenselianError, ValueError):
    kind = "valuation-of-zero"


class UnsupportedLogPowerError(HenselianError, ValueError):
    kind = "unsupported-log-power"


class InfiniteMeasureError(HenselianError, ValueError):
    kind = "infinite-measure-domain"

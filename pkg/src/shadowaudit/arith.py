"""Checked 64-bit float arithmetic shared by both evaluators.

Both the spreadsheet recalculation and the shadow evaluator go through
these helpers so that any divergence between the two sides reflects model
differences, never a precision-policy difference.
"""

import math


class ArithmeticFault(Exception):
    """Internal signal; callers re-raise with location context."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # "div0" | "domain" | "overflow"


def checked_div(a: float, b: float) -> float:
    if b == 0.0:
        raise ArithmeticFault("div0", "division by zero")
    return a / b


def checked_pow(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0.0:
        raise ArithmeticFault("div0", "zero raised to a negative power")
    try:
        result = math.pow(base, exponent)
    except ValueError:
        raise ArithmeticFault(
            "domain", f"non-real power: {base!r} ^ {exponent!r}"
        ) from None
    except OverflowError:
        raise ArithmeticFault("overflow", "power overflows") from None
    return result

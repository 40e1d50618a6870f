"""Exact factorial-type quantities and their log-space float counterparts.

Exact values are plain Python ``int`` and :class:`fractions.Fraction`; both are
arbitrary precision and ``Fraction`` is always kept in lowest terms with a
positive denominator, so equality is canonical.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "LogFloat",
    "factorial",
    "odd_product",
    "sum_term",
    "log_factorial",
]

_EXACT_LOG_CUTOFF = 20


class _FactorialTable:
    """Growable memo of n! shared by every caller in the process.

    Readers only ever see a fully written prefix; growth happens under a lock.
    """

    def __init__(self) -> None:
        self._values = [1]
        self._lock = threading.Lock()

    def get(self, n: int) -> int:
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            values = self._values
            if n >= len(values):
                grown = list(values)
                acc = grown[-1]
                for i in range(len(grown), n + 1):
                    acc *= i
                    grown.append(acc)
                self._values = grown
            return self._values[n]


_FACTORIALS = _FactorialTable()


def factorial(n: int) -> int:
    """Return n! exactly."""
    if n < 0:
        raise ValueError(f"factorial needs n >= 0, got {n}")
    return _FACTORIALS.get(n)


def odd_product(n: int) -> int:
    """Return 1 * 3 * 5 * ... * (2n - 1) as a direct product."""
    if n < 1:
        raise ValueError(f"odd_product needs n >= 1, got {n}")
    acc = 1
    for i in range(1, n + 1):
        acc *= 2 * i - 1
    return acc


def sum_term(k: int, j: int) -> Fraction:
    """The j-th summand 4^-(j+1) (k+2j)! / ((j+1)! (k+j)!) of the a_{n,k} bracket."""
    if k < 1 or j < 0:
        raise ValueError(f"sum_term needs k >= 1 and j >= 0, got k={k}, j={j}")
    num = factorial(k + 2 * j)
    den = (4 ** (j + 1)) * factorial(j + 1) * factorial(k + j)
    return Fraction(num, den)


@dataclass(frozen=True)
class LogFloat:
    """A nonnegative real stored as its natural log.

    Exact zero is carried by ``is_zero`` instead of ``-inf``.
    """

    log_value: float = 0.0
    is_zero: bool = False

    @classmethod
    def zero(cls) -> LogFloat:
        return cls(0.0, True)

    @classmethod
    def from_value(cls, x: float | int | Fraction) -> LogFloat:
        if x < 0:
            raise ValueError("LogFloat holds nonnegative values only")
        if x == 0:
            return cls.zero()
        if isinstance(x, Fraction):
            return cls(_log_rational(x))
        if isinstance(x, int):
            return cls(math.log(x))
        return cls(math.log(x))

    def __mul__(self, other: LogFloat) -> LogFloat:
        if self.is_zero or other.is_zero:
            return LogFloat.zero()
        return LogFloat(self.log_value + other.log_value)

    def __truediv__(self, other: LogFloat) -> LogFloat:
        if other.is_zero:
            raise ZeroDivisionError("division by LogFloat zero")
        if self.is_zero:
            return LogFloat.zero()
        return LogFloat(self.log_value - other.log_value)

    def __add__(self, other: LogFloat) -> LogFloat:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return LogFloat(_logaddexp(self.log_value, other.log_value))

    def __float__(self) -> float:
        if self.is_zero:
            return 0.0
        return math.exp(self.log_value)

    def relative_error(self, exact: Fraction) -> float:
        """|self - exact| / exact, evaluated without leaving log space."""
        if exact == 0:
            return 0.0 if self.is_zero else math.inf
        if self.is_zero:
            return 1.0
        return abs(math.expm1(self.log_value - _log_rational(exact)))


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _log_rational(x: Fraction) -> float:
    # math.log on big ints is accurate past float range
    return math.log(x.numerator) - math.log(x.denominator)


_EXACT_LOGS = tuple(math.log(math.factorial(n)) for n in range(_EXACT_LOG_CUTOFF + 1))


def log_factorial(n: int) -> LogFloat:
    """Natural log of n!, finite far beyond the float range of n! itself."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n <= _EXACT_LOG_CUTOFF:
        return LogFloat(_EXACT_LOGS[n])
    return LogFloat(math.lgamma(n + 1))

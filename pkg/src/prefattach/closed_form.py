"""Closed-form degree probabilities of the first node, exact and in log space."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import LogFloat, factorial, log_factorial, odd_product, sum_term

__all__ = [
    "ClosedFormValue",
    "p_first_degree_one",
    "p_first_degree_max",
    "a_closed",
    "a_closed_general",
    "p_closed",
    "p_closed_float",
]

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ClosedFormValue:
    n: int
    k: int
    m: int = 1
    exact: Fraction | None = None
    approx: LogFloat | None = None

    def __float__(self) -> float:
        if self.approx is not None:
            return float(self.approx)
        if self.exact is not None:
            return float(self.exact)
        raise ValueError("empty ClosedFormValue")


def _check_nk(n: int, k: int) -> None:
    if n < 1 or k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


class _BracketSums:
    """Prefix sums S_k(c) = sum_{j<c} sum_term(k, j), grown on demand.

    Sweeping every (n, k) of a triangle re-reads the same prefixes, so they
    are memoized per k.
    """

    def __init__(self) -> None:
        self._prefix: dict[int, list[Fraction]] = {}
        self._lock = threading.Lock()

    def get(self, k: int, count: int) -> Fraction:
        prefix = self._prefix.get(k)
        if prefix is not None and count < len(prefix):
            return prefix[count]
        with self._lock:
            prefix = list(self._prefix.get(k, [Fraction(0)]))
            while len(prefix) <= count:
                prefix.append(prefix[-1] + sum_term(k, len(prefix) - 1))
            self._prefix[k] = prefix
            return prefix[count]


_BRACKETS = _BracketSums()


def _bracket(n: int, k: int) -> Fraction:
    """1 + (k - 1) * sum_{j=0}^{n-k-1} sum_term(k, j)."""
    return 1 + (k - 1) * _BRACKETS.get(k, n - k)


def p_first_degree_one(n: int) -> ClosedFormValue:
    """P(first node still has degree 1 at time n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    value = Fraction(2 ** (n - 1) * factorial(n - 1), odd_product(n))
    return ClosedFormValue(n, 1, exact=value)


def p_first_degree_max(n: int) -> ClosedFormValue:
    """P(first node has degree n at time n), i.e. every newcomer chose it."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    value = Fraction(factorial(n - 1), odd_product(n))
    return ClosedFormValue(n, n, exact=value)


def a_closed_general(n: int, k: int) -> ClosedFormValue:
    """The scaled coefficient through the general branch only.

    For k = n the sum is empty and the bracket reduces to 1.
    """
    _check_nk(n, k)
    value = 4 ** (n - k) * _bracket(n, k)
    return ClosedFormValue(n, k, exact=value)


def a_closed(n: int, k: int) -> ClosedFormValue:
    """Scaled coefficient a_{n,k}, with the diagonal pinned to 1."""
    _check_nk(n, k)
    if k == n:
        return ClosedFormValue(n, k, exact=Fraction(1))
    return a_closed_general(n, k)


def p_closed(n: int, k: int) -> ClosedFormValue:
    """P(first node has degree k at time n) from the explicit formula."""
    _check_nk(n, k)
    prefactor = Fraction(factorial(n) * factorial(n - 1) * 2 ** (2 * n - k), factorial(2 * n))
    return ClosedFormValue(n, k, exact=prefactor * _bracket(n, k))


def _pairwise_logsumexp(logs: np.ndarray) -> float:
    while logs.size > 1:
        if logs.size % 2:
            logs = np.append(logs, -np.inf)
        logs = np.logaddexp(logs[0::2], logs[1::2])
    return float(logs[0])


def _log_factorials(values: np.ndarray) -> np.ndarray:
    return np.fromiter(
        (log_factorial(int(v)).log_value for v in values), dtype=float, count=values.size
    )


def _log_bracket(n: int, k: int) -> float:
    if k == 1 or n == k:
        return 0.0
    j = np.arange(n - k, dtype=np.int64)
    log_terms = (
        _log_factorials(k + 2 * j)
        - _log_factorials(j + 1)
        - _log_factorials(k + j)
        - 2.0 * (j + 1) * _LOG2
    )
    log_sum = _pairwise_logsumexp(log_terms)
    return float(np.logaddexp(0.0, math.log(k - 1) + log_sum))


def p_closed_float(n: int, k: int) -> ClosedFormValue:
    """Log-space evaluation of the explicit formula; usable up to n ~ 1e6."""
    _check_nk(n, k)
    log_p = (
        log_factorial(n).log_value
        + log_factorial(n - 1).log_value
        - log_factorial(2 * n).log_value
        + (2 * n - k) * _LOG2
        + _log_bracket(n, k)
    )
    return ClosedFormValue(n, k, approx=LogFloat(log_p))

"""Exact dynamic programming over the degree master equations.

Nodes are numbered by birth time starting at 1. Node ``m`` appears at time
``m`` with degree 1; at every later time ``n`` it gains one edge with
probability ``X / (2n - 1)`` where ``X`` is its current degree. So its degree
at time ``n`` lives on ``1 .. n - m + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "DegreeDistribution",
    "DegreeTable",
    "ScaledTable",
    "first_node_table",
    "general_node_table",
    "scaled_table",
    "distribution_at",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class DegreeDistribution:
    """Law of the degree of node ``m`` at time ``n``.

    ``probs[i]`` is P(degree = i + 1); indexing with ``dist[k]`` uses the degree
    itself and returns 0 off the support.
    """

    m: int
    n: int
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < self.m:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if len(self.probs) != self.max_degree:
            raise ValueError(
                f"expected {self.max_degree} probabilities for m={self.m}, n={self.n}, "
                f"got {len(self.probs)}"
            )

    @property
    def max_degree(self) -> int:
        return self.n - self.m + 1

    @property
    def support(self) -> range:
        return range(1, self.max_degree + 1)

    def __getitem__(self, k: int) -> Fraction:
        if 1 <= k <= self.max_degree:
            return self.probs[k - 1]
        return _ZERO

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return zip(self.support, self.probs)

    def total(self) -> Fraction:
        return sum(self.probs, _ZERO)


@dataclass(frozen=True)
class DegreeTable:
    """Every row n = m .. n_max of one node's degree law."""

    m: int
    rows: tuple[DegreeDistribution, ...]

    @property
    def n_max(self) -> int:
        return self.m + len(self.rows) - 1

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[DegreeDistribution]:
        return iter(self.rows)


@dataclass(frozen=True)
class ScaledTable:
    """Triangle of scaled coefficients a_{n,k}, 1 <= k <= n <= n_max."""

    n_max: int
    rows: tuple[tuple[Fraction, ...], ...]

    def value(self, n: int, k: int) -> Fraction:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        if k < 1 or k > n:
            return _ZERO
        return self.rows[n - 1][k - 1]


def _step(prev: Sequence[Fraction], n: int) -> tuple[Fraction, ...]:
    """Advance a degree row from time n-1 to time n (one more degree slot)."""
    denom = 2 * n - 1
    size = len(prev) + 1
    out = []
    for k in range(1, size + 1):
        gain = prev[k - 2] * Fraction(k - 1, denom) if k >= 2 else _ZERO
        stay = prev[k - 1] * Fraction(denom - k, denom) if k <= len(prev) else _ZERO
        out.append(gain + stay)
    return tuple(out)


def general_node_table(m: int, n_max: int) -> DegreeTable:
    """Degree laws of node m for n = m .. n_max.

    Coefficients use the absolute time n, never the node's age n - m.
    """
    if m < 1:
        raise ValueError(f"node index m must be >= 1, got {m}")
    if n_max < m:
        raise ValueError(f"n_max={n_max} is before the birth of node m={m}")
    row: tuple[Fraction, ...] = (_ONE,)
    rows = [DegreeDistribution(m, m, row)]
    for n in range(m + 1, n_max + 1):
        row = _step(row, n)
        rows.append(DegreeDistribution(m, n, row))
    return DegreeTable(m, tuple(rows))


def first_node_table(n_max: int) -> DegreeTable:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return general_node_table(1, n_max)


def scaled_table(n_max: int) -> ScaledTable:
    """Fill a_{n,k} from its own recurrence with both boundaries pinned."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rows: list[tuple[Fraction, ...]] = [(_ONE,)]
    for n in range(2, n_max + 1):
        prev = rows[-1]
        row = [Fraction(4 ** (n - 1))]
        for k in range(2, n):
            row.append(
                ((k - 1) * prev[k - 2] + 2 * (2 * n - 1 - k) * prev[k - 1]) / (n - 1)
            )
        row.append(_ONE)
        rows.append(tuple(row))
    return ScaledTable(n_max, tuple(rows))


def distribution_at(table: DegreeTable, n: int) -> DegreeDistribution:
    if not table.m <= n <= table.n_max:
        raise ValueError(f"n={n} outside table range {table.m}..{table.n_max}")
    return table.rows[n - table.m]

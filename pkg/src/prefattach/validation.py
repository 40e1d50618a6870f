"""Cross-checks between the recurrence tables, the closed forms, and simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import closed_form, recurrence
from .combinatorics import factorial
from .recurrence import DegreeDistribution
from .simulator import EmpiricalDistribution, Residual, SimulationConfig, run_trials

__all__ = [
    "Mismatch",
    "EquivalenceReport",
    "StatReport",
    "check_equivalence",
    "induction_sides",
    "check_induction_identity",
    "step_identity_sides",
    "check_step_identity",
    "tv_distance",
    "chi_square",
    "chi_square_critical",
    "time_invariance_report",
    "graph_outcome_law",
    "check_graph_micro_oracle",
    "simulation_report",
    "TV_THRESHOLD",
    "CHI_SQUARE_LEVEL",
]

TV_THRESHOLD = 0.005
CHI_SQUARE_LEVEL = 0.999

# 0.999 quantiles of the chi-square law, df = 1 .. 64
_CHI2_999 = (
    10.8276, 13.8155, 16.2662, 18.4668, 20.515, 22.4577, 24.3219, 26.1245,
    27.8772, 29.5883, 31.2641, 32.9095, 34.5282, 36.1233, 37.6973, 39.2524,
    40.7902, 42.3124, 43.8202, 45.3147, 46.797, 48.2679, 49.7282, 51.1786,
    52.6197, 54.052, 55.476, 56.8923, 58.3012, 59.7031, 61.0983, 62.4872,
    63.8701, 65.2472, 66.6188, 67.9852, 69.3465, 70.7029, 72.0547, 73.402,
    74.7449, 76.0838, 77.4186, 78.7495, 80.0767, 81.4003, 82.7204, 84.0371,
    85.3506, 86.6608, 87.968, 89.2722, 90.5734, 91.8718, 93.1675, 94.4605,
    95.751, 97.0388, 98.3242, 99.6072, 100.8879, 102.1662, 103.4424, 104.7163,
)
_Z_999 = 3.090232306167813


class Mismatch(NamedTuple):
    n: int
    k: int
    left: Fraction
    right: Fraction
    label: str = ""


@dataclass
class EquivalenceReport:
    name: str
    n_max: int
    mismatches: list[Mismatch] = field(default_factory=list)
    cells: int = 0
    gated: bool = True

    @property
    def passed(self) -> bool:
        return not self.mismatches


@dataclass
class StatReport:
    tv_distance: float
    chi_square_statistic: float
    degrees_of_freedom: int
    trials: int
    critical_value: float
    testable: bool = True
    tv_threshold: float = TV_THRESHOLD

    @property
    def passed(self) -> bool | None:
        """None when pooling left a single cell and no test was possible."""
        if not self.testable:
            return None
        return (
            self.tv_distance <= self.tv_threshold
            and self.chi_square_statistic < self.critical_value
        )


def check_equivalence(n_max: int) -> EquivalenceReport:
    """Compare both recurrence tables against the closed forms on 1 <= k <= n <= n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    report = EquivalenceReport("recurrence_vs_closed_form", n_max)
    scaled = recurrence.scaled_table(n_max)
    probs = recurrence.first_node_table(n_max)
    for row in probs:
        n = row.n
        for k in range(1, n + 1):
            a_rec = scaled.value(n, k)
            a_cf = closed_form.a_closed(n, k).exact
            if a_rec != a_cf:
                report.mismatches.append(Mismatch(n, k, a_rec, a_cf, "a"))
            p_rec = row[k]
            p_cf = closed_form.p_closed(n, k).exact
            if p_rec != p_cf:
                report.mismatches.append(Mismatch(n, k, p_rec, p_cf, "p"))
            report.cells += 1
    return report


def _falling_ratio(top: int, bottom: int) -> int:
    return factorial(top) // factorial(bottom)


def induction_sides(k: int, r: int) -> tuple[Fraction, Fraction]:
    """Both sides of the summation identity behind the closed-form proof."""
    if k < 2 or r < 0:
        raise ValueError(f"need k >= 2 and r >= 0, got k={k}, r={r}")
    lhs = Fraction(0)
    for j in range(r + 1):
        inner = 2 * (k - 2) * _falling_ratio(k - 1 + 2 * j, k - 1 + j) - (k - 1) * _falling_ratio(
            k + 2 * j, k + j
        )
        lhs += Fraction(inner, 4 ** (j + 1) * factorial(j + 1))
    rhs = Fraction(factorial(k + 1 + 2 * r), 4 ** (r + 1) * factorial(r + 1) * factorial(k + r)) - 1
    return lhs, rhs


def check_induction_identity(k: int, r: int) -> bool:
    lhs, rhs = induction_sides(k, r)
    return lhs == rhs


def step_identity_sides(k: int, r: int) -> tuple[int, int]:
    """Polynomial form of the induction step.

    Obtained from the factorial form by multiplying through by
    4^(r+2) (r+2)! and dividing by (k+1+2r)!/(k+r+1)!; the leading
    coefficient is therefore 4(r+2).
    """
    if k < 2 or r < 0:
        raise ValueError(f"need k >= 2 and r >= 0, got k={k}, r={r}")
    lhs = 4 * (r + 2) * (k + r + 1) + 2 * (k - 2) * (k + r + 1) - (k - 1) * (k + 2 + 2 * r)
    rhs = (k + 3 + 2 * r) * (k + 2 + 2 * r)
    return lhs, rhs


def check_step_identity(k: int, r: int) -> bool:
    lhs, rhs = step_identity_sides(k, r)
    return lhs == rhs


def _check_coordinates(p: DegreeDistribution, q: EmpiricalDistribution) -> None:
    if (p.m, p.n) != (q.m, q.n):
        raise ValueError(f"coordinate mismatch: analytic (m={p.m}, n={p.n}) vs empirical (m={q.m}, n={q.n})")


def tv_distance(p: DegreeDistribution, q: EmpiricalDistribution) -> float:
    _check_coordinates(p, q)
    keys = set(p.support) | set(q.counts)
    return 0.5 * sum(abs(float(p[k]) - q.frequency(k)) for k in keys)


def chi_square_critical(df: int, level: float = CHI_SQUARE_LEVEL) -> float:
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if level != CHI_SQUARE_LEVEL:
        raise ValueError(f"only the {CHI_SQUARE_LEVEL} quantile is tabulated")
    if df <= len(_CHI2_999):
        return _CHI2_999[df - 1]
    # Wilson-Hilferty beyond the table
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + _Z_999 * math.sqrt(h)) ** 3


def _pool(expected: list[float], observed: list[int], min_expected: float) -> tuple[list[float], list[int]]:
    pooled_e: list[float] = []
    pooled_o: list[int] = []
    acc_e, acc_o = 0.0, 0
    for e, o in zip(expected, observed):
        acc_e += e
        acc_o += o
        if acc_e >= min_expected:
            pooled_e.append(acc_e)
            pooled_o.append(acc_o)
            acc_e, acc_o = 0.0, 0
    if acc_e > 0 or acc_o > 0:
        if pooled_e:
            pooled_e[-1] += acc_e
            pooled_o[-1] += acc_o
        else:
            pooled_e.append(acc_e)
            pooled_o.append(acc_o)
    return pooled_e, pooled_o


def chi_square(
    p: DegreeDistribution, q: EmpiricalDistribution, min_expected: float = 5.0
) -> StatReport:
    """Pearson goodness of fit of simulated counts against an exact degree law.

    Cells are merged in degree order until each pooled cell expects at least
    ``min_expected`` trials, so sparse tails at either end fold into their
    neighbours.
    """
    _check_coordinates(p, q)
    if q.trials < 1:
        raise ValueError("empirical distribution has no trials")
    keys = sorted(set(p.support) | set(q.counts))
    expected = [float(p[k]) * q.trials for k in keys]
    observed = [q.counts.get(k, 0) for k in keys]
    pooled_e, pooled_o = _pool(expected, observed, min_expected)
    tv = tv_distance(p, q)
    df = len(pooled_e) - 1
    if df < 1:
        return StatReport(tv, 0.0, 0, q.trials, math.nan, testable=False)
    stat = sum((o - e) ** 2 / e for e, o in zip(pooled_e, pooled_o))
    return StatReport(tv, stat, df, q.trials, chi_square_critical(df))


def time_invariance_report(m: int, t_max: int) -> EquivalenceReport:
    """Node m at age t against node 1 at age t, for t = 1 .. t_max.

    Descriptive only: the report is never gated. Mismatch entries carry the
    later node's time ``m + t``, the degree, node m's probability and node 1's.
    """
    if m < 2 or t_max < 0:
        raise ValueError(f"need m >= 2 and t_max >= 0, got m={m}, t_max={t_max}")
    report = EquivalenceReport(f"time_invariance_m{m}", m + t_max, gated=False)
    if t_max == 0:
        return report
    late = recurrence.general_node_table(m, m + t_max)
    first = recurrence.first_node_table(1 + t_max)
    for t in range(1, t_max + 1):
        row_m = recurrence.distribution_at(late, m + t)
        row_1 = recurrence.distribution_at(first, 1 + t)
        for k in row_m.support:
            report.cells += 1
            if row_m[k] != row_1[k]:
                report.mismatches.append(Mismatch(m + t, k, row_m[k], row_1[k], f"t={t}"))
    return report


def graph_outcome_law(n: int, residual: Residual = "stub") -> dict[tuple[int, ...], Fraction]:
    """Exact law of the node-degree vector at time n by enumerating every branch."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    law: dict[tuple[int, ...], Fraction] = {(1,): Fraction(1)}
    for t in range(2, n + 1):
        denom = 2 * t - 1
        grown: dict[tuple[int, ...], Fraction] = {}
        for degrees, prob in law.items():
            for j, d in enumerate(degrees):
                nxt = degrees[:j] + (d + 1,) + degrees[j + 1 :] + (1,)
                grown[nxt] = grown.get(nxt, Fraction(0)) + prob * Fraction(d, denom)
            rest = Fraction(denom - sum(degrees), denom)
            nxt = degrees + ((1,) if residual == "stub" else (2,))
            grown[nxt] = grown.get(nxt, Fraction(0)) + prob * rest
        law = grown
    return law


def check_graph_micro_oracle(
    n_max: int = 4, nodes: str = "first", residual: Residual = "stub"
) -> EquivalenceReport:
    """Exact node marginals of the enumerated graph law against the recurrence.

    ``nodes="first"`` checks node 1 only; ``"all"`` checks every node m <= n.
    """
    report = EquivalenceReport(f"graph_micro_oracle_{residual}", n_max)
    for n in range(1, n_max + 1):
        law = graph_outcome_law(n, residual)
        for m in range(1, (n if nodes == "all" else 1) + 1):
            row = recurrence.distribution_at(recurrence.general_node_table(m, n), n)
            marginal: dict[int, Fraction] = {}
            for degrees, prob in law.items():
                marginal[degrees[m - 1]] = marginal.get(degrees[m - 1], Fraction(0)) + prob
            for k in sorted(set(row.support) | set(marginal)):
                report.cells += 1
                got = marginal.get(k, Fraction(0))
                if got != row[k]:
                    report.mismatches.append(Mismatch(n, k, got, row[k], f"m={m}"))
    return report


def simulation_report(
    mode: str,
    m: int,
    n: int,
    trials: int,
    seed: int,
    residual: Residual = "stub",
    workers: int = 1,
) -> tuple[EmpiricalDistribution, StatReport]:
    config = SimulationConfig(mode, m, n, trials, seed, residual)  # type: ignore[arg-type]
    empirical = run_trials(config, workers=workers)
    analytic = recurrence.distribution_at(recurrence.general_node_table(m, n), n)
    return empirical, chi_square(analytic, empirical)

"""Monte Carlo realizations of the growth process.

Random streams
--------------
Trial ``i`` under master seed ``s`` draws from SplitMix64 started at

    key = mix64(mix64(s) + GOLDEN * (i + 1))   (mod 2**64)

and its c-th variate (c = 0, 1, ...) is

    u_c = (mix64(key + GOLDEN * (c + 1)) >> 11) * 2**-53

with ``GOLDEN = 0x9E3779B97F4A7C15`` and ``mix64`` the SplitMix64 finalizer
(shift 30, mul 0xBF58476D1CE4E5B9, shift 27, mul 0x94D049BB133111EB,
shift 31). All arithmetic is unsigned 64-bit, so the mapping is the same on
every platform. A trial consumes one variate per growth step, in time order.

Bernoulli and target choices compare ``x = u * (2t - 1)`` (one float
multiply) against integer degree sums, identically in the scalar and the
vectorized paths, so both produce the same counts bit for bit.

Graph completion
----------------
At step ``t`` an existing node of degree ``d`` receives the newcomer's edge
with probability ``d / (2t - 1)``. Those probabilities sum to
``S / (2t - 1)`` where ``S`` is the current node-degree total, and the
remaining mass goes to one of two rules:

``"stub"`` (default)
    the edge lands on an external stub. The newcomer still starts at degree
    1, the stub's degree mass grows by one, and node degrees plus stub mass
    equal ``2t - 1``. Every node is born at degree 1, so each node's degree
    follows the single-node Bernoulli chain exactly.
``"self_loop"``
    the newcomer closes a self-loop and starts at degree 2. Node degrees sum
    to ``2t - 1`` with no stub, but nodes born after time 1 start at degree 2
    with probability ``2 / (2m - 1)``, so only node 1 follows the chain.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

__all__ = [
    "GOLDEN",
    "RESIDUAL_RULES",
    "SimulationConfig",
    "GraphState",
    "EmpiricalDistribution",
    "SimulationError",
    "TrialStream",
    "derive_stream",
    "simulate_marginal",
    "simulate_graph",
    "run_trials",
]

GOLDEN = 0x9E3779B97F4A7C15
_MASK = 0xFFFFFFFFFFFFFFFF
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 2.0**-53

# Trials are simulated in fixed blocks; block boundaries never affect counts.
BLOCK_SIZE = 1 << 16

Mode = Literal["marginal", "graph"]
Residual = Literal["stub", "self_loop"]
RESIDUAL_RULES = ("stub", "self_loop")


class SimulationError(RuntimeError):
    """A simulation run could not complete; no partial counts are returned."""


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _trial_key(master_seed: int, trial_index: int) -> int:
    return _mix64((_mix64(master_seed & _MASK) + GOLDEN * (trial_index + 1)) & _MASK)


class TrialStream:
    """The uniform variates of one trial, in draw order."""

    def __init__(self, key: int) -> None:
        self.key = key
        self.count = 0

    def uniform(self) -> float:
        self.count += 1
        z = _mix64((self.key + GOLDEN * self.count) & _MASK)
        return (z >> 11) * _INV_2_53


def derive_stream(master_seed: int, trial_index: int) -> TrialStream:
    if master_seed < 0 or trial_index < 0:
        raise ValueError("seed and trial index must be nonnegative")
    return TrialStream(_trial_key(master_seed, trial_index))


@dataclass(frozen=True)
class SimulationConfig:
    mode: Mode
    m: int
    n: int
    trials: int
    master_seed: int = 0
    residual: Residual = "stub"

    def __post_init__(self) -> None:
        if self.mode not in ("marginal", "graph"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.residual not in RESIDUAL_RULES:
            raise ValueError(f"unknown residual rule {self.residual!r}")
        if self.m < 1 or self.n < self.m:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed <= _MASK:
            raise ValueError("master_seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class GraphState:
    n: int
    degrees: tuple[int, ...]
    stub: int = 0

    @property
    def total(self) -> int:
        return sum(self.degrees) + self.stub


@dataclass(frozen=True)
class EmpiricalDistribution:
    m: int
    n: int
    trials: int
    master_seed: int
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.trials:
            raise ValueError("counts do not add up to the trial count")

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.trials


def simulate_marginal(m: int, n: int, stream: TrialStream) -> int:
    """Final degree at time n of a node born at time m."""
    if m < 1 or n < m:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    degree = 1
    for t in range(m + 1, n + 1):
        if stream.uniform() * (2 * t - 1) < degree:
            degree += 1
    return degree


def simulate_graph(n: int, stream: TrialStream, residual: Residual = "stub") -> GraphState:
    """Grow a graph to time n, one arriving node (and one edge) per step."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if residual not in RESIDUAL_RULES:
        raise ValueError(f"unknown residual rule {residual!r}")
    degrees = [1]
    stub = 0
    for t in range(2, n + 1):
        x = stream.uniform() * (2 * t - 1)
        acc = 0
        for j, d in enumerate(degrees):
            acc += d
            if x < acc:
                degrees[j] += 1
                degrees.append(1)
                break
        else:
            if residual == "stub":
                stub += 1
                degrees.append(1)
            else:
                degrees.append(2)
        assert sum(degrees) + stub == 2 * t - 1
    return GraphState(n, tuple(degrees), stub)


# vectorized block kernels, bit-compatible with the scalar functions above

def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _block_keys(master_seed: int, start: int, stop: int) -> np.ndarray:
    base = np.uint64(_mix64(master_seed & _MASK))
    idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_array(base + np.uint64(GOLDEN) * idx)


def _block_uniforms(keys: np.ndarray, draw: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = _mix64_array(keys + np.uint64((GOLDEN * draw) & _MASK))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def _marginal_block(keys: np.ndarray, m: int, n: int) -> np.ndarray:
    degree = np.ones(keys.size, dtype=np.int64)
    for draw, t in enumerate(range(m + 1, n + 1), start=1):
        x = _block_uniforms(keys, draw) * (2 * t - 1)
        degree += x < degree
    return degree


def _graph_block(keys: np.ndarray, m: int, n: int, residual: Residual) -> np.ndarray:
    size = keys.size
    degrees = np.zeros((size, n), dtype=np.int64)
    degrees[:, 0] = 1
    rows = np.arange(size)
    for draw, t in enumerate(range(2, n + 1), start=1):
        x = _block_uniforms(keys, draw) * (2 * t - 1)
        cum = np.cumsum(degrees[:, : t - 1], axis=1)
        target = (cum <= x[:, None]).sum(axis=1)
        hit = target < t - 1
        degrees[rows[hit], target[hit]] += 1
        if residual == "stub":
            degrees[:, t - 1] = 1
        else:
            degrees[:, t - 1] = np.where(hit, 1, 2)
    return degrees[:, m - 1]


def _count_block(config: SimulationConfig, start: int, stop: int) -> np.ndarray:
    keys = _block_keys(config.master_seed, start, stop)
    if config.mode == "marginal":
        final = _marginal_block(keys, config.m, config.n)
    else:
        final = _graph_block(keys, config.m, config.n, config.residual)
    return np.bincount(final, minlength=config.n + 2)


def run_trials(config: SimulationConfig, workers: int = 1) -> EmpiricalDistribution:
    """Run every trial of ``config`` and tally the tracked node's final degree.

    Counts depend only on the config; ``workers`` changes wall time, not results.
    """
    blocks = [
        (start, min(start + BLOCK_SIZE, config.trials))
        for start in range(0, config.trials, BLOCK_SIZE)
    ]
    total = np.zeros(config.n + 2, dtype=np.int64)
    try:
        if workers > 1 and len(blocks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_count_block, config, a, b) for a, b in blocks]
                for fut in futures:
                    total += fut.result()
        else:
            for a, b in blocks:
                total += _count_block(config, a, b)
    except MemoryError as exc:
        raise SimulationError(f"out of memory while simulating {config}") from exc
    counts = {k: int(total[k]) for k in range(1, total.size) if total[k]}
    return EmpiricalDistribution(config.m, config.n, config.trials, config.master_seed, counts)


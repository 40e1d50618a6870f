"""Degree distribution of the single-edge preferential-attachment process.

Three routes to the same law: exact recurrence tables, the explicit closed
form, and Monte Carlo simulation of either the single-node Bernoulli chain or
the full growing graph.
"""
from .closed_form import (
    ClosedFormValue,
    a_closed,
    p_closed,
    p_closed_float,
    p_first_degree_max,
    p_first_degree_one,
)
from .combinatorics import LogFloat, factorial, log_factorial, odd_product, sum_term
from .recurrence import (
    DegreeDistribution,
    DegreeTable,
    ScaledTable,
    distribution_at,
    first_node_table,
    general_node_table,
    scaled_table,
)
from .simulator import (
    EmpiricalDistribution,
    GraphState,
    SimulationConfig,
    derive_stream,
    run_trials,
    simulate_graph,
    simulate_marginal,
)

__version__ = "0.1.0"

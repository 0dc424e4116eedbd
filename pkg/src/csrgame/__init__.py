"""Capacitated selfish replication games on networks.

Simulate least-best-response and epsilon-best-response dynamics, compute
optima and Nash equilibria by enumeration, and check the known quality and
convergence bounds.
"""
from ._backend import BACKEND
from .errors import AllocationError, BudgetExceededError, CSRError, GraphError, ValidationError
from .graph import Graph, ball, build_graph, generate
from .game import (
    Allocation,
    Instance,
    make_allocation,
    nearest_holder_distance,
    player_cost,
    radius,
    resource_radius,
    social_cost,
)
from .dynamics import (
    Move,
    Trace,
    ebr_candidates,
    improving_best_response,
    potential,
    run_ebr,
    run_lbr,
)
from .exact import (
    EquilibriumReport,
    brute_force_optimal,
    enumerate_nash,
    is_nash,
    price_of_anarchy,
)
from .analysis import (
    BoundReport,
    approximation_ratio,
    exact_expected_random_cost,
    monte_carlo_random_cost,
    poa_example_closed_forms,
    random_allocation_bound,
    trees_optimal_are_nash,
)

__version__ = "0.1.0"

"""Exhaustive ground truth: optima, Nash equilibria and price of anarchy.

Profiles are enumerated in lexicographic order of their holdings, so index
``t`` gives node ``i`` resource ``(t // k**(n-1-i)) % k``. All reductions
(argmin, filters) respect that order, which keeps reports deterministic.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._backend import kernels
from .errors import BudgetExceededError
from .game import Allocation, Instance, make_allocation, nearest_table

__all__ = [
    "DEFAULT_BUDGET",
    "NashWitness",
    "NashSummary",
    "EquilibriumReport",
    "is_nash",
    "scan",
    "decode_index",
    "brute_force_optimal",
    "optimal_profiles",
    "enumerate_nash",
    "price_of_anarchy",
]

DEFAULT_BUDGET = 10 ** 7
_CHUNK = 1 << 18


class NashWitness(NamedTuple):
    player: int
    resource: int
    cost_gain: int


@dataclass(frozen=True)
class NashSummary:
    profiles: tuple[Allocation, ...]
    min_cost: int
    max_cost: int

    @property
    def count(self) -> int:
        return len(self.profiles)


@dataclass(frozen=True)
class EquilibriumReport:
    optimal_cost: int
    optimal_profile: Allocation
    ne_count: int
    ne_min_cost: int
    ne_max_cost: int
    poa: float

    def as_dict(self) -> dict:
        return {
            "optimal_cost": self.optimal_cost,
            "optimal_profile": list(self.optimal_profile),
            "ne_count": self.ne_count,
            "ne_min_cost": self.ne_min_cost,
            "ne_max_cost": self.ne_max_cost,
            "poa": self.poa,
        }


def is_nash(inst: Instance, P: Sequence[int]) -> tuple[bool, Optional[NashWitness]]:
    """Check that no player can strictly lower its cost by switching resource.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    lowest deviating player and its lowest improving resource.
    """
    P = make_allocation(inst, P)
    table = nearest_table(inst, P)
    for i in range(inst.n):
        held = int(table[i, P[i]])
        for o in range(inst.k):
            if int(table[i, o]) > held:
                return False, NashWitness(i, o, int(table[i, o]) - held)
    return True, None


def _profile_count(inst: Instance, budget: int) -> int:
    total = inst.k ** inst.n
    if total > budget:
        raise BudgetExceededError(
            f"{inst.k}^{inst.n} = {total} profiles exceeds the enumeration budget {budget}")
    return total


def decode_index(t: int, n: int, k: int) -> Allocation:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        t, out[i] = divmod(t, k)
    return tuple(out)


def scan(inst: Instance, check_nash: bool = True, budget: int = DEFAULT_BUDGET,
         workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Social cost and Nash flag of every profile, indexed lexicographically.

    With ``workers > 1`` the index range is split into chunks scanned in a
    thread pool; results are concatenated in index order.
    """
    total = _profile_count(inst, budget)
    g = inst.graph
    bounds = [(lo, min(total, lo + _CHUNK)) for lo in range(0, total, _CHUNK)]

    def run(span):
        return kernels.scan_profiles(g.dist, g.diameter, inst.k, span[0], span[1], check_nash)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    costs = np.concatenate([p[0] for p in parts])
    nash = np.concatenate([p[1] for p in parts]).astype(bool)
    return costs, nash


def brute_force_optimal(inst: Instance, budget: int = DEFAULT_BUDGET) -> tuple[Allocation, int]:
    """Minimum social cost over all ``k**n`` profiles and its lexicographically first minimiser."""
    costs, _ = scan(inst, check_nash=False, budget=budget)
    t = int(np.argmin(costs))
    return decode_index(t, inst.n, inst.k), int(costs[t])


def optimal_profiles(inst: Instance, budget: int = DEFAULT_BUDGET) -> tuple[list[Allocation], int]:
    """Every minimiser of social cost, in lexicographic order."""
    costs, _ = scan(inst, check_nash=False, budget=budget)
    best = int(costs.min())
    return [decode_index(int(t), inst.n, inst.k) for t in np.flatnonzero(costs == best)], best


def enumerate_nash(inst: Instance, budget: int = DEFAULT_BUDGET) -> NashSummary:
    costs, nash = scan(inst, check_nash=True, budget=budget)
    idx = np.flatnonzero(nash)
    profiles = tuple(decode_index(int(t), inst.n, inst.k) for t in idx)
    ne_costs = costs[idx]
    return NashSummary(profiles, int(ne_costs.min()), int(ne_costs.max()))


def price_of_anarchy(inst: Instance, budget: int = DEFAULT_BUDGET) -> EquilibriumReport:
    """Worst equilibrium cost over optimal cost (1.0 when the optimum is 0)."""
    costs, nash = scan(inst, check_nash=True, budget=budget)
    t = int(np.argmin(costs))
    opt = int(costs[t])
    ne_costs = costs[nash]
    ne_max = int(ne_costs.max())
    poa = ne_max / opt if opt > 0 else 1.0
    return EquilibriumReport(opt, decode_index(t, inst.n, inst.k), int(nash.sum()),
                             int(ne_costs.min()), ne_max, poa)

"""CSR game state: instances, allocation profiles, costs and radii.

A resource nobody holds costs every player ``D + 1``; a node holding the
only copy of its resource has radius ``D``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels
from .errors import AllocationError, ValidationError
from .graph import Graph

Allocation = tuple[int, ...]

__all__ = [
    "Allocation",
    "Instance",
    "make_allocation",
    "nearest_table",
    "nearest_holder_distance",
    "player_cost",
    "node_costs",
    "social_cost",
    "radius",
    "radii",
    "resource_radius",
    "initial_allocation",
]


@dataclass(frozen=True)
class Instance:
    """A graph together with the number of resources ``k``."""

    graph: Graph
    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k!r}")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def D(self) -> int:
        return self.graph.diameter

    @property
    def missing_unavoidable(self) -> bool:
        """True when ``k > n``: some resource is absent from every profile."""
        return self.k > self.graph.n


def make_allocation(inst: Instance, holdings: Sequence[int]) -> Allocation:
    """Validate ``holdings`` against ``inst`` and return it as a tuple."""
    P = tuple(int(x) for x in holdings)
    if len(P) != inst.n:
        raise AllocationError(f"allocation has {len(P)} entries, graph has {inst.n} nodes")
    for i, o in enumerate(P):
        if not 0 <= o < inst.k:
            raise AllocationError(f"node {i} holds resource {o}, outside 0..{inst.k - 1}")
    return P


def _check_resource(inst: Instance, o: int) -> None:
    if not 0 <= o < inst.k:
        raise AllocationError(f"resource {o} outside 0..{inst.k - 1}")


def nearest_table(inst: Instance, P: Sequence[int]) -> np.ndarray:
    """``n x k`` table of distances to the nearest holder other than the node itself.

    Entries are ``D + 1`` where no other node holds the resource. Every cost,
    radius and best-response query reduces to lookups in this table.
    """
    return kernels.exclusive_nearest(inst.graph.dist, inst.D, inst.k, np.asarray(P, dtype=np.int64))


def nearest_holder_distance(inst: Instance, P: Sequence[int], i: int, o: int) -> int:
    _check_resource(inst, o)
    if P[i] == o:
        return 0
    row = inst.graph.dist[i]
    best = inst.D + 1
    for j, pj in enumerate(P):
        if pj == o and row[j] < best:
            best = int(row[j])
    return best


def player_cost(inst: Instance, P: Sequence[int], i: int) -> int:
    return sum(nearest_holder_distance(inst, P, i, o) for o in range(inst.k) if o != P[i])


def node_costs(inst: Instance, P: Sequence[int]) -> np.ndarray:
    """Vector of all players' costs."""
    table = nearest_table(inst, P)
    held = table[np.arange(inst.n), np.asarray(P)]
    return table.sum(axis=1) - held


def social_cost(inst: Instance, P: Sequence[int]) -> int:
    return int(node_costs(inst, P).sum())


def radius(inst: Instance, P: Sequence[int], i: int) -> int:
    row = inst.graph.dist[i]
    others = [int(row[j]) for j, pj in enumerate(P) if pj == P[i] and j != i]
    return min(others) if others else inst.D


def radii(inst: Instance, P: Sequence[int]) -> np.ndarray:
    table = nearest_table(inst, P)
    held = table[np.arange(inst.n), np.asarray(P)]
    return np.minimum(held, inst.D)


def resource_radius(inst: Instance, P: Sequence[int], i: int) -> int:
    """Smallest ball radius around ``i`` that contains every resource.

    Returns ``D + 1`` when some resource is held by nobody.
    """
    return max(nearest_holder_distance(inst, P, i, o) for o in range(inst.k))


def initial_allocation(inst: Instance, policy: str = "round-robin", seed: int | None = None) -> Allocation:
    """Starting profile for the dynamics.

    ``all-zero`` puts resource 0 everywhere, ``round-robin`` gives node ``i``
    resource ``i mod k`` and ``random`` draws uniformly with ``seed``.
    """
    if policy == "all-zero":
        return (0,) * inst.n
    if policy == "round-robin":
        return tuple(i % inst.k for i in range(inst.n))
    if policy == "random":
        rng = np.random.default_rng(seed)
        return tuple(int(x) for x in rng.integers(0, inst.k, size=inst.n))
    raise ValidationError(f"unknown init policy {policy!r}")

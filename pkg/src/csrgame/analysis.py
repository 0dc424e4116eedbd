"""Closed-form bounds and statistical checks for CSR games.

Covers the random-allocation upper bound on the optimum and the exact
expectation it dominates, the clique-plus-independent-set family whose price
of anarchy approaches 2, approximation ratios of dynamics outputs, and the
per-step invariants of epsilon-best response traces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .dynamics import Trace, potential_from_radii, replay
from .errors import GraphError, ValidationError
from .exact import DEFAULT_BUDGET, brute_force_optimal, decode_index, scan
from .game import Allocation, Instance, nearest_table, node_costs, radii, social_cost
from .graph import Graph, is_tree

__all__ = [
    "BoundReport",
    "PoaExample",
    "random_allocation_bound",
    "exact_expected_random_cost",
    "profile_average_cost",
    "exact_bound_report",
    "monte_carlo_random_cost",
    "approximation_ratio",
    "poa_example_closed_forms",
    "per_node_anarchy_ratio",
    "trees_optimal_are_nash",
    "ebr_termination_certificate",
    "ebr_step_violations",
]


@dataclass(frozen=True)
class BoundReport:
    bound_value: float
    exact_or_estimate: float
    samples: int = 0
    stderr: float = 0.0

    @property
    def satisfied(self) -> bool:
        return bool(self.exact_or_estimate <= self.bound_value + 3 * self.stderr)


def random_allocation_bound(g: Graph, k: int) -> float:
    """Degree-based upper bound on the optimal social cost.

    ``n(2k-1) + k(k-1) * sum_i (1 - 1/k) ** deg(i)``
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    q = 1.0 - 1.0 / k
    return g.n * (2 * k - 1) + k * (k - 1) * sum(q ** d for d in g.degrees)


def _ball_sizes(g: Graph) -> np.ndarray:
    """``sizes[i, r] = |B(i, r)|`` for ``r = 0..D``."""
    D = g.diameter
    counts = np.stack([np.bincount(row, minlength=D + 1) for row in g.dist])
    return np.cumsum(counts, axis=1)


def exact_expected_random_cost(g: Graph, k: int, include_zero_term: bool = False) -> float:
    """Expected social cost when every node draws its resource uniformly at random.

    Uses the tail-sum ``E[X] = sum_{r>=1} P(X >= r)`` with
    ``P(X >= r) = (1 - 1/k) ** |B(i, r-1)|`` for ``r <= D + 1``. With
    ``include_zero_term`` the ``r = 0`` term is kept as well, which adds
    ``n * k``.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    q = 1.0 - 1.0 / k
    sizes = _ball_sizes(g)  # r-1 = 0..D
    total = float(np.power(q, sizes.astype(np.float64)).sum())
    value = k * total
    if include_zero_term:
        value += g.n * k
    return value


def profile_average_cost(inst: Instance, budget: int = 10 ** 5) -> float:
    """Mean social cost over all ``k**n`` equiprobable profiles, by enumeration."""
    costs, _ = scan(inst, check_nash=False, budget=budget)
    return float(costs.sum()) / costs.size


def exact_bound_report(g: Graph, k: int) -> BoundReport:
    return BoundReport(random_allocation_bound(g, k), exact_expected_random_cost(g, k))


def monte_carlo_random_cost(inst: Instance, samples: int, seed: int,
                            shards: int = 1) -> BoundReport:
    """Sample mean and standard error of the social cost of uniform random profiles.

    With ``shards > 1`` each shard draws from its own child of
    ``SeedSequence(seed)`` and shard statistics are merged in shard order.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if shards < 1:
        raise ValidationError("shards must be >= 1")
    g = inst.graph
    if shards == 1:
        rngs = [np.random.default_rng(seed)]
        sizes = [samples]
    else:
        rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(shards)]
        base, extra = divmod(samples, shards)
        sizes = [base + (1 if s < extra else 0) for s in range(shards)]
    count, mean, m2 = 0, 0.0, 0.0
    for rng, size in zip(rngs, sizes):
        if size == 0:
            continue
        costs = _sample_costs(inst, rng, size).astype(np.float64)
        c_mean = costs.mean()
        c_m2 = float(((costs - c_mean) ** 2).sum())
        # Chan et al. pairwise merge
        delta = c_mean - mean
        total = count + size
        mean += delta * size / total
        m2 += c_m2 + delta ** 2 * count * size / total
        count = total
    stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return BoundReport(random_allocation_bound(g, inst.k), float(mean), count, stderr)


def _sample_costs(inst, rng, size, chunk=1 << 14):
    g = inst.graph
    out = []
    for lo in range(0, size, chunk):
        draw = rng.integers(0, inst.k, size=(min(chunk, size - lo), inst.n))
        out.append(kernels.batch_social_cost(g.dist, g.diameter, inst.k, draw))
    return np.concatenate(out)


def approximation_ratio(inst: Instance, P: Sequence[int], budget: int = DEFAULT_BUDGET) -> float:
    """Social cost of ``P`` over the brute-force optimum (1.0 if the optimum is 0)."""
    _, opt = brute_force_optimal(inst, budget)
    cost = social_cost(inst, P)
    return cost / opt if opt > 0 else 1.0


@dataclass(frozen=True)
class PoaExample:
    ne_cost: int
    opt_cost: int
    ratio: float
    ne_labeling: Allocation
    opt_labeling: Allocation


def poa_example_closed_forms(m: int, k: int) -> PoaExample:
    """Closed-form costs and canonical labelings on ``poa_example(m, k)``.

    In the equilibrium labeling the bottom clique holds resource ``k-1`` and
    the top nodes hold ``0..k-2`` in consecutive groups of ``m``; in the
    optimal one the bottom clique holds ``0..k-2`` and every top node holds
    ``k-1``.
    """
    if m < 1 or k < 2:
        raise ValidationError(f"need m >= 1 and k >= 2, got m={m}, k={k}")
    b = k - 1
    ne_cost = m * b * (2 * k - 3) + b * b
    opt_cost = (m + 1) * b * b
    ratio = 2 - (m + k - 1) / ((m + 1) * b)
    ne = (k - 1,) * b + tuple(t // m for t in range(m * b))
    opt = tuple(range(b)) + (k - 1,) * (m * b)
    return PoaExample(ne_cost, opt_cost, ratio, ne, opt)


def per_node_anarchy_ratio(inst: Instance, budget: int = DEFAULT_BUDGET) -> float:
    """Largest ``C_i(NE) / C_i(OPT)`` over all equilibria, optima and nodes.

    Nodes with zero optimal cost count as ratio 1 if their equilibrium cost is
    also zero, and infinity otherwise.
    """
    costs, nash = scan(inst, check_nash=True, budget=budget)
    opt_idx = np.flatnonzero(costs == costs.min())
    ne_idx = np.flatnonzero(nash)
    opt_nc = np.stack([node_costs(inst, decode_index(int(t), inst.n, inst.k)) for t in opt_idx])
    ne_nc = np.stack([node_costs(inst, decode_index(int(t), inst.n, inst.k)) for t in ne_idx])
    num = ne_nc[:, None, :].astype(np.float64)
    den = opt_nc[None, :, :].astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / np.where(den > 0, den, 1), np.where(num > 0, np.inf, 1.0))
    return float(r.max())


def trees_optimal_are_nash(inst: Instance, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff every social-cost minimiser on a tree is a pure Nash equilibrium."""
    if not is_tree(inst.graph):
        raise GraphError("graph is not a tree")
    costs, nash = scan(inst, check_nash=True, budget=budget)
    return bool(nash[costs == costs.min()].all())


def ebr_termination_certificate(inst: Instance, P: Sequence[int], epsilon: float) -> bool:
    """No node can find a resource at distance ``>= epsilon * r_i``.

    Equivalently every resource is within distance ``< epsilon * r_i`` of
    every node ``i`` (resources held by nobody count as distance ``D``).
    """
    table = nearest_table(inst, P)
    r = radii(inst, P)
    capped = np.minimum(table, inst.D)
    for i in range(inst.n):
        for o in range(inst.k):
            if o != P[i] and capped[i, o] >= epsilon * r[i]:
                return False
    return True


def ebr_step_violations(inst: Instance, P0: Sequence[int], trace: Trace,
                        epsilon: Optional[float] = None) -> list[str]:
    """Replay an epsilon-best response trace and list every broken per-step invariant.

    Checked at each step: the mover's radius grows by at least ``epsilon``;
    a non-mover below the mover's new radius does not shrink; a non-mover at
    or above it stays at or above it; the potential does not increase. Also
    flags more than ``D`` steps without a strict potential decrease.
    """
    eps = trace.epsilon if epsilon is None else epsilon
    out = []
    prev_r = None
    prev_pot = None
    flat = 0
    for t, P in enumerate(replay(P0, trace)):
        r = radii(inst, P)
        pot = potential_from_radii(r, eps)
        if prev_r is not None:
            mv = trace.steps[t - 1].move
            i = mv.player
            new_ri = r[i]
            if new_ri < eps * prev_r[i]:
                out.append(f"step {t}: mover {i} radius {prev_r[i]} -> {new_ri} < eps*old")
            for j in range(inst.n):
                if j == i:
                    continue
                if prev_r[j] < new_ri and r[j] < prev_r[j]:
                    out.append(f"step {t}: node {j} radius shrank {prev_r[j]} -> {r[j]}")
                if prev_r[j] >= new_ri and r[j] < new_ri:
                    out.append(f"step {t}: node {j} radius {r[j]} fell below mover's {new_ri}")
            if pot > prev_pot:
                out.append(f"step {t}: potential rose {prev_pot!r} -> {pot!r}")
            elif not pot < prev_pot:
                flat += 1
        prev_r, prev_pot = r, pot
    if flat > inst.D:
        out.append(f"{flat} non-strict potential steps exceed D={inst.D}")
    return out

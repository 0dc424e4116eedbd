"""Best-response dynamics for CSR games.

Two schedulers are provided:

* least best response (:func:`run_lbr`): among the players that can strictly
  lower their cost, the one with the smallest radius moves to its best
  response;
* epsilon-best response (:func:`run_ebr`): only moves that grow the mover's
  radius by a factor of at least ``epsilon`` are allowed.

Both are deterministic given their inputs. Best responses always minimise
cost; radius only drives scheduling and eligibility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .game import Allocation, Instance, make_allocation, nearest_table

__all__ = [
    "Move",
    "TraceStep",
    "Trace",
    "potential",
    "potential_from_radii",
    "improving_best_response",
    "ebr_candidates",
    "run_lbr",
    "run_ebr",
    "default_lbr_steps",
    "default_ebr_steps",
    "replay",
]


@dataclass(frozen=True)
class Move:
    player: int
    old_resource: int
    new_resource: int
    old_radius: int
    new_radius: int
    cost_gain: int


@dataclass(frozen=True)
class TraceStep:
    step: int
    move: Move
    potential: float
    social_cost: int


@dataclass
class Trace:
    """Ordered record of a dynamics run.

    ``terminated`` is True when the run stopped because no player was
    eligible to move, False when it hit ``max_steps``.
    """

    epsilon: float
    initial_potential: float
    initial_social_cost: int
    steps: list[TraceStep] = field(default_factory=list)
    terminated: bool = False

    @property
    def steps_taken(self) -> int:
        return len(self.steps)

    @property
    def movers(self) -> list[int]:
        return [s.move.player for s in self.steps]

    def potentials(self) -> list[float]:
        return [self.initial_potential] + [s.potential for s in self.steps]


def _log_n(n: int, epsilon: float) -> float:
    return math.log(n) / math.log(epsilon)


def potential_from_radii(radii: Sequence[int], epsilon: float) -> float:
    n = len(radii)
    a = _log_n(n, epsilon)
    r = np.asarray(radii, dtype=np.float64)
    return float(np.power(r, -a).sum())


def potential(inst: Instance, P: Sequence[int], epsilon: float = math.e) -> float:
    """Sum over players of ``radius ** -log_epsilon(n)``; at most ``n``."""
    _check_epsilon(epsilon)
    return potential_from_radii(_radii_from_table(inst, P, nearest_table(inst, P)), epsilon)


def _check_epsilon(epsilon: float) -> None:
    if not epsilon > 1:
        raise ValidationError(f"epsilon must exceed 1, got {epsilon}")


def _radii_from_table(inst, P, table):
    held = table[np.arange(inst.n), np.asarray(P)]
    return np.minimum(held, inst.D)


def _best_in(row: np.ndarray, options, D: int) -> int:
    # lowest cost == farthest nearest-other-holder; then larger radius, then smaller id
    return min(options, key=lambda o: (-int(row[o]), -min(int(row[o]), D), o))


def improving_best_response(inst: Instance, P: Sequence[int], i: int,
                            table: Optional[np.ndarray] = None) -> Optional[Move]:
    """Player ``i``'s cost-minimising switch, or None if nothing strictly improves."""
    if table is None:
        table = nearest_table(inst, P)
    row = table[i]
    cur = P[i]
    best = _best_in(row, range(inst.k), inst.D)
    gain = int(row[best]) - int(row[cur])
    if best == cur or gain <= 0:
        return None
    return Move(i, cur, best, min(int(row[cur]), inst.D), min(int(row[best]), inst.D), gain)


def ebr_candidates(inst: Instance, P: Sequence[int], i: int, epsilon: float = math.e,
                   table: Optional[np.ndarray] = None) -> frozenset[int]:
    """Resources whose adoption would give ``i`` a radius of at least ``epsilon * r_i``."""
    _check_epsilon(epsilon)
    if inst.n == 1:
        return frozenset()
    if table is None:
        table = nearest_table(inst, P)
    row = table[i]
    D = inst.D
    threshold = epsilon * min(int(row[P[i]]), D)
    return frozenset(o for o in range(inst.k) if o != P[i] and min(int(row[o]), D) >= threshold)


def default_lbr_steps(inst: Instance) -> int:
    return 3 * inst.n ** 3 * min(inst.k - 1, inst.D) + inst.D


def default_ebr_steps(inst: Instance, epsilon: float) -> int:
    if inst.n == 1:
        return 0
    return math.ceil(4 * inst.n ** 2 * inst.D ** _log_n(inst.n, epsilon))


def _apply(P: list[int], move: Move) -> None:
    P[move.player] = move.new_resource


def _record(inst, trace, P, move, epsilon):
    table = nearest_table(inst, P)
    r = _radii_from_table(inst, P, table)
    held = table[np.arange(inst.n), np.asarray(P)]
    cost = int((table.sum(axis=1) - held).sum())
    trace.steps.append(TraceStep(trace.steps_taken + 1, move, potential_from_radii(r, epsilon), cost))
    return table


def _start(inst, P0, epsilon):
    P = list(make_allocation(inst, P0))
    table = nearest_table(inst, P)
    held = table[np.arange(inst.n), np.asarray(P)]
    trace = Trace(epsilon, potential_from_radii(np.minimum(held, inst.D), epsilon),
                  int((table.sum(axis=1) - held).sum()))
    return P, table, trace


def run_lbr(inst: Instance, P0: Sequence[int], max_steps: Optional[int] = None,
            epsilon: float = math.e) -> tuple[Allocation, Trace]:
    """Least best response dynamics from ``P0``.

    ``epsilon`` only sets the exponent of the potential recorded in the trace.
    Ties between equal-radius movers go to the smaller node id.
    """
    _check_epsilon(epsilon)
    if max_steps is None:
        max_steps = default_lbr_steps(inst)
    P, table, trace = _start(inst, P0, epsilon)
    idx = np.arange(inst.n)
    while True:
        held = table[idx, np.asarray(P)]
        improvers = np.flatnonzero(table.max(axis=1) > held)
        if improvers.size == 0:
            trace.terminated = True
            break
        if trace.steps_taken >= max_steps:
            break
        r = np.minimum(held[improvers], inst.D)
        i = int(improvers[np.argmin(r)])
        move = improving_best_response(inst, P, i, table)
        _apply(P, move)
        table = _record(inst, trace, P, move, epsilon)
    return tuple(P), trace


def run_ebr(inst: Instance, P0: Sequence[int], epsilon: float = math.e,
            max_steps: Optional[int] = None, selection: str = "min-radius",
            seed: Optional[int] = None) -> tuple[Allocation, Trace]:
    """Epsilon-best response dynamics from ``P0``.

    Parameters
    ----------
    selection : {"min-radius", "random"}
        Which eligible agent moves. ``min-radius`` takes the smallest current
        radius (then smallest id); ``random`` draws uniformly using ``seed``.

    The mover adopts the cheapest resource among its candidates.
    """
    _check_epsilon(epsilon)
    if selection not in ("min-radius", "random"):
        raise ValidationError(f"unknown selection policy {selection!r}")
    if max_steps is None:
        max_steps = default_ebr_steps(inst, epsilon)
    rng = np.random.default_rng(seed)
    P, table, trace = _start(inst, P0, epsilon)
    D = inst.D
    while True:
        eligible = []
        for i in range(inst.n):
            cands = ebr_candidates(inst, P, i, epsilon, table)
            if cands:
                eligible.append((min(int(table[i, P[i]]), D), i, cands))
        if not eligible:
            trace.terminated = True
            break
        if trace.steps_taken >= max_steps:
            break
        if selection == "random":
            r_i, i, cands = eligible[int(rng.integers(len(eligible)))]
        else:
            r_i, i, cands = min(eligible, key=lambda e: (e[0], e[1]))
        row = table[i]
        o = _best_in(row, sorted(cands), D)
        move = Move(i, P[i], o, r_i, min(int(row[o]), D), int(row[o]) - int(row[P[i]]))
        _apply(P, move)
        table = _record(inst, trace, P, move, epsilon)
    return tuple(P), trace


def replay(P0: Sequence[int], trace: Trace) -> Iterator[Allocation]:
    """Yield the profile before the first step and after every step."""
    P = list(P0)
    yield tuple(P)
    for s in trace.steps:
        P[s.move.player] = s.move.new_resource
        yield tuple(P)

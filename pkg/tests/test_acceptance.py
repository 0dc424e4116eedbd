"""Acceptance criteria. Each test prints one PASS/FAIL line."""
import json
import math

import numpy as np
import pytest

from csrgame import Instance
from csrgame.analysis import (ebr_step_violations,
                              ebr_termination_certificate, exact_expected_random_cost,
                              monte_carlo_random_cost, poa_example_closed_forms,
                              profile_average_cost, random_allocation_bound,
                              trees_optimal_are_nash)
from csrgame.cli import run_bench
from csrgame.dynamics import run_ebr, run_lbr
from csrgame.exact import brute_force_optimal, decode_index, is_nash, price_of_anarchy, scan
from csrgame.game import initial_allocation, node_costs, social_cost
from csrgame.graph import (clique, cycle, gnp_connected, iter_connected_graphs,
                           iter_labeled_trees, path, poa_example, random_tree, star)

TOL = 1e-9
EPSILONS = (1.5, 2.0, math.e)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))
        assert ok, detail
    return emit


def _mixed_graph(rng, n_max, seed):
    n = int(rng.integers(3, n_max + 1))
    fam = seed % 5
    if fam == 0:
        return path(n)
    if fam == 1:
        return cycle(n)
    if fam == 2:
        return random_tree(n, seed)
    if fam == 3:
        return star(n)
    return gnp_connected(n, min(1.0, 2.5 / n + 0.05), seed)


# 1 ----------------------------------------------------------------------------

def test_1_poa_example_reproduction(report):
    failures = []
    matched = 0
    for m in range(1, 6):
        for k in range(2, 7):
            ex = poa_example_closed_forms(m, k)
            inst = Instance(poa_example(m, k), k)
            if social_cost(inst, ex.ne_labeling) != m * (k - 1) * (2 * k - 3) + (k - 1) ** 2:
                failures.append(("ne_cost", m, k))
            if not is_nash(inst, ex.ne_labeling)[0]:
                failures.append(("ne_not_nash", m, k))
            if social_cost(inst, ex.opt_labeling) != (m + 1) * (k - 1) ** 2:
                failures.append(("opt_cost", m, k))
            if abs(ex.ne_cost / ex.opt_cost - (2 - (m + k - 1) / ((m + 1) * (k - 1)))) > TOL:
                failures.append(("ratio", m, k))
            if k ** inst.n <= 10 ** 7:
                if brute_force_optimal(inst)[1] != ex.opt_cost:
                    failures.append(("brute", m, k))
                matched += 1
    spot = poa_example_closed_forms(2, 3)
    ok = not failures and (spot.ne_cost, spot.opt_cost) == (16, 12) and abs(spot.ratio - 4 / 3) < TOL
    report("1 Example family closed forms", ok,
           f"{matched} brute-force matches, failures={failures[:5]}")


# 2 ----------------------------------------------------------------------------

def test_2_poa_at_most_3_exhaustive(report):
    graphs = worst = worst_node = 0
    bad = []
    for n in range(1, 6):
        for g in iter_connected_graphs(n):
            graphs += 1
            for k in (2, 3):
                inst = Instance(g, k)
                rep = price_of_anarchy(inst)
                if not rep.ne_max_cost <= 3 * rep.optimal_cost:
                    bad.append(("poa", g.edges, k))
                worst = max(worst, rep.poa)
                costs, nash = scan(inst)
                opt = np.stack([node_costs(inst, decode_index(int(t), n, k))
                                for t in np.flatnonzero(costs == costs.min())])
                ne = np.stack([node_costs(inst, decode_index(int(t), n, k))
                               for t in np.flatnonzero(nash)])
                if not (ne[:, None, :] <= 3 * opt[None, :, :]).all():
                    bad.append(("per-node", g.edges, k))
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.where(opt[None] > 0, ne[:, None] / np.maximum(opt[None], 1), 1.0)
                worst_node = max(worst_node, float(r.max()))
    report("2 PoA <= 3 over all connected graphs n<=5, k in {2,3}", not bad and graphs == 772,
           f"{graphs} graphs, max PoA {worst:.4f}, max per-node ratio {worst_node:.4f}, bad={bad[:3]}")


# 3 ----------------------------------------------------------------------------

def test_3_lbr_step_bounds(report):
    rng = np.random.default_rng(2024)
    bad = []
    small_k = 0
    worst = 0.0
    for s in range(200):
        g = _mixed_graph(rng, 40, s)
        k = int(rng.integers(2, 5))
        inst = Instance(g, k)
        P0 = initial_allocation(inst, "random", s)
        final, trace = run_lbr(inst, P0)
        bound = g.n * min(g.diameter, k - 1)
        worst = max(worst, trace.steps_taken / bound)
        if not (trace.terminated and trace.steps_taken <= bound and is_nash(inst, final)[0]):
            bad.append(("k<5", s, g.n, k, trace.steps_taken, bound))
        small_k += 1
    dense = 0
    for s in range(100):
        n = int(rng.integers(4, 31))
        kind = s % 3
        if kind == 0:
            g = clique(n)
        elif kind == 1:
            g = gnp_connected(n, 0.8, 1000 + s)
            if g.d_min < 2:
                g = clique(n)
        else:
            g = cycle(n)
        k = int(rng.integers(2, g.d_min + 1))
        inst = Instance(g, k)
        assert k <= g.d_min
        P0 = initial_allocation(inst, "random", 1000 + s)
        final, trace = run_lbr(inst, P0)
        bound = 3 * g.n ** 3 * min(k - 1, g.diameter)
        if not (trace.terminated and trace.steps_taken <= bound and is_nash(inst, final)[0]):
            bad.append(("k<=dmin", s, g.n, k, trace.steps_taken, bound))
        dense += 1
    report("3 LBR step bounds and terminal NE", not bad and small_k == 200 and dense == 100,
           f"200 k<5 runs (max steps/bound {worst:.3f}), 100 k<=d_min runs, bad={bad[:3]}")


# 4 / 5 ------------------------------------------------------------------------

def _ebr_suite():
    rng = np.random.default_rng(7)
    for s in range(60):
        g = _mixed_graph(rng, 30, s)
        k = int(rng.integers(2, 6))
        yield Instance(g, k), s
    for m, k in [(1, 3), (2, 3), (3, 2), (1, 4)]:
        yield Instance(poa_example(m, k), k), m
    for s in range(40):
        g = _mixed_graph(rng, 12, 500 + s)
        k = int(rng.integers(2, 4))
        yield Instance(g, k), 500 + s


def test_4_ebr_per_step_invariants(report):
    bad = []
    runs = steps = 0
    for inst, s in _ebr_suite():
        for eps in EPSILONS:
            for init in ("random", "all-zero", "round-robin"):
                P0 = initial_allocation(inst, init, s)
                _, trace = run_ebr(inst, P0, eps)
                runs += 1
                steps += trace.steps_taken
                v = ebr_step_violations(inst, P0, trace)
                bound = 4 * inst.n ** 2 * inst.D ** (math.log(inst.n) / math.log(eps))
                if v or not trace.terminated or trace.steps_taken > bound:
                    bad.append((inst.n, inst.k, eps, init, v[:2], trace.steps_taken))
    report("4 epsilon-BR radius/potential invariants and step bound", not bad,
           f"{runs} runs, {steps} steps checked, bad={bad[:3]}")


def test_5_ebr_approximation(report):
    bad = []
    checked = certs = 0
    worst = 0.0
    for inst, s in _ebr_suite():
        if inst.k ** inst.n > 10 ** 7:
            continue
        _, opt = brute_force_optimal(inst)
        for eps in EPSILONS:
            for init in ("random", "all-zero", "round-robin"):
                final, trace = run_ebr(inst, initial_allocation(inst, init, s), eps)
                cost = social_cost(inst, final)
                checked += 1
                worst = max(worst, cost / opt / (2 * eps + 1) if opt else 0.0)
                if cost > (2 * eps + 1) * opt:
                    bad.append(("ratio", inst.n, inst.k, eps, init, cost, opt))
                if len(set(final)) == inst.k:
                    certs += 1
                    if not ebr_termination_certificate(inst, final, eps):
                        bad.append(("certificate", inst.n, inst.k, eps, init))
    report("5 epsilon-BR (2eps+1)-approximation and termination certificate",
           not bad and checked > 0,
           f"{checked} runs, {certs} certificates, max cost/((2eps+1)opt) {worst:.3f}, bad={bad[:3]}")


# 6 ----------------------------------------------------------------------------

def test_6_random_allocation_bound(report):
    rng = np.random.default_rng(31)
    bad = []
    for s in range(100):
        g = _mixed_graph(rng, 30, s)
        k = int(rng.integers(1, 7))
        exact = exact_expected_random_cost(g, k)
        bound = random_allocation_bound(g, k)
        with_zero = exact_expected_random_cost(g, k, include_zero_term=True)
        if not (exact < bound and with_zero <= bound):
            bad.append(("bound", s, g.n, k, exact, with_zero, bound))
    enumerated = 0
    small = [g for n in range(1, 5) for g in iter_connected_graphs(n)]
    small += [path(8), cycle(9), star(7), random_tree(10, 1), gnp_connected(8, 0.4, 2)]
    for g in small:
        for k in (1, 2, 3, 4):
            if k ** g.n > 10 ** 5:
                continue
            inst = Instance(g, k)
            exact = exact_expected_random_cost(g, k)
            avg = profile_average_cost(inst)
            opt = brute_force_optimal(inst)[1]
            enumerated += 1
            if abs(exact - avg) > TOL or not opt <= exact + TOL:
                bad.append(("enum", g.edges, k, exact, avg, opt))
    spots = [(path(3), 5.0, 11.5), (clique(2), 3.0, 8.0)]
    for g, e, b in spots:
        if abs(exact_expected_random_cost(g, 2) - e) > TOL or abs(random_allocation_bound(g, 2) - b) > TOL:
            bad.append(("spot", g.n))
    mc_checked = 0
    for g in (path(3), clique(2), cycle(7), random_tree(12, 4)):
        for k in (2, 3):
            rep = monte_carlo_random_cost(Instance(g, k), 10 ** 5, seed=100 + g.n + k)
            exact = exact_expected_random_cost(g, k)
            mc_checked += 1
            if abs(rep.exact_or_estimate - exact) > 3 * rep.stderr:
                bad.append(("mc", g.n, k, rep.exact_or_estimate, exact, rep.stderr))
    report("6 Random-allocation bound, exact expectation, Monte Carlo", not bad,
           f"100 bound checks, {enumerated} enumerated, {mc_checked} MC runs, bad={bad[:3]}")


# 7 ----------------------------------------------------------------------------

def test_7_tree_optima_are_nash(report):
    bad = []
    count = 0
    for n in range(1, 8):
        for g in iter_labeled_trees(n):
            for k in (2, 3):
                count += 1
                if not trees_optimal_are_nash(Instance(g, k)):
                    bad.append((g.edges, k))
    report("7 Every optimum on labeled trees n<=7 is a NE", not bad,
           f"{count} (tree, k) cases, bad={bad[:3]}")


# 8 ----------------------------------------------------------------------------

BENCH = {
    "seed": 99,
    "budget": 100000,
    "rows": [
        {"family": "gnp_connected", "params": {"n": 15, "p": 0.25}, "k": 3, "dynamics": "ebr",
         "epsilon": 1.5, "init": "random", "repeats": 4},
        {"family": "random_tree", "params": {"n": 10}, "k": 2, "dynamics": "lbr",
         "init": "random", "repeats": 4},
        {"family": "poa_example", "params": {"m": 2}, "k": 3, "dynamics": "ebr",
         "epsilon": "e", "init": "all-zero"},
    ],
}


def test_8_determinism(report, tmp_path):
    a = run_bench(json.loads(json.dumps(BENCH)))
    b = run_bench(json.loads(json.dumps(BENCH)), workers=4)
    ok = a.encode() == b.encode()
    inst = Instance(gnp_connected(25, 0.2, 5), 4)
    P0 = initial_allocation(inst, "random", 5)
    for eps in EPSILONS:
        ok &= run_ebr(inst, P0, eps) == run_ebr(inst, P0, eps)
    ok &= run_lbr(inst, P0) == run_lbr(inst, P0)
    ok &= run_ebr(inst, P0, 2.0, selection="random", seed=3) == run_ebr(inst, P0, 2.0, selection="random", seed=3)
    report("8 Bench CSV and dynamics traces are reproducible", bool(ok),
           f"bench CSV {len(a.splitlines()) - 1} rows")

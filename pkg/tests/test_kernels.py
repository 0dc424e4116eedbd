"""Compiled and numpy kernels must agree with each other and with brute force."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csrgame import Instance
from csrgame._backend import BACKEND, BACKENDS
from csrgame.graph import clique, cycle, gnp_connected, path, random_tree

from conftest import naive_is_nash, naive_social_cost

backends = pytest.mark.parametrize("kern", list(BACKENDS.values()), ids=list(BACKENDS))


def test_compiled_backend_selected():
    assert "cython" in BACKENDS, "compiled extension not built"
    assert BACKEND in BACKENDS


def _small():
    yield Instance(path(3), 2)
    yield Instance(path(4), 3)
    yield Instance(cycle(5), 3)
    yield Instance(random_tree(6, 4), 2)
    yield Instance(gnp_connected(5, 0.5, 1), 3)
    yield Instance(clique(3), 4)
    yield Instance(path(1), 2)


@backends
@pytest.mark.parametrize("inst", list(_small()), ids=lambda x: f"n{x.n}k{x.k}D{x.D}")
def test_scan_matches_brute_force(kern, inst):
    g = inst.graph
    total = inst.k ** inst.n
    costs, nash = kern.scan_profiles(g.dist, g.diameter, inst.k, 0, total, True)
    for t, P in enumerate(itertools.product(range(inst.k), repeat=inst.n)):
        assert costs[t] == naive_social_cost(inst, P)
        assert bool(nash[t]) == naive_is_nash(inst, P)


@backends
def test_scan_subrange_and_batch(kern):
    inst = Instance(cycle(6), 3)
    g = inst.graph
    full, fn = kern.scan_profiles(g.dist, g.diameter, 3, 0, 729, True)
    part, pn = kern.scan_profiles(g.dist, g.diameter, 3, 100, 250, True)
    assert np.array_equal(full[100:250], part) and np.array_equal(fn[100:250], pn)
    profiles = np.array(list(itertools.product(range(3), repeat=6)))
    assert np.array_equal(kern.batch_social_cost(g.dist, g.diameter, 3, profiles), full)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_backends_agree_on_random_profiles(n, k, seed):
    rng = np.random.default_rng(seed)
    g = gnp_connected(n, 0.4, seed)
    P = rng.integers(0, k, size=(16, n))
    outs = [(kern.exclusive_nearest(g.dist, g.diameter, k, P[0]),
             kern.batch_social_cost(g.dist, g.diameter, k, P)) for kern in BACKENDS.values()]
    for ex, bc in outs[1:]:
        assert np.array_equal(ex, outs[0][0]) and np.array_equal(bc, outs[0][1])


def test_env_var_forces_numpy_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CSRGAME_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import csrgame; print(csrgame.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

import itertools

import pytest

from csrgame import Instance
from csrgame.game import player_cost
from csrgame.graph import clique, cycle, path


@pytest.fixture
def p3():
    return Instance(path(3), 2)


@pytest.fixture
def p5():
    return Instance(path(5), 2)


@pytest.fixture
def c4():
    return Instance(cycle(4), 2)


@pytest.fixture
def k2():
    return Instance(clique(2), 2)


def naive_social_cost(inst, P):
    return sum(player_cost(inst, P, i) for i in range(inst.n))


def naive_is_nash(inst, P):
    for i in range(inst.n):
        c = player_cost(inst, P, i)
        for o in range(inst.k):
            Q = list(P)
            Q[i] = o
            if player_cost(inst, Q, i) < c:
                return False
    return True


def all_profiles(inst):
    return itertools.product(range(inst.k), repeat=inst.n)

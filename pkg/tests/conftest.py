import random

import pytest
from hypothesis import HealthCheck, settings

from equicohom.groups import cyclic, trivial_group
from equicohom.io import load_fixture
from equicohom.simplicial import action_from_nondegenerate, from_nondegenerate, trivial_action

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def circle(N=2):
    return action_from_nondegenerate(from_nondegenerate(N, [["v"], {"e": ["v", "v"]}]), trivial_group(), {})


def torus(N=3):
    X = from_nondegenerate(N, [["v"], {"a": ["v", "v"], "b": ["v", "v"], "c": ["v", "v"]},
                               {"U": ["b", "c", "a"], "L": ["a", "c", "b"]}])
    return action_from_nondegenerate(X, trivial_group(), {})


def klein(N=3):
    X = from_nondegenerate(N, [["v"], {"a": ["v", "v"], "b": ["v", "v"], "c": ["v", "v"]},
                               {"U": ["b", "c", "a"], "L": ["c", "a", "b"]}])
    return action_from_nondegenerate(X, trivial_group(), {})


def free_circle(N=2):
    X = from_nondegenerate(N, [["a", "b"], {"p": ["b", "a"], "q": ["a", "b"]}])
    return action_from_nondegenerate(X, cyclic(2), {1: {"a": "b", "b": "a", "p": "q", "q": "p"}})


def wedge_swap(N=2):
    X = from_nondegenerate(N, [["v"], {"e1": ["v", "v"], "e2": ["v", "v"]}])
    return action_from_nondegenerate(X, cyclic(2), {1: {"e1": "e2", "e2": "e1"}})


def point_z2(N=3):
    return trivial_action(from_nondegenerate(N, [["v"]]), cyclic(2))


SPACES = {"s1": circle, "t2": torus, "k2": klein, "s1_2": free_circle, "w2": wedge_swap, "pt": point_z2}

COHOMOLOGY_FIXTURES = ["s1", "s1_twisted", "s1_2", "w2_swap_twisted", "t2_constant", "t2_twisted",
                       "k2_constant", "k2_orientation", "point_z2_constant", "pt"]


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def docs():
    cache = {}

    def get(name, ring=None):
        key = (name, ring)
        if key not in cache:
            cache[key] = load_fixture(name, ring)
        return cache[key]
    return get

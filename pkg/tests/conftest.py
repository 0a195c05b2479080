import pytest

from coarsehom.groups import GSet, cyclic_group, symmetric_group, trivial_group, trivial_gset
from coarsehom.spaces import make_space, maximal_space, minimal_space, point_space


@pytest.fixture(scope="session")
def triv():
    return trivial_group()


@pytest.fixture(scope="session")
def c2():
    return cyclic_group(2)


@pytest.fixture(scope="session")
def s3():
    return symmetric_group(3)


@pytest.fixture
def pt(triv):
    return point_space(triv)


@pytest.fixture
def three_min(triv):
    return minimal_space(trivial_gset(triv, 3), name="3min")


@pytest.fixture
def free2(c2):
    return GSet(c2, 2, ((0, 1), (1, 0)))


@pytest.fixture
def free2_min(free2):
    return minimal_space(free2, name="C2free")


@pytest.fixture
def chain3(triv):
    gs = trivial_gset(triv, 3)
    return make_space(gs, [frozenset({(0, 1), (1, 0)}), frozenset({(1, 2), (2, 1)})], name="chain3")

import pytest

from clusterbus.geometry import LatticeParams
from clusterbus.protocols import build_cluster_context, build_surface_context


@pytest.fixture(scope="session")
def surface_d2():
    return build_surface_context(LatticeParams(2))


@pytest.fixture(scope="session")
def surface_d3():
    return build_surface_context(LatticeParams(3))


@pytest.fixture(scope="session")
def cluster_d2r3():
    return build_cluster_context(LatticeParams(2, 3))


@pytest.fixture(scope="session")
def cluster_d3r3():
    return build_cluster_context(LatticeParams(3, 3))

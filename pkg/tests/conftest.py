import pytest

from netmine.clustering import cluster
from netmine.graph import giant_component, induced_subgraph
from netmine.synth import DEMO_SPEC, generate


@pytest.fixture(scope="session")
def demo_network():
    """The bundled synthetic network plus its generation truth."""
    return generate(DEMO_SPEC)


@pytest.fixture(scope="session")
def demo_clustered(demo_network):
    """(giant-component network, partition at seed 0, truth) for the demo."""
    net, truth = demo_network
    scoped = induced_subgraph(net, giant_component(net))
    return scoped, cluster(scoped, seed=0), truth

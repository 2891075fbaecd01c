from pathlib import Path

import pytest

from netmine.clustering import cluster
from netmine.graph import giant_component
from netmine.io_formats import load_manifest, read_dataset
from netmine.synth import DEMO_SPEC, generate, two_block_graph, write_dataset


def test_generate_is_deterministic():
    net1, truth1 = generate(DEMO_SPEC)
    net2, truth2 = generate(DEMO_SPEC)
    assert net1 == net2
    assert truth1 == truth2


def test_demo_spec_shape(demo_network):
    net, truth = demo_network
    assert net.node_count == 600
    assert net.schema == {"category": "categorical", "year": "integer"}
    assert [len(b) for b in truth["blocks"]] == [280, 280, 40]
    assert truth["clique_blocks"] == [2]
    # around 2 percent of nodes drop their category
    n_missing = sum(
        1 for nid in net.node_ids if "category" not in net.record(nid).attributes
    )
    assert 0 < n_missing < 40
    # every node keeps a year in its block's range
    for block, spec in zip(truth["blocks"], DEMO_SPEC.blocks):
        lo, hi = spec.year_range
        for nid in block:
            assert lo <= net.record(nid).attributes["year"] <= hi


def test_demo_graph_is_one_component(demo_network):
    net, _ = demo_network
    assert giant_component(net) == frozenset(net.node_ids)


def test_write_dataset_round_trips(tmp_path, demo_network):
    net, truth = demo_network
    write_dataset(net, truth, str(tmp_path))
    manifest = load_manifest(str(tmp_path / "manifest.json"))
    assert manifest.year_attribute == "year"
    again = read_dataset(manifest)
    assert again == net


def test_two_block_graph_recovers():
    net, block_a, block_b = two_block_graph(seed=5)
    assert net.node_count == 60
    assert block_a | block_b == frozenset(net.node_ids)
    p = cluster(net, seed=0)
    assert p.k == 2
    assert {frozenset(p.members(0)), frozenset(p.members(1))} == {block_a, block_b}
    assert p.modularity > 0.3


def test_bundled_dataset_matches_generator(demo_network):
    net, _ = demo_network
    bundle = Path(__file__).resolve().parent.parent / "data" / "synthetic"
    manifest = load_manifest(str(bundle / "manifest.json"))
    bundled = read_dataset(manifest)
    assert bundled == net

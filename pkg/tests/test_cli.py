"""End-to-end checks of the command line stages and their artifacts.

These tests exercise plumbing: artifact files, parent hashes, exit codes
and rerun determinism. Algorithm correctness lives in the module tests,
so where a CLI artifact must carry a number we either freeze it or
compare against the library call the stage wraps.
"""

from __future__ import annotations

import filecmp
import hashlib
import json
import os

import pytest
from click.testing import CliRunner

from netmine import chi_squared_overlay, cluster, geodesic_table_by_attribute
from netmine.cli import main
from netmine.graph import NodeRecord, build_network
from netmine.synth import write_dataset

from toys import colored_cliques_bridged, ring_of_cliques


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def colored_dataset(tmp_path) -> str:
    """Manifest path for the two colored 4-cliques, written as CSV."""
    d = tmp_path / "colored"
    write_dataset(colored_cliques_bridged(4), {}, str(d))
    return str(d / "manifest.json")


@pytest.fixture()
def disconnected_dataset(tmp_path) -> str:
    """Colored cliques plus an isolated two-node component."""
    base = colored_cliques_bridged(4)
    records = list(base.records()) + [
        NodeRecord("x0", {"color": "red", "year": 2010}),
        NodeRecord("x1", {"color": "blue", "year": 2011}),
    ]
    declarations = [(e.u, e.v, e.direction) for e in base.edges] + [("x0", "x1", "none")]
    net = build_network(records, declarations, schema=base.schema)
    d = tmp_path / "disconnected"
    write_dataset(net, {}, str(d))
    return str(d / "manifest.json")


@pytest.fixture(scope="module")
def ring_dataset(tmp_path_factory) -> str:
    """28 five-cliques in a ring; greedy clustering merges neighbours."""
    d = tmp_path_factory.mktemp("ring")
    write_dataset(ring_of_cliques(28, 5), {}, str(d))
    return str(d / "manifest.json")


def _read(out_dir: str, name: str) -> dict:
    with open(os.path.join(out_dir, name), "rb") as fh:
        return json.loads(fh.read())


def _bytes(out_dir: str, name: str) -> bytes:
    with open(os.path.join(out_dir, name), "rb") as fh:
        return fh.read()


def _prepare(runner: CliRunner, manifest: str, out: str, *extra_stages: list[str]) -> None:
    """Run components + cluster (and any further stages) into `out`."""
    stages = [
        ["components", "--manifest", manifest, "--out", out],
        ["cluster", "--out", out],
    ]
    stages.extend(list(s) for s in extra_stages)
    for argv in stages:
        result = runner.invoke(main, argv)
        assert result.exit_code == 0, result.output + result.stderr


# ---------------------------------------------------------------------------
# components


def test_components_writes_network_and_components(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    result = runner.invoke(main, ["components", "--manifest", colored_dataset, "--out", out])

    assert result.exit_code == 0
    assert "n=8 m=13 components=1" in result.output

    net_obj = _read(out, "network.json")
    assert net_obj["kind"] == "network"
    assert net_obj["format_version"] == "1"

    comp_obj = _read(out, "components.json")
    assert comp_obj["kind"] == "components"
    assert comp_obj["sizes"] == [8]
    assert comp_obj["components"][0] == sorted(comp_obj["components"][0])


def test_components_missing_manifest_exits_2(runner, tmp_path):
    result = runner.invoke(
        main, ["components", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]
    )
    assert result.exit_code == 2
    assert "error:" in result.stderr


# ---------------------------------------------------------------------------
# cluster


def test_cluster_writes_partition_and_metagraph(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)

    p_obj = _read(out, "partition.json")
    assert p_obj["kind"] == "partition"
    assert p_obj["k"] == 2
    assert p_obj["seed"] == 0
    assert p_obj["scope"] == "giant"
    assert set(p_obj["assignment"].values()) == {0, 1}

    cg_obj = _read(out, "cluster_graph.json")
    assert cg_obj["kind"] == "cluster_graph"
    assert cg_obj["m"] == 13
    assert [node["size"] for node in cg_obj["nodes"]] == [4, 4]
    assert cg_obj["edges"] == [{"a": 0, "b": 1, "weight": 1}]


def test_cluster_without_components_exits_2(runner, tmp_path):
    out = str(tmp_path / "empty")
    result = runner.invoke(main, ["cluster", "--out", out])
    assert result.exit_code == 2
    assert "network.json not found" in result.stderr


def test_cluster_scope_giant_vs_all(runner, disconnected_dataset, tmp_path):
    giant = str(tmp_path / "giant")
    everything = str(tmp_path / "all")

    _prepare(runner, disconnected_dataset, giant)
    giant_obj = _read(giant, "partition.json")
    assert giant_obj["scope"] == "giant"
    assert len(giant_obj["assignment"]) == 8

    result = runner.invoke(main, ["components", "--manifest", disconnected_dataset, "--out", everything])
    assert result.exit_code == 0
    result = runner.invoke(main, ["cluster", "--scope", "all", "--out", everything])
    assert result.exit_code == 0
    all_obj = _read(everything, "partition.json")
    assert all_obj["scope"] == "all"
    assert len(all_obj["assignment"]) == 10
    assert "x0" in all_obj["assignment"] and "x1" in all_obj["assignment"]


# ---------------------------------------------------------------------------
# null


def test_null_artifact_contents(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out, ["null", "--replicates", "6", "--seed", "3", "--out", out])

    obj = _read(out, "null.json")
    assert obj["kind"] == "null_summary"
    assert obj["replicates"] == 6
    assert obj["seed"] == 3
    assert len(obj["values"]) == 6
    assert obj["threshold"] == max(obj["values"])
    assert obj["observed_q"] == _read(out, "partition.json")["modularity"]
    assert isinstance(obj["significant"], bool)


def test_null_replicate_validation(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    result = runner.invoke(main, ["null", "--replicates", "0", "--out", out])
    assert result.exit_code == 2
    assert "--replicates" in result.stderr


# ---------------------------------------------------------------------------
# test (chi-squared overlay)


def test_overlay_artifact_matches_library(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out, ["test", "--attribute", "color", "--out", out])

    obj = _read(out, "overlay.json")
    assert obj["kind"] == "overlay"
    assert obj["attribute"] == "color"

    net = colored_cliques_bridged(4)
    expected = chi_squared_overlay(net, cluster(net, seed=0), "color")
    by_cluster = {row["cluster"]: row for row in obj["clusters"]}
    for t in expected.clusters:
        row = by_cluster[t.cluster]
        assert row["statistic"] == pytest.approx(t.statistic, abs=1e-12)
        assert row["p_value"] == pytest.approx(t.p_value, abs=1e-12)
        assert row["df"] == t.df


def test_overlay_jackknife_flag_changes_reference(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(
        runner,
        colored_dataset,
        out,
        ["test", "--attribute", "color", "--jackknife", "--out", out],
    )
    obj = _read(out, "overlay.json")
    stats = sorted(row["statistic"] for row in obj["clusters"])
    assert stats[0] == pytest.approx(16.0 / 3.0, abs=1e-12)


def test_overlay_unknown_attribute_exits_2(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    result = runner.invoke(main, ["test", "--attribute", "shoe_size", "--out", out])
    assert result.exit_code == 2
    assert "shoe_size" in result.stderr


# ---------------------------------------------------------------------------
# geodesics


def test_geodesics_by_attribute_artifacts(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(
        runner,
        colored_dataset,
        out,
        ["geodesics", "--by", "attribute", "--attribute", "color", "--out", out],
    )

    obj = _read(out, "geodesic_attribute.json")
    assert obj["kind"] == "geodesic_table"

    net = colored_cliques_bridged(4)
    expected = geodesic_table_by_attribute(net, net.node_ids, "color")
    assert obj["labels"] == list(expected.labels)
    assert obj["global_count"] == expected.global_count
    assert obj["global_sum"] == expected.global_sum

    csv_text = _bytes(out, "geodesic_attribute.csv").decode("utf-8")
    assert csv_text.splitlines()[0] == "," + ",".join(expected.labels)


def test_geodesics_by_groups_artifacts(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    groups_path = tmp_path / "groups.json"
    groups_path.write_text(json.dumps({"0": "left", "1": "right"}), encoding="utf-8")
    _prepare(
        runner,
        colored_dataset,
        out,
        ["geodesics", "--by", "groups", "--groups", str(groups_path), "--out", out],
    )

    obj = _read(out, "geodesic_groups.json")
    assert obj["kind"] == "geodesic_table"
    assert obj["labels"] == ["left", "right"]
    assert os.path.exists(os.path.join(out, "geodesic_groups.csv"))


def test_geodesics_flag_validation(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)

    result = runner.invoke(main, ["geodesics", "--by", "attribute", "--out", out])
    assert result.exit_code == 2
    assert "--attribute is required" in result.stderr

    result = runner.invoke(main, ["geodesics", "--by", "groups", "--out", out])
    assert result.exit_code == 2
    assert "--groups is required" in result.stderr


# ---------------------------------------------------------------------------
# refine


def test_refine_rejected_keeps_partition(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    parent_hash = hashlib.sha256(_bytes(out, "partition.json")).hexdigest()

    result = runner.invoke(
        main,
        ["refine", "--cluster", "0", "--replicates", "5", "--seed", "0", "--out", out],
    )
    assert result.exit_code == 0
    assert "cluster 0: rejected" in result.output

    refined = _read(out, "refined.json")
    assert refined["parent"] == parent_hash
    assert refined["step"] == {"kind": "refine", "affected": []}
    assert refined["k"] == 2
    assert refined["assignment"] == _read(out, "partition.json")["assignment"]

    report = _read(out, "refine_report.json")
    assert report["kind"] == "refine_report"
    assert report["parent"] == parent_hash
    assert report["targets"] == [0]
    assert report["k_before"] == 2 and report["k_after"] == 2
    verdict = report["verdicts"][0]
    assert verdict["cluster"] == 0
    assert verdict["accepted"] is False


def test_refine_accepted_splits_merged_cliques(runner, ring_dataset, tmp_path):
    """Resolution-limit ring: a merged clique pair beats its own null.

    Frozen from the library gate on ring_of_cliques(28, 5), cluster 0,
    replicates=5, seed=0: accepted with sub_k=2, sub_q = 19/42 and
    threshold 0.26190476190476186.
    """
    out = str(tmp_path / "out")
    _prepare(runner, ring_dataset, out)

    before = _read(out, "partition.json")
    assert before["k"] == 16
    members_before = [nid for nid, c in before["assignment"].items() if c == 0]
    assert len(members_before) == 10

    result = runner.invoke(
        main,
        ["refine", "--cluster", "0", "--replicates", "5", "--seed", "0", "--out", out],
    )
    assert result.exit_code == 0
    assert "cluster 0: accepted" in result.output
    assert "k: 16 -> 17" in result.output

    report = _read(out, "refine_report.json")
    verdict = report["verdicts"][0]
    assert verdict["accepted"] is True
    assert verdict["sub_k"] == 2
    assert verdict["sub_q"] == pytest.approx(19.0 / 42.0, abs=1e-12)
    assert verdict["threshold"] == pytest.approx(0.26190476190476186, abs=1e-12)

    refined = _read(out, "refined.json")
    assert refined["k"] == 17
    assert refined["step"]["kind"] == "refine"
    # the split must separate the two constituent five-cliques exactly
    pieces: dict[int, set[str]] = {}
    for nid in members_before:
        pieces.setdefault(refined["assignment"][nid], set()).add(nid)
    assert sorted(len(p) for p in pieces.values()) == [5, 5]
    for piece in pieces.values():
        assert len({nid[:3] for nid in piece}) == 1


def test_refine_unknown_cluster_exits_2(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    result = runner.invoke(main, ["refine", "--cluster", "7", "--out", out])
    assert result.exit_code == 2


def test_refine_without_partition_exits_2(runner, tmp_path):
    out = str(tmp_path / "none")
    result = runner.invoke(main, ["refine", "--cluster", "0", "--out", out])
    assert result.exit_code == 2
    assert "partition.json not found" in result.stderr


# ---------------------------------------------------------------------------
# coarsen


def test_coarsen_artifacts_and_hash_chain(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    parent_hash = hashlib.sha256(_bytes(out, "partition.json")).hexdigest()

    result = runner.invoke(main, ["coarsen", "--target-k", "1", "--out", out])
    assert result.exit_code == 0

    coarsened = _read(out, "coarsened.json")
    assert coarsened["parent"] == parent_hash
    assert coarsened["k"] == 1
    assert coarsened["step"]["kind"] == "coarsen"
    assert coarsened["modularity"] == pytest.approx(0.0, abs=1e-15)

    report = _read(out, "coarsen_report.json")
    assert report["kind"] == "coarsen_report"
    assert report["target_k"] == 1
    assert report["k_before"] == 2 and report["k_after"] == 1


def test_coarsen_bad_target_exits_2(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    for bad in ("0", "2", "9"):
        result = runner.invoke(main, ["coarsen", "--target-k", bad, "--out", out])
        assert result.exit_code == 2, bad


# ---------------------------------------------------------------------------
# layout


def test_layout_artifacts_and_determinism(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(
        runner,
        colored_dataset,
        out,
        ["test", "--attribute", "color", "--out", out],
        ["layout", "--seed", "1", "--out", out],
    )

    obj = _read(out, "layout.json")
    assert obj["kind"] == "layout"
    assert len(obj["nodes"]) == 2
    for node in obj["nodes"]:
        assert {"id", "x", "y", "radius", "darkness", "shape", "atypical", "value"} <= set(node)
    svg1 = _bytes(out, "layout.svg")
    assert svg1.startswith(b"<?xml")

    first = _bytes(out, "layout.json")
    result = runner.invoke(main, ["layout", "--seed", "1", "--out", out])
    assert result.exit_code == 0
    assert _bytes(out, "layout.json") == first
    assert _bytes(out, "layout.svg") == svg1


def test_layout_without_overlay_is_bare(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out, ["layout", "--out", out])
    obj = _read(out, "layout.json")
    for node in obj["nodes"]:
        assert node["atypical"] is False
        assert node["value"] is None


def test_layout_flag_validation(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)

    result = runner.invoke(main, ["layout", "--iterations", "-1", "--out", out])
    assert result.exit_code == 2

    result = runner.invoke(main, ["layout", "--alpha", "0.0", "--out", out])
    assert result.exit_code == 2


# ---------------------------------------------------------------------------
# run (full pipeline)


def test_run_pipeline_writes_everything(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    result = runner.invoke(
        main,
        ["run", "--manifest", colored_dataset, "--replicates", "4", "--seed", "1", "--out", out],
    )
    assert result.exit_code == 0, result.stderr

    for name in (
        "network.json",
        "components.json",
        "partition.json",
        "cluster_graph.json",
        "null.json",
        "overlay.json",
        "geodesic_attribute.json",
        "geodesic_attribute.csv",
        "yearly.json",
        "yearly.csv",
        "layout.json",
        "layout.svg",
        "summary.json",
    ):
        assert os.path.exists(os.path.join(out, name)), name

    summary = _read(out, "summary.json")
    assert summary["kind"] == "summary"
    assert summary["attribute"] == "color"
    assert summary["seed"] == 1
    assert summary["replicates"] == 4
    assert summary["n"] == 8 and summary["m"] == 13
    assert summary["k"] == 2
    assert isinstance(summary["atypical_clusters"], int)


def test_run_is_byte_identical_across_reruns(runner, colored_dataset, tmp_path):
    out1 = str(tmp_path / "one")
    out2 = str(tmp_path / "two")
    for out in (out1, out2):
        result = runner.invoke(
            main,
            ["run", "--manifest", colored_dataset, "--replicates", "4", "--out", out],
        )
        assert result.exit_code == 0

    names = sorted(os.listdir(out1))
    assert names == sorted(os.listdir(out2))
    match, mismatch, errors = filecmp.cmpfiles(out1, out2, names, shallow=False)
    assert mismatch == [] and errors == []
    assert sorted(match) == names


def test_run_year_range_validation(runner, colored_dataset, tmp_path):
    result = runner.invoke(
        main,
        ["run", "--manifest", colored_dataset, "--year-range", "abc", "--out", str(tmp_path / "o")],
    )
    assert result.exit_code == 2
    assert "--year-range" in result.stderr


def test_out_env_var_is_honored(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "via_env")
    result = runner.invoke(
        main,
        ["components", "--manifest", colored_dataset],
        env={"NETMINE_OUT": out},
    )
    assert result.exit_code == 0
    assert os.path.exists(os.path.join(out, "network.json"))


# ---------------------------------------------------------------------------
# artifact corruption


def test_corrupt_artifact_json_exits_2(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    with open(os.path.join(out, "partition.json"), "wb") as fh:
        fh.write(b"{ not json")
    result = runner.invoke(main, ["null", "--replicates", "2", "--out", out])
    assert result.exit_code == 2


def test_wrong_artifact_kind_exits_2(runner, colored_dataset, tmp_path):
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    net_bytes = _bytes(out, "network.json")
    with open(os.path.join(out, "partition.json"), "wb") as fh:
        fh.write(net_bytes)
    result = runner.invoke(main, ["null", "--replicates", "2", "--out", out])
    assert result.exit_code == 2


def test_unexpected_artifact_shape_exits_3(runner, colored_dataset, tmp_path):
    """Valid envelope but missing payload keys is a genuine bug signal."""
    out = str(tmp_path / "out")
    _prepare(runner, colored_dataset, out)
    stub = json.dumps({"format_version": "1", "kind": "partition"}).encode()
    with open(os.path.join(out, "partition.json"), "wb") as fh:
        fh.write(stub)
    result = runner.invoke(main, ["null", "--replicates", "2", "--out", out])
    assert result.exit_code == 3

"""Command-line pipeline.

Each subcommand reads the artifacts earlier stages wrote into the output
directory and writes its own. Every artifact is canonical JSON (or SVG/CSV
rendered from it), so the same configuration and seed always reproduce the
same bytes. Exit codes: 0 ok, 2 rejected input or configuration, 3 internal
failure.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import io_formats as iof
from .clustering import build_cluster_graph, cluster, coarsen, refine
from .errors import MissingArtifact, NetmineError
from .graph import Network, connected_components, induced_subgraph
from .layout import DEFAULT_ITERATIONS, fr_layout, style_overlay
from .significance import (
    DEFAULT_REPLICATES,
    DEFAULT_SWAPS_PER_EDGE,
    gate_refinement,
    is_significant,
    null_threshold,
)
from .stats import (
    chi_squared_overlay,
    geodesic_table_by_attribute,
    geodesic_table_by_groups,
    yearly_distribution,
)

OUT_ENVVAR = "NETMINE_OUT"


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NetmineError as exc:
        _fail(str(exc), 2)
    except OSError as exc:
        _fail(str(exc), 2)
    except ValueError as exc:
        _fail(str(exc), 2)
    except Exception as exc:  # pragma: no cover - genuine bugs
        _fail(f"{type(exc).__name__}: {exc}", 3)


def _write(out_dir: str, name: str, data: bytes) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "wb") as fh:
        fh.write(data)
    return path


def _read_artifact(out_dir: str, name: str) -> dict:
    path = os.path.join(out_dir, name)
    if not os.path.exists(path):
        raise MissingArtifact(
            f"{name} not found in {out_dir}; run the producing stage first"
        )
    with open(path, "rb") as fh:
        return json.loads(fh.read())


def _artifact_bytes(out_dir: str, name: str) -> bytes:
    path = os.path.join(out_dir, name)
    if not os.path.exists(path):
        raise MissingArtifact(f"{name} not found in {out_dir}")
    with open(path, "rb") as fh:
        return fh.read()


def _load_network(out_dir: str) -> Network:
    return iof.network_from_obj(_read_artifact(out_dir, "network.json"))


def _load_partition_with_net(out_dir: str, name: str):
    """Partition artifact plus the network induced on its scope."""
    obj = _read_artifact(out_dir, name)
    p = iof.partition_from_obj(obj)
    net = _load_network(out_dir)
    scoped = induced_subgraph(net, p.scope)
    return net, scoped, p


_out_option = click.option(
    "--out",
    envvar=OUT_ENVVAR,
    default="out",
    show_default=True,
    help=f"artifact directory (env {OUT_ENVVAR})",
)


@click.group()
def main():
    """Visual mining of attribute-labeled networks."""


# ---------------------------------------------------------------------------
# stages


def _stage_components(manifest_path: str, out_dir: str) -> dict:
    manifest = iof.load_manifest(manifest_path)
    net = iof.read_dataset(manifest)
    comps = connected_components(net)
    obj = {
        "format_version": iof.FORMAT_VERSION,
        "kind": "components",
        "sizes": [len(c) for c in comps],
        "components": [sorted(c) for c in comps],
    }
    _write(out_dir, "network.json", iof.canonical_json_bytes(iof.network_to_obj(net)))
    _write(out_dir, "components.json", iof.canonical_json_bytes(obj))
    return {"n": net.node_count, "m": net.edge_count, "sizes": obj["sizes"]}


def _stage_cluster(out_dir: str, seed: int, scope: str) -> dict:
    net = _load_network(out_dir)
    comp_obj = _read_artifact(out_dir, "components.json")
    if scope == "giant":
        keep = comp_obj["components"][0] if comp_obj["components"] else []
        scoped = induced_subgraph(net, keep)
    else:
        scoped = net
    p = cluster(scoped, seed)
    cg = build_cluster_graph(scoped, p)
    _write(
        out_dir,
        "partition.json",
        iof.canonical_json_bytes(
            iof.partition_to_obj(p, seed=seed, scope=scope, parent=None)
        ),
    )
    _write(
        out_dir,
        "cluster_graph.json",
        iof.canonical_json_bytes(iof.cluster_graph_to_obj(cg, scoped.edge_count)),
    )
    return {"k": p.k, "modularity": p.modularity, "n": scoped.node_count}


def _stage_null(out_dir: str, replicates: int, seed: int, swaps: int, partition_name: str) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    summary = null_threshold(scoped, replicates, seed, swaps)
    significant = is_significant(p.modularity, summary)
    obj = {
        "format_version": iof.FORMAT_VERSION,
        "kind": "null_summary",
        "replicates": summary.replicates,
        "swaps_per_edge": summary.swaps_per_edge,
        "seed": summary.seed,
        "values": list(summary.values),
        "threshold": summary.threshold,
        "degree_fingerprint": summary.degree_fingerprint,
        "observed_q": p.modularity,
        "significant": significant,
    }
    _write(out_dir, "null.json", iof.canonical_json_bytes(obj))
    return {"threshold": summary.threshold, "significant": significant}


def _stage_test(out_dir: str, attribute: str, jackknife: bool, partition_name: str) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    overlay = chi_squared_overlay(
        scoped, p, attribute, include_cluster_in_global=not jackknife
    )
    _write(out_dir, "overlay.json", iof.canonical_json_bytes(iof.overlay_to_obj(overlay)))
    return {"attribute": attribute, "clusters": len(overlay.clusters)}


def _stage_layout(
    out_dir: str,
    seed: int,
    iterations: int,
    partition_name: str,
    category: str | None,
    alpha: float,
) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    cg = build_cluster_graph(scoped, p)
    lay = fr_layout(cg, seed, iterations)
    overlay_path = os.path.join(out_dir, "overlay.json")
    if os.path.exists(overlay_path):
        overlay = iof.overlay_from_obj(_read_artifact(out_dir, "overlay.json"))
        styled = style_overlay(lay, overlay, category, alpha)
        obj = iof.layout_to_obj(styled)
    else:
        obj = iof.bare_layout_to_obj(lay)
    _write(out_dir, "layout.json", iof.canonical_json_bytes(obj))
    _write(out_dir, "layout.svg", iof.layout_svg(obj).encode("utf-8"))
    return {"meta_nodes": len(obj["nodes"])}


def _stage_geodesics_attribute(out_dir: str, attribute: str, partition_name: str) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    table = geodesic_table_by_attribute(scoped, p.scope, attribute)
    _write(
        out_dir,
        "geodesic_attribute.json",
        iof.canonical_json_bytes(iof.geodesic_to_obj(table)),
    )
    _write(out_dir, "geodesic_attribute.csv", iof.geodesic_csv(table).encode("utf-8"))
    return {"labels": list(table.labels), "global_mean": table.global_mean}


def _stage_yearly(
    out_dir: str,
    year_attribute: str,
    class_attribute: str,
    partition_name: str,
    year_range: tuple[int, int] | None,
) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    table = yearly_distribution(
        scoped, p.scope, year_attribute, class_attribute, year_range
    )
    _write(out_dir, "yearly.json", iof.canonical_json_bytes(iof.yearly_to_obj(table)))
    _write(out_dir, "yearly.csv", iof.yearly_csv(table).encode("utf-8"))
    return {"years": len(table.years)}


# ---------------------------------------------------------------------------
# subcommands


@main.command()
@click.option("--manifest", required=True, type=click.Path())
@_out_option
def components(manifest, out):
    """Ingest a dataset and report its connected components."""
    info = _guard(_stage_components, manifest, out)
    click.echo(f"n={info['n']} m={info['m']} components={len(info['sizes'])}")
    click.echo("sizes: " + " ".join(str(s) for s in info["sizes"][:10]))


@main.command(name="cluster")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option(
    "--scope",
    default="giant",
    show_default=True,
    type=click.Choice(["giant", "all"]),
    help="cluster the largest component only, or everything",
)
@_out_option
def cluster_cmd(seed, scope, out):
    """Cluster by greedy modularity maximization."""
    info = _guard(_stage_cluster, out, seed, scope)
    click.echo(f"k={info['k']} Q={info['modularity']:.4f} n={info['n']}")


@main.command()
@click.option("--replicates", default=DEFAULT_REPLICATES, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--swaps", default=DEFAULT_SWAPS_PER_EDGE, show_default=True, type=int)
@click.option("--partition", "partition_name", default="partition.json", show_default=True)
@_out_option
def null(replicates, seed, swaps, partition_name, out):
    """Modularity threshold from degree-preserving random replicates."""
    if replicates < 1:
        _fail(f"--replicates must be >= 1, got {replicates}", 2)
    if swaps < 1:
        _fail(f"--swaps must be >= 1, got {swaps}", 2)
    info = _guard(_stage_null, out, replicates, seed, swaps, partition_name)
    click.echo(
        f"threshold={info['threshold']:.4f} significant={info['significant']}"
    )


def _stage_refine(
    out_dir: str, targets: list[int], seed: int, replicates: int, swaps: int
) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, "partition.json")
    parent_hash = iof.sha256_hex(_artifact_bytes(out_dir, "partition.json"))
    verdicts = []
    accepted_targets = []
    for target in sorted(set(targets)):
        gate = gate_refinement(scoped, p, target, replicates, seed, swaps)
        verdicts.append(
            {
                "cluster": target,
                "accepted": gate.accepted,
                "sub_k": gate.sub_k,
                "sub_q": gate.sub_q,
                "threshold": gate.summary.threshold if gate.summary else None,
            }
        )
        if gate.accepted:
            accepted_targets.append(target)
    child, step = refine(scoped, p, accepted_targets, seed)
    _write(
        out_dir,
        "refined.json",
        iof.canonical_json_bytes(
            iof.partition_to_obj(
                child,
                seed=seed,
                parent=parent_hash,
                step={"kind": "refine", "affected": list(step.affected)},
            )
        ),
    )
    report = {
        "format_version": iof.FORMAT_VERSION,
        "kind": "refine_report",
        "parent": parent_hash,
        "targets": sorted(set(targets)),
        "verdicts": verdicts,
        "k_before": p.k,
        "k_after": child.k,
        "modularity_before": p.modularity,
        "modularity_after": child.modularity,
    }
    _write(out_dir, "refine_report.json", iof.canonical_json_bytes(report))
    return report


@main.command()
@click.option("--cluster", "targets", multiple=True, type=int, required=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--replicates", default=DEFAULT_REPLICATES, show_default=True, type=int)
@click.option("--swaps", default=DEFAULT_SWAPS_PER_EDGE, show_default=True, type=int)
@_out_option
def refine_cmd(targets, seed, replicates, swaps, out):
    """Split clusters whose substructure beats their own null model."""
    if replicates < 1:
        _fail(f"--replicates must be >= 1, got {replicates}", 2)
    report = _guard(_stage_refine, out, list(targets), seed, replicates, swaps)
    for verdict in report["verdicts"]:
        state = "accepted" if verdict["accepted"] else "rejected"
        click.echo(f"cluster {verdict['cluster']}: {state}")
    click.echo(f"k: {report['k_before']} -> {report['k_after']}")


def _stage_coarsen(out_dir: str, target_k: int) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, "partition.json")
    parent_hash = iof.sha256_hex(_artifact_bytes(out_dir, "partition.json"))
    child, step = coarsen(scoped, p, target_k)
    _write(
        out_dir,
        "coarsened.json",
        iof.canonical_json_bytes(
            iof.partition_to_obj(
                child,
                parent=parent_hash,
                step={"kind": "coarsen", "affected": list(step.affected)},
            )
        ),
    )
    report = {
        "format_version": iof.FORMAT_VERSION,
        "kind": "coarsen_report",
        "parent": parent_hash,
        "target_k": target_k,
        "k_before": p.k,
        "k_after": child.k,
        "modularity_before": p.modularity,
        "modularity_after": child.modularity,
    }
    _write(out_dir, "coarsen_report.json", iof.canonical_json_bytes(report))
    return report


@main.command(name="coarsen")
@click.option("--target-k", required=True, type=int)
@_out_option
def coarsen_cmd(target_k, out):
    """Merge adjacent clusters greedily down to a target count."""
    report = _guard(_stage_coarsen, out, target_k)
    click.echo(
        f"k: {report['k_before']} -> {report['k_after']} "
        f"Q: {report['modularity_before']:.4f} -> {report['modularity_after']:.4f}"
    )


@main.command(name="test")
@click.option("--attribute", required=True)
@click.option("--jackknife", is_flag=True, help="exclude each cluster from its reference distribution")
@click.option("--partition", "partition_name", default="partition.json", show_default=True)
@_out_option
def test_cmd(attribute, jackknife, partition_name, out):
    """Chi-squared overlay of an attribute over all clusters."""
    info = _guard(_stage_test, out, attribute, jackknife, partition_name)
    click.echo(f"tested {info['clusters']} clusters against {attribute!r}")


@main.command()
@click.option("--by", type=click.Choice(["attribute", "groups"]), default="attribute", show_default=True)
@click.option("--attribute", default=None)
@click.option("--groups", "groups_file", type=click.Path(), default=None)
@click.option("--partition", "partition_name", default="partition.json", show_default=True)
@_out_option
def geodesics(by, attribute, groups_file, partition_name, out):
    """Mean shortest-path tables by attribute class or cluster group."""
    if by == "attribute":
        if not attribute:
            _fail("--attribute is required with --by attribute", 2)
        info = _guard(_stage_geodesics_attribute, out, attribute, partition_name)
        click.echo(
            "labels: " + " ".join(info["labels"])
            + (f" global_mean={info['global_mean']:.4f}" if info["global_mean"] else "")
        )
    else:
        if not groups_file:
            _fail("--groups is required with --by groups", 2)
        info = _guard(_stage_geodesics_groups, out, groups_file, partition_name)
        click.echo("labels: " + " ".join(info["labels"]))


def _stage_geodesics_groups(out_dir: str, groups_file: str, partition_name: str) -> dict:
    _, scoped, p = _load_partition_with_net(out_dir, partition_name)
    with open(groups_file, encoding="utf-8") as fh:
        raw = json.load(fh)
    groups = {int(c): str(label) for c, label in raw.items()}
    table = geodesic_table_by_groups(scoped, p, groups)
    _write(
        out_dir,
        "geodesic_groups.json",
        iof.canonical_json_bytes(iof.geodesic_to_obj(table)),
    )
    _write(out_dir, "geodesic_groups.csv", iof.geodesic_csv(table).encode("utf-8"))
    return {"labels": list(table.labels)}


@main.command(name="layout")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--iterations", default=DEFAULT_ITERATIONS, show_default=True, type=int)
@click.option("--partition", "partition_name", default="partition.json", show_default=True)
@click.option("--category", default=None, help="style by this category's residual")
@click.option("--alpha", default=0.05, show_default=True, type=float)
@_out_option
def layout_cmd(seed, iterations, partition_name, category, alpha, out):
    """Force-directed metagraph layout, styled by overlay.json if present."""
    if iterations < 0:
        _fail("--iterations must be >= 0", 2)
    if not 0.0 < alpha < 1.0:
        _fail(f"--alpha must be in (0, 1), got {alpha}", 2)
    info = _guard(_stage_layout, out, seed, iterations, partition_name, category, alpha)
    click.echo(f"laid out {info['meta_nodes']} meta-nodes")


@main.command()
@click.option("--manifest", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--replicates", default=DEFAULT_REPLICATES, show_default=True, type=int)
@click.option("--swaps", default=DEFAULT_SWAPS_PER_EDGE, show_default=True, type=int)
@click.option("--attribute", default=None, help="categorical attribute for overlays")
@click.option("--category", default=None)
@click.option("--alpha", default=0.05, show_default=True, type=float)
@click.option("--scope", default="giant", show_default=True, type=click.Choice(["giant", "all"]))
@click.option("--iterations", default=DEFAULT_ITERATIONS, show_default=True, type=int)
@click.option("--year-range", default=None, help="inclusive MIN:MAX filter for yearly tables")
@_out_option
def run(manifest, seed, replicates, swaps, attribute, category, alpha, scope, iterations, year_range, out):
    """Full pipeline: ingest, components, cluster, null, test, layout, tables."""
    if replicates < 1:
        _fail(f"--replicates must be >= 1, got {replicates}", 2)
    if swaps < 1:
        _fail(f"--swaps must be >= 1, got {swaps}", 2)
    if not 0.0 < alpha < 1.0:
        _fail(f"--alpha must be in (0, 1), got {alpha}", 2)
    parsed_range = None
    if year_range:
        try:
            lo, hi = year_range.split(":")
            parsed_range = (int(lo), int(hi))
        except ValueError:
            _fail(f"--year-range expects MIN:MAX, got {year_range!r}", 2)
    summary = _guard(
        _run_pipeline,
        manifest, out, seed, replicates, swaps, attribute,
        category, alpha, scope, iterations, parsed_range,
    )
    for line in summary["lines"]:
        click.echo(line)


def _run_pipeline(
    manifest_path, out_dir, seed, replicates, swaps, attribute,
    category, alpha, scope, iterations, year_range,
):
    comp_info = _stage_components(manifest_path, out_dir)
    clu_info = _stage_cluster(out_dir, seed, scope)
    null_info = _stage_null(out_dir, replicates, seed, swaps, "partition.json")

    manifest = iof.load_manifest(manifest_path)
    if attribute is None:
        categorical = sorted(
            name for name, kind in manifest.schema.items() if kind == "categorical"
        )
        attribute = categorical[0] if categorical else None

    atypical = None
    if attribute is not None:
        _stage_test(out_dir, attribute, False, "partition.json")
        overlay_obj = _read_artifact(out_dir, "overlay.json")
        atypical = sum(1 for t in overlay_obj["clusters"] if t["p_value"] < alpha)
        _stage_geodesics_attribute(out_dir, attribute, "partition.json")
        if manifest.year_attribute:
            _stage_yearly(
                out_dir, manifest.year_attribute, attribute, "partition.json", year_range
            )
    _stage_layout(out_dir, seed, iterations, "partition.json", category, alpha)

    lines = [
        f"components: {len(comp_info['sizes'])} (giant {comp_info['sizes'][0] if comp_info['sizes'] else 0})",
        f"clusters: k={clu_info['k']} Q={clu_info['modularity']:.4f}",
        f"null threshold: {null_info['threshold']:.4f} significant={null_info['significant']}",
    ]
    if atypical is not None:
        lines.append(f"atypical clusters at alpha={alpha}: {atypical}")
    summary_obj = {
        "format_version": iof.FORMAT_VERSION,
        "kind": "summary",
        "seed": seed,
        "scope": scope,
        "replicates": replicates,
        "swaps_per_edge": swaps,
        "alpha": alpha,
        "attribute": attribute,
        "n": comp_info["n"],
        "m": comp_info["m"],
        "component_sizes": comp_info["sizes"],
        "k": clu_info["k"],
        "modularity": clu_info["modularity"],
        "threshold": null_info["threshold"],
        "significant": null_info["significant"],
        "atypical_clusters": atypical,
    }
    _write(out_dir, "summary.json", iof.canonical_json_bytes(summary_obj))
    return {"lines": lines}


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Start the interactive exploration server."""
    import uvicorn

    from .server import app

    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

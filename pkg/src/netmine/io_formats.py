"""Dataset ingest and artifact serialization.

Input datasets are delimited text (comma by default, tab accepted) described
by a small JSON manifest. All JSON artifacts are canonical: version-tagged,
sorted keys, no whitespace variance, floats as shortest round-trip reprs, no
timestamps. Identical runs therefore produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Mapping

from .clustering import ClusterGraph, Partition
from .errors import (
    DuplicateNodeId,
    MissingArtifact,
    ParseError,
    SchemaMismatch,
    SelfLoop,
    UnknownEndpoint,
)
from .graph import (
    CATEGORICAL,
    DIRECTION_NONE,
    DIRECTION_UV,
    DIRECTION_VU,
    INTEGER,
    Network,
    NodeRecord,
    build_network,
)
from .layout import LayoutResult, StyledLayout
from .stats import GeodesicTable, TestOverlay, ClusterTest, YearlyTable

FORMAT_VERSION = "1"
MISSING_TOKENS = ("", "NA")
_DIRECTION_TOKENS = {"": DIRECTION_NONE, "uv": DIRECTION_UV, "vu": DIRECTION_VU}


def canonical_json_bytes(obj: Any) -> bytes:
    """Stable byte encoding; the only JSON writer used for artifacts."""
    return (
        json.dumps(
            obj,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
            allow_nan=False,
        )
        + "\n"
    ).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def artifact_hash(obj: Any) -> str:
    return sha256_hex(canonical_json_bytes(obj))


# ---------------------------------------------------------------------------
# manifests and ingest


@dataclass(frozen=True)
class DatasetManifest:
    """Describes where a dataset lives and how to read it."""

    node_file: str
    edge_file: str
    node_id_column: str
    edge_source_column: str
    edge_target_column: str
    schema: Mapping[str, str]
    direction_column: str | None = None
    year_attribute: str | None = None
    delimiter: str = ","


def manifest_from_obj(obj: Mapping[str, Any], base_dir: str = ".") -> DatasetManifest:
    try:
        node_file = obj["node_file"]
        edge_file = obj["edge_file"]
        schema = dict(obj["schema"])
    except KeyError as exc:
        raise SchemaMismatch(f"manifest missing required key {exc}") from None
    for name, kind in schema.items():
        if kind not in (CATEGORICAL, INTEGER):
            raise SchemaMismatch(
                f"manifest schema: attribute {name!r} has unknown kind {kind!r}"
            )
    delimiter = obj.get("delimiter", ",")
    if delimiter not in (",", "\t"):
        raise SchemaMismatch(f"unsupported delimiter {delimiter!r}")
    year_attribute = obj.get("year_attribute")
    if year_attribute is not None and schema.get(year_attribute) != INTEGER:
        raise SchemaMismatch(
            f"year attribute {year_attribute!r} must be declared integer"
        )
    return DatasetManifest(
        node_file=os.path.join(base_dir, node_file),
        edge_file=os.path.join(base_dir, edge_file),
        node_id_column=obj.get("node_id_column", "id"),
        edge_source_column=obj.get("edge_source_column", "source"),
        edge_target_column=obj.get("edge_target_column", "target"),
        schema=schema,
        direction_column=obj.get("direction_column"),
        year_attribute=year_attribute,
        delimiter=delimiter,
    )


def load_manifest(path: str) -> DatasetManifest:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, f"bad manifest JSON: {exc.msg}")
    return manifest_from_obj(obj, base_dir=os.path.dirname(path) or ".")


def _header_index(
    path: str, header: list[str], wanted: list[str]
) -> dict[str, int]:
    index = {}
    for name in wanted:
        if name not in header:
            raise SchemaMismatch(f"{path}: missing column {name!r}")
        index[name] = header.index(name)
    return index


def read_dataset(manifest: DatasetManifest) -> Network:
    """Parse node and edge files into a Network.

    Rejected rows raise with the file and 1-based line number. Missing
    values are empty fields or the token NA. Duplicate edges collapse.
    """
    records: list[NodeRecord] = []
    seen_ids: set[str] = set()
    attr_names = sorted(manifest.schema)
    with open(manifest.node_file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=manifest.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(manifest.node_file, 1, "empty node file") from None
        cols = _header_index(
            manifest.node_file, header, [manifest.node_id_column] + attr_names
        )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(f == "" for f in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    manifest.node_file,
                    lineno,
                    f"expected {len(header)} fields, got {len(row)}",
                )
            node_id = row[cols[manifest.node_id_column]]
            if node_id in MISSING_TOKENS:
                raise ParseError(manifest.node_file, lineno, "empty node id")
            if node_id in seen_ids:
                raise DuplicateNodeId(
                    f"{manifest.node_file}:{lineno}: duplicate node id {node_id!r}"
                )
            seen_ids.add(node_id)
            attributes: dict[str, str | int] = {}
            for name in attr_names:
                raw = row[cols[name]]
                if raw in MISSING_TOKENS:
                    continue
                if manifest.schema[name] == INTEGER:
                    try:
                        attributes[name] = int(raw)
                    except ValueError:
                        raise ParseError(
                            manifest.node_file,
                            lineno,
                            f"attribute {name!r} expects an integer, got {raw!r}",
                        ) from None
                else:
                    attributes[name] = raw
            records.append(NodeRecord(node_id, attributes))

    declarations: list[tuple[str, str, str]] = []
    with open(manifest.edge_file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=manifest.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(manifest.edge_file, 1, "empty edge file") from None
        wanted = [manifest.edge_source_column, manifest.edge_target_column]
        if manifest.direction_column is not None:
            wanted.append(manifest.direction_column)
        cols = _header_index(manifest.edge_file, header, wanted)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(f == "" for f in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    manifest.edge_file,
                    lineno,
                    f"expected {len(header)} fields, got {len(row)}",
                )
            u = row[cols[manifest.edge_source_column]]
            v = row[cols[manifest.edge_target_column]]
            if u in MISSING_TOKENS or v in MISSING_TOKENS:
                raise ParseError(manifest.edge_file, lineno, "missing endpoint")
            if u not in seen_ids:
                raise UnknownEndpoint(
                    f"{manifest.edge_file}:{lineno}: unknown endpoint {u!r}"
                )
            if v not in seen_ids:
                raise UnknownEndpoint(
                    f"{manifest.edge_file}:{lineno}: unknown endpoint {v!r}"
                )
            if u == v:
                raise SelfLoop(
                    f"{manifest.edge_file}:{lineno}: self-loop on {u!r}"
                )
            direction = DIRECTION_NONE
            if manifest.direction_column is not None:
                token = row[cols[manifest.direction_column]]
                if token not in _DIRECTION_TOKENS:
                    raise ParseError(
                        manifest.edge_file,
                        lineno,
                        f"bad direction {token!r} (want '', 'uv' or 'vu')",
                    )
                direction = _DIRECTION_TOKENS[token]
            declarations.append((u, v, direction))
    return build_network(records, declarations, manifest.schema)


# ---------------------------------------------------------------------------
# JSON codecs


def _require(obj: Mapping[str, Any], kind: str) -> None:
    if obj.get("format_version") != FORMAT_VERSION:
        raise SchemaMismatch(
            f"expected format_version {FORMAT_VERSION!r}, got {obj.get('format_version')!r}"
        )
    if obj.get("kind") != kind:
        raise SchemaMismatch(f"expected kind {kind!r}, got {obj.get('kind')!r}")


def network_to_obj(net: Network) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "network",
        "schema": dict(net.schema),
        "nodes": [
            {"id": rec.id, "attributes": dict(sorted(rec.attributes.items()))}
            for rec in net.records()
        ],
        "edges": [
            {"u": e.u, "v": e.v, "direction": e.direction} for e in net.edges
        ],
    }


def network_from_obj(obj: Mapping[str, Any]) -> Network:
    _require(obj, "network")
    records = [
        NodeRecord(n["id"], dict(n.get("attributes", {}))) for n in obj["nodes"]
    ]
    decls = [(e["u"], e["v"], e.get("direction", DIRECTION_NONE)) for e in obj["edges"]]
    return build_network(records, decls, obj.get("schema"))


def partition_to_obj(p: Partition, **extra: Any) -> dict:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "partition",
        "assignment": dict(sorted(p.assignment.items())),
        "k": p.k,
        "modularity": p.modularity,
    }
    obj.update(extra)
    return obj


def partition_from_obj(obj: Mapping[str, Any]) -> Partition:
    _require(obj, "partition")
    assignment = {str(n): int(c) for n, c in obj["assignment"].items()}
    return Partition(
        dict(sorted(assignment.items())), int(obj["k"]), float(obj["modularity"])
    )


def overlay_to_obj(ov: TestOverlay) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "overlay",
        "attribute": ov.attribute,
        "categories": list(ov.categories),
        "global_counts": list(ov.global_counts),
        "clusters": [
            {
                "cluster": t.cluster,
                "n": t.n,
                "statistic": t.statistic,
                "df": t.df,
                "p_value": t.p_value,
                "residuals": dict(sorted(t.residuals.items())),
                "low_count": t.low_count,
            }
            for t in ov.clusters
        ],
    }


def overlay_from_obj(obj: Mapping[str, Any]) -> TestOverlay:
    _require(obj, "overlay")
    tests = tuple(
        ClusterTest(
            cluster=int(t["cluster"]),
            n=int(t["n"]),
            statistic=float(t["statistic"]),
            df=int(t["df"]),
            p_value=float(t["p_value"]),
            residuals={k: float(v) for k, v in t["residuals"].items()},
            low_count=bool(t["low_count"]),
        )
        for t in obj["clusters"]
    )
    return TestOverlay(
        attribute=obj["attribute"],
        categories=tuple(obj["categories"]),
        global_counts=tuple(int(n) for n in obj["global_counts"]),
        clusters=tests,
    )


def geodesic_to_obj(table: GeodesicTable) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "geodesic_table",
        "labels": list(table.labels),
        "cells": [
            [a, b, table.pair_counts[(a, b)], table.pair_sums[(a, b)]]
            for (a, b) in sorted(table.pair_counts)
        ],
        "global_count": table.global_count,
        "global_sum": table.global_sum,
    }


def geodesic_from_obj(obj: Mapping[str, Any]) -> GeodesicTable:
    _require(obj, "geodesic_table")
    counts = {}
    sums = {}
    for a, b, count, total in obj["cells"]:
        counts[(a, b)] = int(count)
        sums[(a, b)] = int(total)
    return GeodesicTable(
        labels=tuple(obj["labels"]),
        pair_counts=counts,
        pair_sums=sums,
        global_count=int(obj["global_count"]),
        global_sum=int(obj["global_sum"]),
    )


def yearly_to_obj(table: YearlyTable) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "yearly_table",
        "year_attribute": table.year_attribute,
        "classes": list(table.classes),
        "rows": [
            {
                "year": year,
                "counts": {
                    cls: table.counts[(year, cls)]
                    for cls in table.classes
                    if (year, cls) in table.counts
                },
            }
            for year in table.years
        ],
    }


def cluster_graph_to_obj(cg: ClusterGraph, m: int) -> dict:
    two_m = 2.0 * m
    return {
        "format_version": FORMAT_VERSION,
        "kind": "cluster_graph",
        "m": m,
        "nodes": [
            {
                "id": c,
                "size": cg.sizes[c],
                "internal": cg.internal[c],
                "degree": cg.degrees[c],
                "q_contribution": cg.internal[c] / m - (cg.degrees[c] / two_m) ** 2,
            }
            for c in range(cg.k)
        ],
        "edges": [
            {"a": a, "b": b, "weight": w} for (a, b, w) in cg.meta_edges()
        ],
    }


def layout_to_obj(styled: StyledLayout) -> dict:
    lay = styled.layout
    return {
        "format_version": FORMAT_VERSION,
        "kind": "layout",
        "seed": lay.seed,
        "iterations": lay.iterations,
        "bounding_box": list(lay.bounding_box),
        "mode": styled.mode,
        "category": styled.category,
        "alpha": styled.alpha,
        "nodes": [
            {
                "id": c,
                "x": lay.positions[c][0],
                "y": lay.positions[c][1],
                "radius": lay.radii[c],
                "darkness": styled.darkness[c],
                "shape": styled.shape[c],
                "atypical": styled.atypical[c],
                "value": styled.value[c],
            }
            for c in sorted(lay.positions)
        ],
        "edges": [
            {"a": a, "b": b, "thickness": t}
            for (a, b), t in sorted(lay.thickness.items())
        ],
    }


def bare_layout_to_obj(lay: LayoutResult) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "layout",
        "seed": lay.seed,
        "iterations": lay.iterations,
        "bounding_box": list(lay.bounding_box),
        "mode": None,
        "category": None,
        "alpha": None,
        "nodes": [
            {
                "id": c,
                "x": lay.positions[c][0],
                "y": lay.positions[c][1],
                "radius": lay.radii[c],
                "darkness": 0.0,
                "shape": "circle",
                "atypical": False,
                "value": None,
            }
            for c in sorted(lay.positions)
        ],
        "edges": [
            {"a": a, "b": b, "thickness": t}
            for (a, b), t in sorted(lay.thickness.items())
        ],
    }


# ---------------------------------------------------------------------------
# SVG and CSV renderings


_SVG_SCALE = 1000.0  # pixels per frame unit


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def layout_svg(layout_obj: Mapping[str, Any]) -> str:
    """Render a layout artifact object as standalone SVG 1.1 markup."""
    x0, y0, x1, y1 = layout_obj["bounding_box"]
    width = (x1 - x0) * _SVG_SCALE
    height = (y1 - y0) * _SVG_SCALE
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'style="background:#ffffff">',
        '<g stroke="#9a9a9a" stroke-opacity="0.7">',
    ]
    pos = {n["id"]: (n["x"], n["y"]) for n in layout_obj["nodes"]}
    for edge in layout_obj["edges"]:
        ax, ay = pos[edge["a"]]
        bx, by = pos[edge["b"]]
        parts.append(
            f'<line x1="{_fmt((ax - x0) * _SVG_SCALE)}" y1="{_fmt((ay - y0) * _SVG_SCALE)}" '
            f'x2="{_fmt((bx - x0) * _SVG_SCALE)}" y2="{_fmt((by - y0) * _SVG_SCALE)}" '
            f'stroke-width="{_fmt(edge["thickness"])}"/>'
        )
    parts.append("</g>")
    parts.append('<g stroke="#333333" stroke-width="1">')
    for node in layout_obj["nodes"]:
        cx = (node["x"] - x0) * _SVG_SCALE
        cy = (node["y"] - y0) * _SVG_SCALE
        r = node["radius"] * _SVG_SCALE
        level = round(255.0 * (1.0 - node["darkness"]))
        fill = f"rgb({level},{level},{level})"
        title = f'<title>cluster {node["id"]}</title>'
        if node["shape"] == "square":
            side = r * 1.7724538509055159  # sqrt(pi): same area as the disk
            parts.append(
                f'<rect x="{_fmt(cx - side / 2)}" y="{_fmt(cy - side / 2)}" '
                f'width="{_fmt(side)}" height="{_fmt(side)}" fill="{fill}">{title}</rect>'
            )
        else:
            parts.append(
                f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
                f'fill="{fill}">{title}</circle>'
            )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def geodesic_csv(table: GeodesicTable) -> str:
    """Symmetric label-by-label matrix of mean distances; blank = no pairs."""
    lines = ["," + ",".join(table.labels)]
    for a in table.labels:
        row = [a]
        for b in table.labels:
            mean = table.mean(a, b)
            row.append("" if mean is None else repr(mean))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def yearly_csv(table: YearlyTable) -> str:
    header = ["year"]
    for cls in table.classes:
        header.append(f"{cls}_count")
        header.append(f"{cls}_share")
    header.append("total")
    lines = [",".join(header)]
    for year in table.years:
        total = table.total(year)
        row = [str(year)]
        for cls in table.classes:
            count = table.counts.get((year, cls), 0)
            row.append(str(count))
            row.append(repr(count / total))
        row.append(str(total))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# session export


def export_session(state, kind: str) -> tuple[bytes, str]:
    """Serialize a live session. Returns (payload bytes, media type).

    `state` must expose payload() plus current styled layout and tables;
    kinds: json (full state), svg (current metagraph), csv (current
    geodesic table).
    """
    if kind == "json":
        return canonical_json_bytes(state.payload(full=True)), "application/json"
    if kind == "svg":
        styled = getattr(state, "styled", None)
        if styled is None:
            raise MissingArtifact("no layout to export")
        return layout_svg(layout_to_obj(styled)).encode("utf-8"), "image/svg+xml"
    if kind == "csv":
        table = getattr(state, "geodesic_table", None)
        if table is None:
            raise MissingArtifact("no geodesic table computed yet")
        return geodesic_csv(table).encode("utf-8"), "text/csv"
    raise MissingArtifact(f"unknown export kind {kind!r}")

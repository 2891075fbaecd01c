"""Seeded synthetic networks with planted structure.

Used for the bundled demo dataset, for golden-workflow checks, and for
recovery experiments: blocks of configurable density, optional full-clique
blocks, attribute distributions skewed per block, and a year attribute so
time-sliced tables have something to chew on.
"""

from __future__ import annotations

import csv
import json
import os
import random
from dataclasses import dataclass, field

from .graph import Network, NodeRecord, build_network
from .io_formats import canonical_json_bytes


@dataclass(frozen=True)
class BlockSpec:
    """One planted block: its size, density, and attribute skew."""

    size: int
    p_in: float  # 1.0 plants a clique
    category_weights: tuple[float, ...]
    year_range: tuple[int, int]


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator configuration for a planted-block network."""

    blocks: tuple[BlockSpec, ...]
    p_out: float
    categories: tuple[str, ...]
    seed: int
    missing_rate: float = 0.02
    id_width: int = 4

    @property
    def node_count(self) -> int:
        return sum(b.size for b in self.blocks)


DEMO_SPEC = SyntheticSpec(
    blocks=(
        BlockSpec(280, 0.025, (0.85, 0.10, 0.05), (1986, 1996)),
        BlockSpec(280, 0.025, (0.08, 0.85, 0.07), (1992, 2004)),
        BlockSpec(40, 1.0, (0.10, 0.10, 0.80), (1996, 2001)),
    ),
    p_out=0.002,
    categories=("alpha", "beta", "gamma"),
    seed=20,
)


def generate(spec: SyntheticSpec) -> tuple[Network, dict]:
    """Build the network plus a ground-truth summary of what was planted."""
    rng = random.Random(spec.seed)
    node_ids: list[str] = []
    block_of: dict[str, int] = {}
    records: list[NodeRecord] = []
    counter = 0
    category_counts = {c: 0 for c in spec.categories}
    for b_idx, block in enumerate(spec.blocks):
        for _ in range(block.size):
            nid = f"n{counter:0{spec.id_width}d}"
            counter += 1
            node_ids.append(nid)
            block_of[nid] = b_idx
            attributes: dict[str, str | int] = {}
            if rng.random() >= spec.missing_rate:
                cat = rng.choices(spec.categories, block.category_weights)[0]
                attributes["category"] = cat
                category_counts[cat] += 1
            lo, hi = block.year_range
            attributes["year"] = rng.randrange(lo, hi + 1)
            records.append(NodeRecord(nid, attributes))

    declarations: list[tuple[str, str, str]] = []
    n = len(node_ids)
    for i in range(n):
        u = node_ids[i]
        for j in range(i + 1, n):
            v = node_ids[j]
            p = spec.blocks[block_of[u]].p_in if block_of[u] == block_of[v] else spec.p_out
            if rng.random() >= p:
                continue
            roll = rng.random()
            direction = "none" if roll < 0.5 else ("uv" if roll < 0.75 else "vu")
            declarations.append((u, v, direction))

    schema = {"category": "categorical", "year": "integer"}
    net = build_network(records, declarations, schema)
    block_members = [
        [nid for nid in node_ids if block_of[nid] == b]
        for b in range(len(spec.blocks))
    ]
    truth = {
        "seed": spec.seed,
        "n": net.node_count,
        "m": net.edge_count,
        "block_sizes": [b.size for b in spec.blocks],
        "block_p_in": [b.p_in for b in spec.blocks],
        "p_out": spec.p_out,
        "blocks": block_members,
        "clique_blocks": [i for i, b in enumerate(spec.blocks) if b.p_in == 1.0],
        "category_counts": category_counts,
    }
    return net, truth


def write_dataset(net: Network, truth: dict, out_dir: str) -> None:
    """Write nodes.csv, edges.csv, manifest.json and truth.json."""
    os.makedirs(out_dir, exist_ok=True)
    attr_names = sorted(net.schema)
    with open(os.path.join(out_dir, "nodes.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + attr_names)
        for rec in net.records():
            row = [rec.id]
            for name in attr_names:
                value = rec.attributes.get(name)
                row.append("" if value is None else str(value))
            writer.writerow(row)
    with open(os.path.join(out_dir, "edges.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "direction"])
        for e in net.edges:
            token = "" if e.direction == "none" else e.direction
            writer.writerow([e.u, e.v, token])
    manifest = {
        "node_file": "nodes.csv",
        "edge_file": "edges.csv",
        "node_id_column": "id",
        "edge_source_column": "source",
        "edge_target_column": "target",
        "direction_column": "direction",
        "schema": dict(net.schema),
        "year_attribute": "year" if "year" in net.schema else None,
        "delimiter": ",",
    }
    with open(os.path.join(out_dir, "manifest.json"), "wb") as fh:
        fh.write(canonical_json_bytes(manifest))
    with open(os.path.join(out_dir, "truth.json"), "wb") as fh:
        fh.write(canonical_json_bytes(truth))


def two_block_graph(
    seed: int, block_size: int = 30, p_in: float = 0.3, p_out: float = 0.01
) -> tuple[Network, frozenset[str], frozenset[str]]:
    """Two planted blocks, no attributes; returns (net, block_a, block_b)."""
    rng = random.Random(seed)
    ids = [f"v{i:03d}" for i in range(2 * block_size)]
    half = block_size
    decls = []
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            same = (i < half) == (j < half)
            if rng.random() < (p_in if same else p_out):
                decls.append((ids[i], ids[j]))
    net = build_network([NodeRecord(nid) for nid in ids], decls)
    return net, frozenset(ids[:half]), frozenset(ids[half:])

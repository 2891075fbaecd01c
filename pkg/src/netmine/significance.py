"""Degree-preserving null models and significance gating.

An observed partition score only means something against what random graphs
with the same degrees can reach. `rewire` shuffles edges with double-edge
swaps, `null_threshold` records the best modularity found on R rewired
copies, and a score is significant only when it strictly beats the maximum
of those replicates.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .clustering import Partition, cluster
from .errors import TooFewEdges
from .graph import (
    DIRECTION_NONE,
    Network,
    build_network,
    degree_sequence,
    induced_subgraph,
)

DEFAULT_SWAPS_PER_EDGE = 10
DEFAULT_REPLICATES = 50

_MASK64 = (1 << 64) - 1


def mix_seed(seed: int, index: int) -> int:
    """Derive a decorrelated child seed; splitmix64-style finalizer."""
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class NullModelSummary:
    """Maximal modularities reached on rewired replicates."""

    replicates: int
    swaps_per_edge: int
    seed: int
    values: tuple[float, ...]  # one modularity per replicate, in seed order
    threshold: float  # max of values
    degree_fingerprint: str


def degree_fingerprint(net: Network) -> str:
    """Hash of the degree multiset; keys the null-summary cache."""
    seq = ",".join(str(d) for d in degree_sequence(net))
    return hashlib.sha256(seq.encode("ascii")).hexdigest()


def rewire(
    net: Network, seed: int, swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE
) -> Network:
    """Shuffle edges by double-edge swaps, preserving every node's degree.

    swaps_per_edge * m swaps are attempted; proposals creating a self-loop
    or a duplicate edge are skipped, not retried. Attributes carry over
    unchanged. Connectivity is not enforced. Edges created by a swap lose
    any direction metadata.
    """
    m = net.edge_count
    if m < 2:
        raise TooFewEdges(f"rewiring needs at least 2 edges, got {m}")
    rng = random.Random(seed)
    edges: list[tuple[str, str]] = [(e.u, e.v) for e in net.edges]
    directions: dict[tuple[str, str], str] = {
        (e.u, e.v): e.direction for e in net.edges
    }
    edge_set = set(edges)
    attempts = swaps_per_edge * m
    for _ in range(attempts):
        i = rng.randrange(m)
        j = rng.randrange(m)
        if i == j:
            continue
        u, v = edges[i]
        x, y = edges[j]
        if rng.random() < 0.5:
            x, y = y, x
        # proposal: replace u-v and x-y with u-x and v-y
        if u == x or v == y:
            continue
        e1 = (u, x) if u < x else (x, u)
        e2 = (v, y) if v < y else (y, v)
        if e1 == e2 or e1 in edge_set or e2 in edge_set:
            continue
        old1 = edges[i]
        old2 = edges[j]
        edge_set.discard(old1)
        edge_set.discard(old2)
        directions.pop(old1, None)
        directions.pop(old2, None)
        edges[i] = e1
        edges[j] = e2
        edge_set.add(e1)
        edge_set.add(e2)
        directions[e1] = DIRECTION_NONE
        directions[e2] = DIRECTION_NONE
    decls = [(u, v, directions[(u, v)]) for (u, v) in sorted(edge_set)]
    return build_network(net.records(), decls, net.schema)


def null_threshold(
    net: Network,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE,
) -> NullModelSummary:
    """Best modularity over `replicates` rewired copies of `net`.

    Replicate i rewires with seed mix(seed, 2i) and clusters with seed
    mix(seed, 2i+1), so runs are reproducible and order-independent.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    values = []
    for i in range(replicates):
        shuffled = rewire(net, mix_seed(seed, 2 * i), swaps_per_edge)
        p = cluster(shuffled, mix_seed(seed, 2 * i + 1))
        values.append(p.modularity)
    return NullModelSummary(
        replicates=replicates,
        swaps_per_edge=swaps_per_edge,
        seed=seed,
        values=tuple(values),
        threshold=max(values),
        degree_fingerprint=degree_fingerprint(net),
    )


def is_significant(q: float, summary: NullModelSummary) -> bool:
    """Strictly above the best random replicate counts as significant."""
    return q > summary.threshold


@dataclass(frozen=True)
class GateResult:
    """Outcome of asking whether a cluster hides real substructure."""

    target: int
    accepted: bool
    sub_partition: Partition | None
    summary: NullModelSummary | None

    @property
    def sub_k(self) -> int:
        return self.sub_partition.k if self.sub_partition else 1

    @property
    def sub_q(self) -> float | None:
        return self.sub_partition.modularity if self.sub_partition else None


def gate_refinement(
    net: Network,
    p: Partition,
    target: int,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE,
) -> GateResult:
    """Accept a split of `target` only if it beats the cluster's own null.

    The target's induced subgraph is clustered in isolation and compared
    against rewired copies of that same subgraph. Acceptance needs a real
    split (at least 2 sub-clusters) whose modularity strictly exceeds the
    null threshold. Subgraphs with fewer than 2 edges are rejected outright.
    """
    members = p.members(target)
    sub = induced_subgraph(net, members)
    if sub.edge_count < 2:
        return GateResult(target, False, None, None)
    sub_p = cluster(sub, seed)
    summary = null_threshold(sub, replicates, seed, swaps_per_edge)
    accepted = sub_p.k >= 2 and is_significant(sub_p.modularity, summary)
    return GateResult(target, accepted, sub_p, summary)

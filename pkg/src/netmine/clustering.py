"""Modularity scoring and greedy modularity maximization.

The score of a partition is the fraction of edges inside clusters minus the
fraction expected if edges were rewired at random with degrees fixed:

    Q = sum_c [ e_c / m  -  (d_c / 2m)^2 ]

where e_c counts edges internal to cluster c, d_c sums the degrees of its
members, and m is the edge count of the whole graph. Q lives in [-1/2, 1].

`cluster` maximizes Q greedily: start from singletons, repeatedly merge the
adjacent cluster pair with the largest positive gain, then sweep single-node
moves, and repeat both phases until neither finds an improvement. The result
is a local maximum, deterministic for a given seed.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    BadTarget,
    EmptyClusterGraph,
    EmptyGraph,
    UnknownCluster,
    UnlabeledCluster,
)
from .graph import Network, induced_subgraph


@dataclass(frozen=True)
class Partition:
    """An assignment of every scope node to one of k dense cluster ids."""

    assignment: Mapping[str, int]
    k: int
    modularity: float

    @property
    def scope(self) -> frozenset[str]:
        return frozenset(self.assignment)

    def members(self, cluster: int) -> tuple[str, ...]:
        if not 0 <= cluster < self.k:
            raise UnknownCluster(str(cluster))
        return tuple(n for n, c in self.assignment.items() if c == cluster)

    def sizes(self) -> tuple[int, ...]:
        out = [0] * self.k
        for c in self.assignment.values():
            out[c] += 1
        return tuple(out)


@dataclass(frozen=True)
class ClusterGraph:
    """A partition collapsed to one meta-node per cluster."""

    sizes: tuple[int, ...]
    internal: tuple[int, ...]
    degrees: tuple[int, ...]
    # crossing-edge counts keyed by (a, b) with a < b; only nonzero pairs
    weights: Mapping[tuple[int, int], int]

    @property
    def k(self) -> int:
        return len(self.sizes)

    def meta_edges(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((a, b, w) for (a, b), w in sorted(self.weights.items()))

    def weight(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        return self.weights.get((a, b), 0)


@dataclass(frozen=True)
class HierarchyStep:
    """One refine or coarsen transition between two partitions."""

    kind: str  # "refine" | "coarsen"
    parent: Partition
    child: Partition
    affected: tuple[int, ...]


def _canonical_assignment(assignment: Mapping[str, int]) -> dict[str, int]:
    """Renumber clusters by first occurrence over sorted node ids."""
    remap: dict[int, int] = {}
    out: dict[str, int] = {}
    for node in sorted(assignment):
        old = assignment[node]
        if old not in remap:
            remap[old] = len(remap)
        out[node] = remap[old]
    return out


def _modularity_of(net: Network, assignment: Mapping[str, int], k: int) -> float:
    m = net.edge_count
    if m == 0:
        raise EmptyGraph("modularity is undefined on a graph with no edges")
    internal = [0] * k
    degsum = [0] * k
    for e in net.edges:
        cu = assignment[e.u]
        if cu == assignment[e.v]:
            internal[cu] += 1
    for node in net.node_ids:
        degsum[assignment[node]] += net.degree(node)
    two_m = 2.0 * m
    q = 0.0
    for c in range(k):
        q += internal[c] / m - (degsum[c] / two_m) ** 2
    return q


def make_partition(
    net: Network, assignment: Mapping[str, int], canonicalize: bool = True
) -> Partition:
    """Validate an assignment against `net` and wrap it with its score."""
    if set(assignment) != set(net.node_ids):
        raise UnknownCluster("assignment scope does not match the network")
    if canonicalize:
        canon = _canonical_assignment(assignment)
    else:
        canon = {node: assignment[node] for node in sorted(assignment)}
    labels = set(canon.values())
    k = len(labels)
    if labels != set(range(k)):
        raise UnknownCluster("cluster ids must be dense 0..k-1")
    q = _modularity_of(net, canon, k)
    return Partition(canon, k, q)


def modularity(net: Network, p: Partition) -> float:
    """Score `p` on `net`. The partition must cover exactly the network."""
    if p.scope != frozenset(net.node_ids):
        raise UnknownCluster("partition scope does not match the network")
    return _modularity_of(net, p.assignment, p.k)


def singleton_partition(net: Network) -> Partition:
    return make_partition(net, {node: i for i, node in enumerate(net.node_ids)})


def build_cluster_graph(net: Network, p: Partition) -> ClusterGraph:
    """Collapse each cluster of `p` to a weighted meta-node."""
    if p.scope != frozenset(net.node_ids):
        raise UnknownCluster("partition scope does not match the network")
    if p.k == 0:
        raise EmptyClusterGraph("partition has no clusters")
    sizes = [0] * p.k
    internal = [0] * p.k
    degrees = [0] * p.k
    weights: dict[tuple[int, int], int] = {}
    for node in net.node_ids:
        c = p.assignment[node]
        sizes[c] += 1
        degrees[c] += net.degree(node)
    for e in net.edges:
        a = p.assignment[e.u]
        b = p.assignment[e.v]
        if a == b:
            internal[a] += 1
        else:
            key = (a, b) if a < b else (b, a)
            weights[key] = weights.get(key, 0) + 1
    return ClusterGraph(tuple(sizes), tuple(internal), tuple(degrees), weights)


def delta_q_merge(cg: ClusterGraph, m: int, a: int, b: int) -> float:
    """Exact change in Q from merging clusters a and b of the metagraph.

    Equals w_ab/m - 2 (d_a/2m)(d_b/2m); no rescoring of the full partition
    is needed.
    """
    if m < 1:
        raise EmptyGraph("merge gain is undefined without edges")
    k = cg.k
    if not 0 <= a < k:
        raise UnknownCluster(str(a))
    if not 0 <= b < k:
        raise UnknownCluster(str(b))
    if a == b:
        raise UnknownCluster(f"cannot merge cluster {a} with itself")
    w = cg.weight(a, b)
    return w / m - (cg.degrees[a] * cg.degrees[b]) / (2.0 * m * m)


# ---------------------------------------------------------------------------
# greedy maximization


def _merge_phase(
    net: Network,
    assignment: dict[str, int],
    order: list[str],
    m: int,
) -> int:
    """Greedy pair merges until no adjacent merge has positive gain.

    Clusters are relabeled densely in seed order at phase start, so tie
    breaking by smallest (a, b) pair follows the seed-derived ordering.
    Updates `assignment` in place; returns the number of merges applied.
    """
    relabel: dict[int, int] = {}
    for node in order:
        c = assignment[node]
        if c not in relabel:
            relabel[c] = len(relabel)
    members: dict[int, list[str]] = {}
    for node in order:
        c = relabel[assignment[node]]
        assignment[node] = c
        members.setdefault(c, []).append(node)

    deg: dict[int, float] = {c: 0.0 for c in members}
    for node in order:
        deg[assignment[node]] += net.degree(node)
    w: dict[tuple[int, int], int] = {}
    nbrs: dict[int, set[int]] = {c: set() for c in members}
    for e in net.edges:
        a = assignment[e.u]
        b = assignment[e.v]
        if a == b:
            continue
        key = (a, b) if a < b else (b, a)
        w[key] = w.get(key, 0) + 1
        nbrs[a].add(b)
        nbrs[b].add(a)

    two_m2 = 2.0 * m * m

    def gain(a: int, b: int) -> float:
        key = (a, b) if a < b else (b, a)
        return w.get(key, 0) / m - deg[a] * deg[b] / two_m2

    heap: list[tuple[float, int, int]] = [(-gain(a, b), a, b) for (a, b) in w]
    heapq.heapify(heap)
    alive = set(deg)
    merges = 0
    while heap:
        neg, a, b = heapq.heappop(heap)
        if a not in alive or b not in alive:
            continue
        if (a, b) not in w:
            continue
        dq = gain(a, b)
        if dq != -neg:
            continue
        if dq <= 0.0:
            break
        alive.discard(b)
        for x in sorted(nbrs[b]):
            key_bx = (b, x) if b < x else (x, b)
            wx = w.pop(key_bx)
            nbrs[x].discard(b)
            if x == a:
                continue
            key_ax = (a, x) if a < x else (x, a)
            w[key_ax] = w.get(key_ax, 0) + wx
            nbrs[a].add(x)
            nbrs[x].add(a)
        deg[a] += deg.pop(b)
        nbrs.pop(b)
        members[a].extend(members.pop(b))
        merges += 1
        for x in sorted(nbrs[a]):
            key = (a, x) if a < x else (x, a)
            heapq.heappush(heap, (-gain(key[0], key[1]), key[0], key[1]))
    if merges:
        for c, nodes in members.items():
            for node in nodes:
                assignment[node] = c
    return merges


def _sweep_phase(
    net: Network,
    assignment: dict[str, int],
    order: list[str],
    m: int,
) -> int:
    """Single-node moves to the neighboring cluster with the best gain.

    Sweeps run in seed order until one full pass makes no move. Returns the
    total number of moves applied.
    """
    deg: dict[int, int] = {}
    for node in order:
        c = assignment[node]
        deg[c] = deg.get(c, 0) + net.degree(node)
    two_m2 = 2.0 * m * m
    total = 0
    while True:
        moved = 0
        for node in order:
            c = assignment[node]
            d_node = net.degree(node)
            if d_node == 0:
                continue
            w_to: dict[int, int] = {}
            for nb in net.neighbors(node):
                cb = assignment[nb]
                w_to[cb] = w_to.get(cb, 0) + 1
            w_own = w_to.get(c, 0)
            base = w_own / m - d_node * (deg[c] - d_node) / two_m2
            best_gain = 0.0
            best_target = None
            for target in sorted(w_to):
                if target == c:
                    continue
                g = (w_to[target] / m - d_node * deg[target] / two_m2) - base
                if g > best_gain:
                    best_gain = g
                    best_target = target
            if best_target is not None:
                deg[c] -= d_node
                deg[best_target] += d_node
                assignment[node] = best_target
                moved += 1
        total += moved
        if moved == 0:
            return total


def cluster(net: Network, seed: int) -> Partition:
    """Greedy modularity maximization from singletons.

    Alternates merge and sweep phases until neither improves Q, so the
    result is a local maximum under both single merges and single-node
    moves. Deterministic: the seed fixes the order used to break ties.
    Disconnected inputs cluster per component automatically because merges
    and moves only ever cross edges.
    """
    m = net.edge_count
    if m == 0:
        raise EmptyGraph("cannot cluster a graph with no edges")
    order = sorted(net.node_ids)
    rng = random.Random(seed)
    rng.shuffle(order)
    assignment = {node: i for i, node in enumerate(order)}
    while True:
        merges = _merge_phase(net, assignment, order, m)
        moves = _sweep_phase(net, assignment, order, m)
        if merges == 0 and moves == 0:
            break
    return make_partition(net, assignment)


def refine(
    net: Network, p: Partition, targets: Iterable[int], seed: int
) -> tuple[Partition, HierarchyStep]:
    """Re-cluster each target cluster on its own induced subgraph.

    Non-target clusters pass through untouched; ids are re-densified. A
    target whose subgraph has no edges stays whole. The global modularity
    of the child partition may drop below the parent's; significance gating
    is the caller's concern.
    """
    target_set = set(targets)
    for t in target_set:
        if not isinstance(t, int) or not 0 <= t < p.k:
            raise UnknownCluster(str(t))
    if not target_set:
        return p, HierarchyStep("refine", p, p, ())
    members: dict[int, list[str]] = {c: [] for c in range(p.k)}
    for node in sorted(p.assignment):
        members[p.assignment[node]].append(node)
    next_label = 0
    raw: dict[str, int] = {}
    for c in range(p.k):
        if c in target_set:
            sub = induced_subgraph(net, members[c])
            if sub.edge_count == 0:
                for node in members[c]:
                    raw[node] = next_label
                next_label += 1
                continue
            sub_p = cluster(sub, seed)
            for node in members[c]:
                raw[node] = next_label + sub_p.assignment[node]
            next_label += sub_p.k
        else:
            for node in members[c]:
                raw[node] = next_label
            next_label += 1
    child = make_partition(net, raw)
    step = HierarchyStep("refine", p, child, tuple(sorted(target_set)))
    return child, step


def coarsen(
    net: Network, p: Partition, target_k: int
) -> tuple[Partition, HierarchyStep]:
    """Merge adjacent cluster pairs greedily down to exactly target_k.

    Each step merges the pair with the largest gain (ties: smallest id
    pair), even when every gain is negative. If no adjacent pair remains,
    the least-costly non-adjacent pair is merged instead.
    """
    if not 1 <= target_k < p.k:
        raise BadTarget(
            f"target_k must be in [1, {p.k - 1}], got {target_k}"
        )
    m = net.edge_count
    cg = build_cluster_graph(net, p)
    deg = {c: cg.degrees[c] for c in range(p.k)}
    w = dict(cg.weights)
    nbrs: dict[int, set[int]] = {c: set() for c in range(p.k)}
    for (a, b) in w:
        nbrs[a].add(b)
        nbrs[b].add(a)
    alive = set(range(p.k))
    root = {c: c for c in range(p.k)}
    two_m2 = 2.0 * m * m
    affected: set[int] = set()
    for _ in range(p.k - target_k):
        best = None
        best_dq = 0.0
        for (a, b), wab in sorted(w.items()):
            dq = wab / m - deg[a] * deg[b] / two_m2
            if best is None or dq > best_dq:
                best = (a, b)
                best_dq = dq
        if best is None:
            # metagraph has no crossing edges left; fall back to the pair
            # with the least negative gain
            ordered = sorted(alive)
            for i, a in enumerate(ordered):
                for b in ordered[i + 1 :]:
                    dq = -deg[a] * deg[b] / two_m2
                    if best is None or dq > best_dq:
                        best = (a, b)
                        best_dq = dq
        assert best is not None
        a, b = best
        affected.update(best)
        alive.discard(b)
        root[b] = a
        for x in sorted(nbrs.get(b, ())):
            key_bx = (b, x) if b < x else (x, b)
            wx = w.pop(key_bx, 0)
            nbrs[x].discard(b)
            if x == a:
                continue
            key_ax = (a, x) if a < x else (x, a)
            w[key_ax] = w.get(key_ax, 0) + wx
            nbrs[a].add(x)
            nbrs[x].add(a)
        nbrs.pop(b, None)
        deg[a] += deg.pop(b)

    def find(c: int) -> int:
        while root[c] != c:
            root[c] = root[root[c]]
            c = root[c]
        return c

    raw = {node: find(p.assignment[node]) for node in p.assignment}
    child = make_partition(net, raw)
    step = HierarchyStep("coarsen", p, child, tuple(sorted(affected)))
    return child, step


def merge_into_groups(
    net: Network, p: Partition, groups: Mapping[int, str]
) -> Partition:
    """Collapse clusters sharing a label into one cluster per label.

    New cluster ids follow the sorted label order. Every cluster of `p`
    must be labeled.
    """
    for c in range(p.k):
        if c not in groups:
            raise UnlabeledCluster(str(c))
    labels = sorted(set(groups[c] for c in range(p.k)))
    label_id = {lab: i for i, lab in enumerate(labels)}
    raw = {
        node: label_id[groups[p.assignment[node]]] for node in p.assignment
    }
    return make_partition(net, raw, canonicalize=False)

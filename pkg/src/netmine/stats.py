"""Per-cluster statistical tests and geodesic analyses.

Clusters are compared against the scope-wide attribute distribution with a
chi-squared goodness-of-fit test (observed cluster counts vs counts expected
under the global proportions), not a test of independence. Geodesic tables
average shortest-path lengths between attribute classes or between labeled
cluster groups.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import erfc, exp, lgamma, log, sqrt
from typing import Iterable, Mapping

from .clustering import Partition
from .errors import (
    DegenerateGlobal,
    NotCategoricalAttribute,
    NotIntegerAttribute,
    UnknownAttribute,
    UnknownNodeId,
    UnlabeledCluster,
)
from .graph import CATEGORICAL, INTEGER, Network

LOW_COUNT_EXPECTED = 5.0


@dataclass(frozen=True)
class CategoricalDistribution:
    """Counts of a categorical attribute over some node scope."""

    attribute: str
    categories: tuple[str, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def share(self, category: str) -> float:
        idx = self.categories.index(category)
        return self.counts[idx] / self.total


@dataclass(frozen=True)
class ClusterTest:
    """Chi-squared goodness-of-fit result for one cluster."""

    cluster: int
    n: int  # members with a non-missing value
    statistic: float
    df: int
    p_value: float
    residuals: Mapping[str, float]  # Pearson residual per category with E > 0
    low_count: bool  # some expected count fell below 5


@dataclass(frozen=True)
class TestOverlay:
    """Chi-squared results for every cluster of a partition."""

    __test__ = False  # not a test case, despite the name

    attribute: str
    categories: tuple[str, ...]
    global_counts: tuple[int, ...]
    clusters: tuple[ClusterTest, ...]

    def for_cluster(self, cluster: int) -> ClusterTest:
        return self.clusters[cluster]


@dataclass(frozen=True)
class GeodesicTable:
    """Mean shortest-path length per label pair.

    Sums and counts stay integral so means are exact ratios; a pair with no
    connected node pair has no cell at all.
    """

    labels: tuple[str, ...]
    pair_counts: Mapping[tuple[str, str], int]
    pair_sums: Mapping[tuple[str, str], int]
    global_count: int
    global_sum: int

    def mean(self, a: str, b: str) -> float | None:
        key = (a, b) if a <= b else (b, a)
        count = self.pair_counts.get(key, 0)
        if count == 0:
            return None
        return self.pair_sums[key] / count

    @property
    def global_mean(self) -> float | None:
        if self.global_count == 0:
            return None
        return self.global_sum / self.global_count


@dataclass(frozen=True)
class YearlyTable:
    """Per-year class counts for nodes carrying both year and class."""

    year_attribute: str
    classes: tuple[str, ...]
    years: tuple[int, ...]
    counts: Mapping[tuple[int, str], int]

    def total(self, year: int) -> int:
        return sum(self.counts.get((year, c), 0) for c in self.classes)

    def share(self, year: int, cls: str) -> float:
        return self.counts.get((year, cls), 0) / self.total(year)


def _check_scope(net: Network, scope: Iterable[str]) -> list[str]:
    out = sorted(set(scope))
    for nid in out:
        if not net.has_node(nid):
            raise UnknownNodeId(nid)
    return out


def attribute_distribution(
    net: Network, scope: Iterable[str], attribute: str
) -> CategoricalDistribution:
    """Category counts over the scope; missing values are not counted.

    Categories are the values observed in the scope, sorted; a scope with
    no values at all yields an empty category list and total 0.
    """
    if attribute not in net.schema:
        raise UnknownAttribute(attribute)
    if net.schema[attribute] != CATEGORICAL:
        raise NotCategoricalAttribute(attribute)
    nodes = _check_scope(net, scope)
    counts: dict[str, int] = {}
    for nid in nodes:
        value = net.record(nid).attributes.get(attribute)
        if value is None:
            continue
        counts[value] = counts.get(value, 0) + 1
    cats = tuple(sorted(counts))
    return CategoricalDistribution(
        attribute, cats, tuple(counts[c] for c in cats)
    )


def chi_squared_upper_tail(x: float, df: int) -> float:
    """P(X >= x) for a chi-squared variable with df degrees of freedom.

    Computed as the regularized upper incomplete gamma Q(df/2, x/2) by
    upward recurrence from the half-integer or integer base case. Absolute
    error stays below 1e-10 for x <= 1e3 and df <= 100.
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 1.0
    t = x / 2.0
    if t == 0.0:  # subnormal x underflows when halved
        return 1.0
    a_target = df / 2.0
    if df % 2 == 0:
        q = exp(-t)
        a = 1.0
    else:
        q = erfc(sqrt(t))
        a = 0.5
    log_t = log(t)
    while a < a_target:
        # Q(a+1, t) = Q(a, t) + t^a e^-t / Gamma(a+1)
        q += exp(a * log_t - t - lgamma(a + 1.0))
        a += 1.0
    return min(q, 1.0)


def chi_squared_overlay(
    net: Network,
    p: Partition,
    attribute: str,
    include_cluster_in_global: bool = True,
) -> TestOverlay:
    """Goodness-of-fit of every cluster against the scope-wide distribution.

    Expected counts come from the global category proportions scaled to the
    cluster's counted size; df is one less than the number of categories
    with positive expectation. With include_cluster_in_global=False the
    tested cluster's own members are removed from the reference
    distribution (per-cluster jackknife).
    """
    global_dist = attribute_distribution(net, p.scope, attribute)
    positive = [c for c, n in zip(global_dist.categories, global_dist.counts) if n > 0]
    if len(positive) < 2:
        raise DegenerateGlobal(
            f"attribute {attribute!r} has fewer than 2 observed categories in scope"
        )
    cats = global_dist.categories
    global_counts = dict(zip(cats, global_dist.counts))

    cluster_counts: list[dict[str, int]] = [dict() for _ in range(p.k)]
    cluster_n = [0] * p.k
    for nid in sorted(p.assignment):
        value = net.record(nid).attributes.get(attribute)
        if value is None:
            continue
        c = p.assignment[nid]
        cluster_counts[c][value] = cluster_counts[c].get(value, 0) + 1
        cluster_n[c] += 1

    tests = []
    for c in range(p.k):
        n_c = cluster_n[c]
        if include_cluster_in_global:
            ref = global_counts
        else:
            ref = {
                cat: global_counts[cat] - cluster_counts[c].get(cat, 0)
                for cat in cats
            }
        ref_total = sum(ref.values())
        df = sum(1 for cat in cats if ref[cat] > 0) - 1
        if n_c == 0 or ref_total == 0 or df < 1:
            tests.append(ClusterTest(c, n_c, 0.0, max(df, 0), 1.0, {}, False))
            continue
        statistic = 0.0
        residuals: dict[str, float] = {}
        low = False
        for cat in cats:
            expected = n_c * ref[cat] / ref_total
            if expected <= 0.0:
                continue
            if expected < LOW_COUNT_EXPECTED:
                low = True
            observed = cluster_counts[c].get(cat, 0)
            diff = observed - expected
            statistic += diff * diff / expected
            residuals[cat] = diff / sqrt(expected)
        p_value = chi_squared_upper_tail(statistic, df)
        tests.append(ClusterTest(c, n_c, statistic, df, p_value, residuals, low))
    return TestOverlay(attribute, cats, global_dist.counts, tuple(tests))


# ---------------------------------------------------------------------------
# geodesics


def _induced_adjacency(net: Network, nodes: list[str]) -> dict[str, list[str]]:
    node_set = set(nodes)
    return {
        nid: [nb for nb in net.neighbors(nid) if nb in node_set]
        for nid in nodes
    }


def bfs_distances(adj: Mapping[str, list[str]], source: str) -> dict[str, int]:
    """Hop distances from source to every reachable node, source included."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        base = dist[cur] + 1
        for nb in adj[cur]:
            if nb not in dist:
                dist[nb] = base
                queue.append(nb)
    return dist


def geodesic_table_by_attribute(
    net: Network, scope: Iterable[str], attribute: str
) -> GeodesicTable:
    """Mean geodesic length between attribute classes inside the scope.

    Paths run over the scope-induced subgraph; nodes with a missing value
    still relay paths but contribute to no cell. Every unordered connected
    pair counts once; the global mean covers all such pairs regardless of
    attribute values.
    """
    if attribute not in net.schema:
        raise UnknownAttribute(attribute)
    if net.schema[attribute] != CATEGORICAL:
        raise NotCategoricalAttribute(attribute)
    nodes = _check_scope(net, scope)
    adj = _induced_adjacency(net, nodes)
    value = {nid: net.record(nid).attributes.get(attribute) for nid in nodes}
    labels = sorted({v for v in value.values() if v is not None})
    pair_counts: dict[tuple[str, str], int] = {}
    pair_sums: dict[tuple[str, str], int] = {}
    global_count = 0
    global_sum = 0
    for u in nodes:
        dist = bfs_distances(adj, u)
        vu = value[u]
        for v, d in dist.items():
            if v <= u:
                continue
            global_count += 1
            global_sum += d
            vv = value[v]
            if vu is None or vv is None:
                continue
            key = (vu, vv) if vu <= vv else (vv, vu)
            pair_counts[key] = pair_counts.get(key, 0) + 1
            pair_sums[key] = pair_sums.get(key, 0) + d
    return GeodesicTable(
        tuple(labels), pair_counts, pair_sums, global_count, global_sum
    )


def geodesic_table_by_groups(
    net: Network,
    p: Partition,
    groups: Mapping[int, str],
    union_restricted: bool = True,
) -> GeodesicTable:
    """Mean geodesic length between labeled cluster groups.

    For each label pair the subgraph is restricted to the union of the two
    groups' members, so paths cannot shortcut through outside nodes. Pass
    union_restricted=False to measure over the full scope instead. The
    global mean always covers the unrestricted scope.
    """
    for c in range(p.k):
        if c not in groups:
            raise UnlabeledCluster(str(c))
    nodes = sorted(p.assignment)
    label_of = {nid: groups[p.assignment[nid]] for nid in nodes}
    labels = sorted(set(label_of.values()))
    members: dict[str, list[str]] = {lab: [] for lab in labels}
    for nid in nodes:
        members[label_of[nid]].append(nid)

    full_adj = _induced_adjacency(net, nodes)
    global_count = 0
    global_sum = 0
    for u in nodes:
        dist = bfs_distances(full_adj, u)
        for v, d in dist.items():
            if v > u:
                global_count += 1
                global_sum += d

    pair_counts: dict[tuple[str, str], int] = {}
    pair_sums: dict[tuple[str, str], int] = {}
    for i, la in enumerate(labels):
        for lb in labels[i:]:
            if union_restricted:
                sub_nodes = (
                    members[la]
                    if la == lb
                    else sorted(set(members[la]) | set(members[lb]))
                )
                adj = _induced_adjacency(net, sub_nodes)
            else:
                adj = full_adj
            count = 0
            total = 0
            if la == lb:
                for u in members[la]:
                    dist = bfs_distances(adj, u)
                    for v, d in dist.items():
                        if v > u and label_of[v] == la:
                            count += 1
                            total += d
            else:
                b_set = set(members[lb])
                for u in members[la]:
                    dist = bfs_distances(adj, u)
                    for v, d in dist.items():
                        if v != u and v in b_set:
                            count += 1
                            total += d
            if count:
                pair_counts[(la, lb)] = count
                pair_sums[(la, lb)] = total
    return GeodesicTable(
        tuple(labels), pair_counts, pair_sums, global_count, global_sum
    )


def yearly_distribution(
    net: Network,
    scope: Iterable[str],
    year_attribute: str,
    classes: str | Mapping[str, str],
    year_range: tuple[int, int] | None = None,
) -> YearlyTable:
    """Per-year class counts.

    `classes` is either a categorical attribute name or a precomputed
    node-to-class mapping (for cluster groups). Nodes missing the year or
    the class are skipped; so are years outside an optional inclusive
    range. Years with nothing counted do not appear.
    """
    if year_attribute not in net.schema:
        raise UnknownAttribute(year_attribute)
    if net.schema[year_attribute] != INTEGER:
        raise NotIntegerAttribute(year_attribute)
    nodes = _check_scope(net, scope)
    if isinstance(classes, str):
        if classes not in net.schema:
            raise UnknownAttribute(classes)
        if net.schema[classes] != CATEGORICAL:
            raise NotCategoricalAttribute(classes)
        class_of = {
            nid: net.record(nid).attributes.get(classes) for nid in nodes
        }
    else:
        class_of = {nid: classes.get(nid) for nid in nodes}
    counts: dict[tuple[int, str], int] = {}
    for nid in nodes:
        year = net.record(nid).attributes.get(year_attribute)
        cls = class_of[nid]
        if year is None or cls is None:
            continue
        if year_range is not None and not year_range[0] <= year <= year_range[1]:
            continue
        counts[(year, cls)] = counts.get((year, cls), 0) + 1
    years = tuple(sorted({y for (y, _) in counts}))
    class_labels = tuple(sorted({c for (_, c) in counts}))
    return YearlyTable(year_attribute, class_labels, years, counts)


def group_label_map(p: Partition, groups: Mapping[int, str]) -> dict[str, str]:
    """Node-to-label mapping induced by cluster group labels."""
    for c in range(p.k):
        if c not in groups:
            raise UnlabeledCluster(str(c))
    return {nid: groups[p.assignment[nid]] for nid in sorted(p.assignment)}

"""Attribute-labeled undirected simple graphs.

Edge direction, when declared, is kept as plain metadata: every structural
operation (degrees, components, subgraphs, clustering) treats the graph as
undirected.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateNodeId,
    SchemaMismatch,
    SelfLoop,
    UnknownEndpoint,
    UnknownNodeId,
)

CATEGORICAL = "categorical"
INTEGER = "integer"

DIRECTION_NONE = "none"
DIRECTION_UV = "uv"
DIRECTION_VU = "vu"

_DIRECTIONS = (DIRECTION_NONE, DIRECTION_UV, DIRECTION_VU)


@dataclass(frozen=True)
class NodeRecord:
    """A node identifier plus its attribute values.

    Missing attribute values are simply absent from the mapping.
    """

    id: str
    attributes: Mapping[str, str | int] = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    """Undirected edge stored with u < v (byte order of the id strings)."""

    u: str
    v: str
    direction: str = DIRECTION_NONE


class Network:
    """Immutable simple graph over string node ids.

    Built through :func:`build_network`; do not mutate after construction.
    """

    def __init__(
        self,
        records: dict[str, NodeRecord],
        edges: tuple[Edge, ...],
        schema: dict[str, str],
    ):
        self._records = records
        self.edges = edges
        self.schema = schema
        adj: dict[str, list[str]] = {nid: [] for nid in records}
        for e in edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        self._adj: dict[str, tuple[str, ...]] = {
            nid: tuple(sorted(nbrs)) for nid, nbrs in adj.items()
        }

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self._records)

    @property
    def node_count(self) -> int:
        return len(self._records)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_node(self, node_id: str) -> bool:
        return node_id in self._records

    def record(self, node_id: str) -> NodeRecord:
        try:
            return self._records[node_id]
        except KeyError:
            raise UnknownNodeId(node_id) from None

    def records(self) -> tuple[NodeRecord, ...]:
        return tuple(self._records.values())

    def neighbors(self, node_id: str) -> tuple[str, ...]:
        try:
            return self._adj[node_id]
        except KeyError:
            raise UnknownNodeId(node_id) from None

    def degree(self, node_id: str) -> int:
        return len(self.neighbors(node_id))

    def edge_declarations(self) -> tuple[tuple[str, str, str], ...]:
        """Edges as plain (u, v, direction) triples, canonical order."""
        return tuple((e.u, e.v, e.direction) for e in self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self._records == other._records
            and self.edges == other.edges
            and self.schema == other.schema
        )

    def __hash__(self):
        return hash((tuple(self._records), self.edges))

    def __repr__(self):
        return f"Network(n={self.node_count}, m={self.edge_count})"


def _infer_or_check_schema(
    records: Sequence[NodeRecord], schema: Mapping[str, str] | None
) -> dict[str, str]:
    if schema is not None:
        out = dict(sorted(schema.items()))
        for kind in out.values():
            if kind not in (CATEGORICAL, INTEGER):
                raise SchemaMismatch(f"unknown attribute kind {kind!r}")
        for rec in records:
            for name, value in rec.attributes.items():
                if name not in out:
                    raise SchemaMismatch(
                        f"node {rec.id!r} carries undeclared attribute {name!r}"
                    )
                _check_value(rec.id, name, value, out[name])
        return out
    inferred: dict[str, str] = {}
    for rec in records:
        for name, value in rec.attributes.items():
            kind = INTEGER if isinstance(value, int) and not isinstance(value, bool) else CATEGORICAL
            prev = inferred.get(name)
            if prev is None:
                inferred[name] = kind
            elif prev != kind:
                raise SchemaMismatch(
                    f"attribute {name!r} mixes integer and categorical values"
                )
    return dict(sorted(inferred.items()))


def _check_value(node_id: str, name: str, value: str | int, kind: str) -> None:
    if kind == INTEGER:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaMismatch(
                f"node {node_id!r}: attribute {name!r} expects an integer, got {value!r}"
            )
    else:
        if not isinstance(value, str):
            raise SchemaMismatch(
                f"node {node_id!r}: attribute {name!r} expects a category label, got {value!r}"
            )


def build_network(
    node_records: Iterable[NodeRecord],
    edge_declarations: Iterable[tuple] = (),
    schema: Mapping[str, str] | None = None,
) -> Network:
    """Assemble a Network from node records and raw edge declarations.

    Edge declarations are (u, v) or (u, v, direction) tuples. Duplicate
    unordered pairs collapse into a single edge; the stored direction comes
    from the first oriented declaration of that pair, otherwise none.
    Self-loops are rejected.
    """
    recs = list(node_records)
    by_id: dict[str, NodeRecord] = {}
    for rec in recs:
        if rec.id in by_id:
            raise DuplicateNodeId(rec.id)
        by_id[rec.id] = rec
    resolved_schema = _infer_or_check_schema(recs, schema)

    directions: dict[tuple[str, str], str] = {}
    for decl in edge_declarations:
        if len(decl) == 2:
            a, b = decl
            direction = DIRECTION_NONE
        else:
            a, b, direction = decl
        if direction not in _DIRECTIONS:
            raise SchemaMismatch(f"bad edge direction {direction!r}")
        if a not in by_id:
            raise UnknownEndpoint(a)
        if b not in by_id:
            raise UnknownEndpoint(b)
        if a == b:
            raise SelfLoop(a)
        if a > b:
            # flip into canonical u < v order, keeping the orientation
            a, b = b, a
            if direction == DIRECTION_UV:
                direction = DIRECTION_VU
            elif direction == DIRECTION_VU:
                direction = DIRECTION_UV
        pair = (a, b)
        prev = directions.get(pair)
        if prev is None or (prev == DIRECTION_NONE and direction != DIRECTION_NONE):
            directions[pair] = direction

    ordered = dict(sorted(by_id.items()))
    edges = tuple(Edge(u, v, d) for (u, v), d in sorted(directions.items()))
    return Network(ordered, edges, resolved_schema)


def connected_components(net: Network) -> list[frozenset[str]]:
    """Components sorted by size descending, ties by smallest contained id."""
    seen: set[str] = set()
    components: list[frozenset[str]] = []
    for start in net.node_ids:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        members = [start]
        while queue:
            cur = queue.popleft()
            for nb in net.neighbors(cur):
                if nb not in seen:
                    seen.add(nb)
                    members.append(nb)
                    queue.append(nb)
        components.append(frozenset(members))
    components.sort(key=lambda c: (-len(c), min(c)))
    return components


def giant_component(net: Network) -> frozenset[str]:
    comps = connected_components(net)
    if not comps:
        return frozenset()
    return comps[0]


def induced_subgraph(net: Network, keep: Iterable[str]) -> Network:
    """Subgraph on `keep`, retaining attributes and edge direction."""
    keep_set = set(keep)
    for nid in keep_set:
        if not net.has_node(nid):
            raise UnknownNodeId(nid)
    records = {nid: net.record(nid) for nid in sorted(keep_set)}
    edges = tuple(e for e in net.edges if e.u in keep_set and e.v in keep_set)
    return Network(records, edges, net.schema)


def degree_sequence(net: Network) -> tuple[int, ...]:
    """Node degrees as a sorted multiset."""
    return tuple(sorted(net.degree(nid) for nid in net.node_ids))

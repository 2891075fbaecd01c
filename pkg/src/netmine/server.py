"""In-memory exploration sessions behind a JSON HTTP API.

One dataset can back many sessions; each session owns a partition of the
dataset's giant component, a styled layout, optional overlays, group labels,
and an undo/redo history of hierarchy steps. Mutating endpoints return the
full state payload so clients never compute statistics themselves.
"""

from __future__ import annotations

import hashlib
import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Mapping

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response

from . import io_formats as iof
from .clustering import (
    ClusterGraph,
    Partition,
    build_cluster_graph,
    cluster,
    coarsen,
    refine,
)
from .errors import (
    BadTarget,
    MissingArtifact,
    NetmineError,
    NothingToRedo,
    NothingToUndo,
    UnknownCluster,
    UnknownDataset,
    UnknownSession,
)
from .graph import Network, giant_component, induced_subgraph
from .layout import (
    DEFAULT_ITERATIONS,
    LayoutResult,
    StyledLayout,
    fr_layout,
    style_overlay,
)
from .significance import (
    DEFAULT_REPLICATES,
    DEFAULT_SWAPS_PER_EDGE,
    NullModelSummary,
    degree_fingerprint,
    is_significant,
    mix_seed,
    null_threshold,
)
from .stats import (
    GeodesicTable,
    TestOverlay,
    YearlyTable,
    chi_squared_overlay,
    geodesic_table_by_groups,
    group_label_map,
    yearly_distribution,
)

_STATUS_BY_ERROR = {
    "UnknownDataset": 404,
    "UnknownSession": 404,
    "NothingToUndo": 409,
    "NothingToRedo": 409,
}


@dataclass(frozen=True)
class _Snapshot:
    """Everything observable about a session at one history position."""

    partition: Partition
    cluster_graph: ClusterGraph
    layout: LayoutResult
    styled: StyledLayout
    overlay: TestOverlay | None
    overlay_params: tuple[str, str | None, float] | None
    groups: dict[int, str] | None
    geodesic_table: GeodesicTable | None
    yearly_table: YearlyTable | None
    step: dict | None  # the hierarchy step that produced this snapshot


@dataclass
class SessionState:
    """One interactive mining session over a dataset's giant component."""

    id: str
    dataset_id: str
    net: Network  # induced on the giant component
    seed: int
    replicates: int
    swaps_per_edge: int
    iterations: int
    partition: Partition = field(init=False)
    cluster_graph: ClusterGraph = field(init=False)
    layout: LayoutResult = field(init=False)
    styled: StyledLayout = field(init=False)
    overlay: TestOverlay | None = None
    overlay_params: tuple[str, str | None, float] | None = None
    groups: dict[int, str] | None = None
    geodesic_table: GeodesicTable | None = None
    yearly_table: YearlyTable | None = None
    history: list[_Snapshot] = field(default_factory=list)
    cursor: int = 0
    null_cache: dict[tuple[str, int, int], NullModelSummary] = field(default_factory=dict)
    verdict_cache: dict[str, dict] = field(default_factory=dict)
    global_null: NullModelSummary | None = None
    lock: threading.RLock = field(default_factory=threading.RLock)

    def __post_init__(self):
        self.partition = cluster(self.net, self.seed)
        self.cluster_graph = build_cluster_graph(self.net, self.partition)
        self.layout = fr_layout(self.cluster_graph, self.seed, self.iterations)
        self.styled = _neutral_style(self.layout)
        self.history = [self._snapshot(step=None)]
        self.cursor = 0

    # -- history plumbing --

    def _snapshot(self, step: dict | None) -> _Snapshot:
        return _Snapshot(
            partition=self.partition,
            cluster_graph=self.cluster_graph,
            layout=self.layout,
            styled=self.styled,
            overlay=self.overlay,
            overlay_params=self.overlay_params,
            groups=dict(self.groups) if self.groups is not None else None,
            geodesic_table=self.geodesic_table,
            yearly_table=self.yearly_table,
            step=step,
        )

    def _restore(self, snap: _Snapshot) -> None:
        self.partition = snap.partition
        self.cluster_graph = snap.cluster_graph
        self.layout = snap.layout
        self.styled = snap.styled
        self.overlay = snap.overlay
        self.overlay_params = snap.overlay_params
        self.groups = dict(snap.groups) if snap.groups is not None else None
        self.geodesic_table = snap.geodesic_table
        self.yearly_table = snap.yearly_table

    def sync_current(self) -> None:
        """Fold non-hierarchy drift (overlays, groups) into the cursor slot."""
        step = self.history[self.cursor].step
        self.history[self.cursor] = self._snapshot(step)

    def push(self, step: dict) -> None:
        del self.history[self.cursor + 1 :]
        self.history.append(self._snapshot(step))
        self.cursor += 1

    def undo(self) -> None:
        if self.cursor == 0:
            raise NothingToUndo("already at the initial state")
        self.sync_current()
        self.cursor -= 1
        self._restore(self.history[self.cursor])

    def redo(self) -> None:
        if self.cursor >= len(self.history) - 1:
            raise NothingToRedo("already at the newest state")
        self.sync_current()
        self.cursor += 1
        self._restore(self.history[self.cursor])

    # -- derived state --

    def apply_partition(self, child: Partition, step: dict) -> None:
        """Install a new partition: metagraph, warm-started layout, overlays."""
        # capture overlay/group drift into the slot we are about to leave,
        # while the live fields still describe the parent state
        self.sync_current()
        parent = self.partition
        parent_layout = self.layout
        self.partition = child
        self.cluster_graph = build_cluster_graph(self.net, child)
        initial: dict[int, tuple[float, float]] = {}
        members_first: dict[int, str] = {}
        for node in sorted(child.assignment):
            c = child.assignment[node]
            if c not in members_first:
                members_first[c] = node
        for c, node in members_first.items():
            pc = parent.assignment.get(node)
            if pc is not None and pc in parent_layout.positions:
                initial[c] = parent_layout.positions[pc]
        self.layout = fr_layout(
            self.cluster_graph,
            mix_seed(self.seed, len(self.history)),
            self.iterations,
            initial=initial,
        )
        # group labels refer to parent cluster ids; they do not survive
        self.groups = None
        self.geodesic_table = None
        self.yearly_table = None
        if self.overlay_params is not None:
            attribute, category, alpha = self.overlay_params
            self.overlay = chi_squared_overlay(self.net, child, attribute)
            self.styled = style_overlay(self.layout, self.overlay, category, alpha)
        else:
            self.overlay = None
            self.styled = _neutral_style(self.layout)
        self.push(step)

    def payload(self, full: bool = False) -> dict:
        partition_obj: dict[str, Any] = {
            "k": self.partition.k,
            "modularity": self.partition.modularity,
            "sizes": list(self.partition.sizes()),
        }
        observable = {
            "partition": partition_obj,
            "cluster_graph": iof.cluster_graph_to_obj(
                self.cluster_graph, self.net.edge_count
            ),
            "layout": iof.layout_to_obj(self.styled),
            "overlay": iof.overlay_to_obj(self.overlay) if self.overlay else None,
            "overlay_params": (
                {
                    "attribute": self.overlay_params[0],
                    "category": self.overlay_params[1],
                    "alpha": self.overlay_params[2],
                }
                if self.overlay_params
                else None
            ),
            "groups": (
                {str(c): label for c, label in sorted(self.groups.items())}
                if self.groups is not None
                else None
            ),
            "tables": {
                "geodesic": iof.geodesic_to_obj(self.geodesic_table)
                if self.geodesic_table
                else None,
                "yearly": iof.yearly_to_obj(self.yearly_table)
                if self.yearly_table
                else None,
            },
        }
        # hash the summary view so detail level never changes the hash
        state_hash = iof.sha256_hex(iof.canonical_json_bytes(observable))
        if full:
            partition_obj["assignment"] = dict(sorted(self.partition.assignment.items()))
        verdicts = {}
        for c in range(self.partition.k):
            cached = self.verdict_cache.get(self._verdict_key(c))
            if cached is not None:
                verdicts[str(c)] = cached
        return {
            "format_version": iof.FORMAT_VERSION,
            "session": self.id,
            "dataset": self.dataset_id,
            "seed": self.seed,
            "n": self.net.node_count,
            "m": self.net.edge_count,
            "schema": dict(self.net.schema),
            **observable,
            "history": {
                "cursor": self.cursor,
                "length": len(self.history),
                "steps": [
                    {"kind": s.step["kind"], "affected": s.step["affected"], "k": s.partition.k}
                    if s.step
                    else {"kind": "initial", "affected": [], "k": s.partition.k}
                    for s in self.history
                ],
            },
            "significance": {
                "global": (
                    {
                        "threshold": self.global_null.threshold,
                        "replicates": self.global_null.replicates,
                        "observed_q": self.partition.modularity,
                        "significant": is_significant(
                            self.partition.modularity, self.global_null
                        ),
                    }
                    if self.global_null
                    else None
                ),
                "verdicts": verdicts,
            },
            "state_hash": state_hash,
        }

    def _verdict_key(self, target: int) -> str:
        members = ",".join(sorted(self.partition.members(target)))
        key = f"{members}|{self.replicates}|{self.swaps_per_edge}|{self.seed}"
        return hashlib.sha256(key.encode("utf-8")).hexdigest()

    def gate(self, target: int) -> dict:
        """Cached verdict on whether `target` hides significant substructure."""
        key = self._verdict_key(target)
        cached = self.verdict_cache.get(key)
        if cached is not None:
            return cached
        members = self.partition.members(target)
        sub = induced_subgraph(self.net, members)
        if sub.edge_count < 2:
            verdict = {
                "cluster": target,
                "accepted": False,
                "sub_k": 1,
                "sub_q": None,
                "threshold": None,
                "reason": "fewer than 2 internal edges",
            }
            self.verdict_cache[key] = verdict
            return verdict
        sub_p = cluster(sub, self.seed)
        fp = degree_fingerprint(sub)
        null_key = (fp, self.replicates, self.seed)
        summary = self.null_cache.get(null_key)
        if summary is None:
            summary = null_threshold(
                sub, self.replicates, self.seed, self.swaps_per_edge
            )
            self.null_cache[null_key] = summary
        accepted = sub_p.k >= 2 and is_significant(sub_p.modularity, summary)
        verdict = {
            "cluster": target,
            "accepted": accepted,
            "sub_k": sub_p.k,
            "sub_q": sub_p.modularity,
            "threshold": summary.threshold,
            "reason": None if accepted else "does not beat its own null model",
        }
        self.verdict_cache[key] = verdict
        return verdict

    def ensure_global_null(self) -> NullModelSummary:
        if self.global_null is None:
            fp = degree_fingerprint(self.net)
            key = (fp, self.replicates, self.seed)
            summary = self.null_cache.get(key)
            if summary is None:
                summary = null_threshold(
                    self.net, self.replicates, self.seed, self.swaps_per_edge
                )
                self.null_cache[key] = summary
            self.global_null = summary
        return self.global_null


def _neutral_style(layout: LayoutResult) -> StyledLayout:
    ids = sorted(layout.positions)
    return StyledLayout(
        layout=layout,
        mode="p_value",
        category=None,
        alpha=0.05,
        darkness={c: 0.0 for c in ids},
        shape={c: "circle" for c in ids},
        atypical={c: False for c in ids},
        value={c: None for c in ids},
    )


class _Registry:
    def __init__(self):
        self.datasets: dict[str, Network] = {}
        self.sessions: dict[str, SessionState] = {}
        self.lock = threading.Lock()
        self._session_counter = itertools.count(1)

    def add_dataset(self, net: Network) -> str:
        dataset_id = iof.sha256_hex(
            iof.canonical_json_bytes(iof.network_to_obj(net))
        )[:16]
        with self.lock:
            self.datasets[dataset_id] = net
        return dataset_id

    def dataset(self, dataset_id: str) -> Network:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise UnknownDataset(dataset_id) from None

    def new_session(self, dataset_id: str, seed: int, replicates: int,
                    swaps_per_edge: int, iterations: int) -> SessionState:
        net = self.dataset(dataset_id)
        giant = giant_component(net)
        scoped = induced_subgraph(net, giant)
        with self.lock:
            session_id = f"s{next(self._session_counter)}"
        sess = SessionState(
            id=session_id,
            dataset_id=dataset_id,
            net=scoped,
            seed=seed,
            replicates=replicates,
            swaps_per_edge=swaps_per_edge,
            iterations=iterations,
        )
        with self.lock:
            self.sessions[session_id] = sess
        return sess

    def session(self, session_id: str) -> SessionState:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None


def create_app() -> FastAPI:
    app = FastAPI(title="netmine", docs_url=None, redoc_url=None)
    registry = _Registry()
    app.state.registry = registry

    @app.exception_handler(NetmineError)
    async def _domain_error(_request: Request, exc: NetmineError):
        code = type(exc).__name__
        return JSONResponse(
            status_code=_STATUS_BY_ERROR.get(code, 400),
            content={"code": code, "message": str(exc), "detail": None},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"code": "InvalidParameter", "message": str(exc), "detail": None},
        )

    @app.exception_handler(OSError)
    async def _os_error(_request: Request, exc: OSError):
        return JSONResponse(
            status_code=400,
            content={"code": "IOError", "message": str(exc), "detail": None},
        )

    @app.post("/datasets")
    def post_dataset(body: dict = Body(...)):
        if "manifest_path" in body:
            manifest = iof.load_manifest(body["manifest_path"])
        elif "manifest" in body:
            manifest = iof.manifest_from_obj(
                body["manifest"], base_dir=body.get("base_dir", ".")
            )
        else:
            raise ValueError("body needs 'manifest' or 'manifest_path'")
        net = iof.read_dataset(manifest)
        dataset_id = registry.add_dataset(net)
        return {
            "dataset": dataset_id,
            "n": net.node_count,
            "m": net.edge_count,
            "schema": dict(net.schema),
        }

    @app.post("/sessions")
    def post_session(body: dict = Body(...)):
        if "dataset" not in body:
            raise ValueError("body needs 'dataset'")
        seed = int(body.get("seed", 0))
        replicates = int(body.get("replicates", DEFAULT_REPLICATES))
        swaps = int(body.get("swaps_per_edge", DEFAULT_SWAPS_PER_EDGE))
        iterations = int(body.get("iterations", DEFAULT_ITERATIONS))
        if replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {replicates}")
        if swaps < 1:
            raise ValueError(f"swaps_per_edge must be >= 1, got {swaps}")
        sess = registry.new_session(body["dataset"], seed, replicates, swaps, iterations)
        with sess.lock:
            return {"session": sess.id, "state": sess.payload()}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        sess = registry.session(session_id)
        with sess.lock:
            return sess.payload()

    @app.post("/sessions/{session_id}/refine")
    def post_refine(session_id: str, body: dict = Body(...)):
        sess = registry.session(session_id)
        targets = body.get("clusters")
        if not isinstance(targets, list) or not targets:
            raise ValueError("body needs a non-empty 'clusters' list")
        with sess.lock:
            k = sess.partition.k
            parsed = []
            for t in targets:
                if not isinstance(t, int) or not 0 <= t < k:
                    raise UnknownCluster(str(t))
                parsed.append(t)
            verdicts = [sess.gate(t) for t in sorted(set(parsed))]
            accepted = [v["cluster"] for v in verdicts if v["accepted"]]
            if accepted:
                child, step = refine(sess.net, sess.partition, accepted, sess.seed)
                sess.apply_partition(
                    child, {"kind": "refine", "affected": list(step.affected)}
                )
            return {"verdicts": verdicts, "state": sess.payload()}

    @app.post("/sessions/{session_id}/coarsen")
    def post_coarsen(session_id: str, body: dict = Body(...)):
        sess = registry.session(session_id)
        if "target_k" not in body:
            raise ValueError("body needs 'target_k'")
        target_k = body["target_k"]
        if not isinstance(target_k, int):
            raise BadTarget(f"target_k must be an integer, got {target_k!r}")
        with sess.lock:
            summary = sess.ensure_global_null()
            child, step = coarsen(sess.net, sess.partition, target_k)
            sess.apply_partition(
                child, {"kind": "coarsen", "affected": list(step.affected)}
            )
            return {
                "significant": is_significant(child.modularity, summary),
                "threshold": summary.threshold,
                "state": sess.payload(),
            }

    @app.post("/sessions/{session_id}/overlay")
    def post_overlay(session_id: str, body: dict = Body(...)):
        sess = registry.session(session_id)
        attribute = body.get("attribute")
        if not attribute:
            raise ValueError("body needs 'attribute'")
        category = body.get("category")
        alpha = float(body.get("alpha", 0.05))
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        with sess.lock:
            overlay = chi_squared_overlay(sess.net, sess.partition, attribute)
            styled = style_overlay(sess.layout, overlay, category, alpha)
            sess.overlay = overlay
            sess.overlay_params = (attribute, category, alpha)
            sess.styled = styled
            sess.sync_current()
            return {"state": sess.payload()}

    @app.post("/sessions/{session_id}/groups")
    def post_groups(session_id: str, body: dict = Body(...)):
        sess = registry.session(session_id)
        labels = body.get("labels")
        if not isinstance(labels, dict) or not labels:
            raise ValueError("body needs a non-empty 'labels' mapping")
        year_attribute = body.get("year_attribute")
        with sess.lock:
            groups = {int(c): str(label) for c, label in labels.items()}
            table = geodesic_table_by_groups(sess.net, sess.partition, groups)
            sess.groups = groups
            sess.geodesic_table = table
            if year_attribute:
                label_map = group_label_map(sess.partition, groups)
                sess.yearly_table = yearly_distribution(
                    sess.net, sess.partition.scope, year_attribute, label_map
                )
            else:
                sess.yearly_table = None
            sess.sync_current()
            return {"state": sess.payload()}

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        sess = registry.session(session_id)
        with sess.lock:
            sess.undo()
            return {"state": sess.payload()}

    @app.post("/sessions/{session_id}/redo")
    def post_redo(session_id: str):
        sess = registry.session(session_id)
        with sess.lock:
            sess.redo()
            return {"state": sess.payload()}

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str, kind: str = Query("json")):
        sess = registry.session(session_id)
        with sess.lock:
            data, media_type = iof.export_session(sess, kind)
        return Response(content=data, media_type=media_type)

    return app


app = create_app()

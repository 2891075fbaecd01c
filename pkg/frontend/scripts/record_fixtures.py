"""Record HTTP fixtures for the frontend test suite.

Drives the real API in-process and captures every response the browser
client is tested against, so the TypeScript suite exercises genuine
payloads without needing a live server.

Usage: python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import os
import sys
import tempfile

from fastapi.testclient import TestClient

from netmine.graph import NodeRecord, build_network
from netmine.server import create_app
from netmine.synth import write_dataset

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURE_DIR = os.path.join(HERE, "..", "tests", "fixtures")
sys.path.insert(0, os.path.join(HERE, "..", "..", "tests"))

from toys import colored_cliques_bridged, ring_of_cliques  # noqa: E402


def _save(name: str, obj) -> None:
    path = os.path.join(FIXTURE_DIR, f"{name}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {os.path.relpath(path, os.path.join(HERE, '..'))}")


def _register(client: TestClient, net_name: str, net) -> str:
    d = tempfile.mkdtemp(prefix=f"fixture_{net_name}_")
    write_dataset(net, {}, d)
    resp = client.post("/datasets", json={"manifest_path": os.path.join(d, "manifest.json")})
    resp.raise_for_status()
    return resp.json()["dataset"]


def main() -> None:
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    client = TestClient(create_app())

    # -- two colored 4-cliques: overlay, tables, and a rejected refine
    colored = _register(client, "colored", colored_cliques_bridged(4))
    resp = client.post(
        "/sessions", json={"dataset": colored, "replicates": 5, "seed": 0}
    )
    resp.raise_for_status()
    opened = resp.json()
    session = opened["session"]
    _save("colored_initial", opened)

    resp = client.post(f"/sessions/{session}/refine", json={"clusters": [0]})
    resp.raise_for_status()
    _save("colored_refine_rejected", resp.json())

    resp = client.post(
        f"/sessions/{session}/overlay", json={"attribute": "color", "alpha": 0.05}
    )
    resp.raise_for_status()
    _save("colored_overlay", resp.json())

    resp = client.post(
        f"/sessions/{session}/groups",
        json={"labels": {"0": "left", "1": "right"}, "year_attribute": "year"},
    )
    resp.raise_for_status()
    _save("colored_groups", resp.json())

    resp = client.post(f"/sessions/{session}/overlay", json={"attribute": "nope"})
    assert resp.status_code == 400
    _save("error_unknown_attribute", resp.json())

    # -- ring of cliques: slider coarsening, undo chain, accepted refine
    ring = _register(client, "ring", ring_of_cliques(28, 5))
    resp = client.post("/sessions", json={"dataset": ring, "replicates": 5, "seed": 0})
    resp.raise_for_status()
    opened = resp.json()
    session = opened["session"]
    _save("ring_initial", opened)

    resp = client.post(f"/sessions/{session}/coarsen", json={"target_k": 15})
    resp.raise_for_status()
    _save("ring_coarsen_15", resp.json())

    resp = client.post(f"/sessions/{session}/coarsen", json={"target_k": 14})
    resp.raise_for_status()
    _save("ring_coarsen_14", resp.json())

    resp = client.post(f"/sessions/{session}/undo")
    resp.raise_for_status()
    _save("ring_undo_to_15", resp.json())

    resp = client.post(f"/sessions/{session}/undo")
    resp.raise_for_status()
    _save("ring_undo_to_initial", resp.json())

    resp = client.post("/sessions", json={"dataset": ring, "replicates": 5, "seed": 0})
    resp.raise_for_status()
    session = resp.json()["session"]
    resp = client.post(f"/sessions/{session}/refine", json={"clusters": [0]})
    resp.raise_for_status()
    _save("ring_refine_accepted", resp.json())


if __name__ == "__main__":
    main()

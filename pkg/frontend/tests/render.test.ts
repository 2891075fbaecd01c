import { describe, expect, it } from "vitest";

import { describeCluster, grayFill, renderMetagraph } from "../src/render.js";
import type { SessionOpened, StateResponse } from "../src/types.js";
import { clone, loadFixture, openedState } from "./helpers.js";

const INITIAL = openedState("colored_initial");
const STYLED = loadFixture<StateResponse>("colored_overlay").state;
const RING = openedState("ring_initial");

function grayLevel(fill: string): number {
  const match = /^rgb\((\d+),\d+,\d+\)$/.exec(fill);
  if (!match) {
    throw new Error(`not a gray fill: ${fill}`);
  }
  return Number(match[1]);
}

describe("metagraph projection", () => {
  it("draws one element per cluster and one line per metagraph edge", () => {
    const svg = renderMetagraph(INITIAL);
    expect(svg.match(/data-cluster="/g)).toHaveLength(INITIAL.layout.nodes.length);
    expect(svg.match(/<line /g)).toHaveLength(INITIAL.layout.edges.length);
    const ringSvg = renderMetagraph(RING);
    expect(ringSvg.match(/data-cluster="/g)).toHaveLength(16);
  });

  it("follows the payload shape field exactly: circle vs square", () => {
    const svg = renderMetagraph(INITIAL);
    for (const node of INITIAL.layout.nodes) {
      expect(node.shape).toBe("circle");
      expect(svg).toContain(`<circle`);
    }
    expect(svg).not.toContain("<rect");

    const squared = clone(INITIAL);
    squared.layout.nodes[0]!.shape = "square";
    const mixed = renderMetagraph(squared);
    expect(mixed.match(/<rect /g)).toHaveLength(1);
    expect(mixed.match(/<circle /g)).toHaveLength(1);
    expect(mixed).toContain('<rect');
  });

  it("keeps square and circle footprints comparable (side = r * sqrt(pi))", () => {
    const squared = clone(INITIAL);
    squared.layout.nodes[0]!.shape = "square";
    const svg = renderMetagraph(squared);
    const rect = /<rect x="[0-9.e-]+" y="[0-9.e-]+" width="([0-9.e-]+)"/.exec(svg);
    const circle = /<circle cx="[0-9.e-]+" cy="[0-9.e-]+" r="([0-9.e-]+)"/.exec(svg);
    expect(rect).not.toBeNull();
    expect(circle).not.toBeNull();
    const side = Number(rect![1]);
    const r = Number(circle![1]);
    // same payload radius on both nodes, so areas must match
    expect(side * side).toBeCloseTo(Math.PI * r * r, 9);
  });

  it("maps darkness 0 to the lightest gray and darker values to darker fills", () => {
    expect(grayFill(0)).toBe("rgb(245,245,245)");
    expect(grayFill(1)).toBe("rgb(50,50,50)");
    const l0 = grayLevel(grayFill(0));
    const lMid = grayLevel(grayFill(0.3));
    const lHigh = grayLevel(grayFill(0.9));
    expect(l0).toBeGreaterThan(lMid);
    expect(lMid).toBeGreaterThan(lHigh);
    // out-of-range inputs clamp instead of overflowing the gray ramp
    expect(grayFill(-1)).toBe(grayFill(0));
    expect(grayFill(2)).toBe(grayFill(1));
  });

  it("renders edge thickness verbatim from the payload", () => {
    const svg = renderMetagraph(INITIAL);
    for (const edge of INITIAL.layout.edges) {
      expect(svg).toContain(`stroke-width="${edge.thickness}"`);
    }
  });

  it("re-shading with an overlay changes fills but not geometry", () => {
    const before = renderMetagraph(INITIAL);
    const after = renderMetagraph(STYLED);
    expect(after).not.toBe(before);
    const lineOf = (svg: string) => /<line [^>]*\/>/.exec(svg)?.[0];
    expect(lineOf(after)).toBe(lineOf(before));
    const centers = (svg: string) =>
      [...svg.matchAll(/<circle cx="([0-9.e-]+)" cy="([0-9.e-]+)"/g)].map((m) => [
        m[1],
        m[2],
      ]);
    expect(centers(after)).toEqual(centers(before));
    const fills = (svg: string) => [...svg.matchAll(/fill="(rgb[^"]+)"/g)].map((m) => m[1]);
    expect(fills(after)).not.toEqual(fills(before));
    expect(fills(after)[0]).toBe(grayFill(STYLED.layout.nodes[0]!.darkness));
  });
});

describe("hover text", () => {
  it("carries cluster size and modularity share verbatim", () => {
    const svg = renderMetagraph(INITIAL);
    for (const node of INITIAL.cluster_graph.nodes) {
      const lines = describeCluster(INITIAL, node.id);
      expect(lines).toContain(`n=${node.size}`);
      expect(lines).toContain(`q=${node.q_contribution}`);
      expect(svg).toContain(`q=${node.q_contribution}`);
    }
    expect(svg).toContain("q=0.21153846153846156");
  });

  it("shows the overlay test numbers verbatim when an overlay is active", () => {
    const svg = renderMetagraph(STYLED);
    for (const row of STYLED.overlay!.clusters) {
      expect(svg).toContain(`X2=${row.statistic} df=${row.df} p=${row.p_value}`);
      for (const [category, residual] of Object.entries(row.residuals)) {
        expect(svg).toContain(`residual ${category}=${residual}`);
      }
    }
    expect(svg).toContain("p=0.31731050786291404");
    expect(svg).toContain("(low counts)");
  });

  it("includes the painted group label when groups are set", () => {
    const grouped = loadFixture<StateResponse>("colored_groups").state;
    expect(describeCluster(grouped, 0)).toContain("group=left");
    expect(describeCluster(grouped, 1)).toContain("group=right");
    expect(describeCluster(INITIAL, 0).some((l) => l.startsWith("group="))).toBe(false);
  });
});

/** SVG rendering of the cluster metagraph.
 *
 * Pure projection: geometry, shading, and every number in the hover text
 * come straight from the server payload. The only client-side work is
 * scaling layout units to pixels and mapping darkness to a gray fill.
 */

import type { StatePayload } from "./types.js";

export const VIEW_WIDTH = 720;

const LIGHTEST = 245;
const DARKEST = 50;

export function grayFill(darkness: number): string {
  const clamped = Math.min(1, Math.max(0, darkness));
  const level = Math.round(LIGHTEST - (LIGHTEST - DARKEST) * clamped);
  return `rgb(${level},${level},${level})`;
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Hover lines for one cluster; all numbers verbatim payload fields. */
export function describeCluster(state: StatePayload, id: number): string[] {
  const lines = [`cluster ${id}`];
  const meta = state.cluster_graph.nodes.find((node) => node.id === id);
  if (meta) {
    lines.push(`n=${meta.size}`);
    lines.push(`q=${meta.q_contribution}`);
  }
  if (state.overlay) {
    const row = state.overlay.clusters.find((r) => r.cluster === id);
    if (row) {
      const flag = row.low_count ? " (low counts)" : "";
      lines.push(`X2=${row.statistic} df=${row.df} p=${row.p_value}${flag}`);
      for (const category of Object.keys(row.residuals).sort()) {
        lines.push(`residual ${category}=${row.residuals[category]}`);
      }
    }
  }
  if (state.groups && state.groups[String(id)] !== undefined) {
    lines.push(`group=${state.groups[String(id)]}`);
  }
  return lines;
}

export function renderMetagraph(state: StatePayload): string {
  const layout = state.layout;
  const [x0, y0, x1, y1] = layout.bounding_box;
  const boxWidth = Math.max(x1 - x0, 1e-9);
  const boxHeight = Math.max(y1 - y0, 1e-9);
  const scale = VIEW_WIDTH / boxWidth;
  const height = boxHeight * scale;

  const px = (x: number) => (x - x0) * scale;
  const py = (y: number) => (y - y0) * scale;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${VIEW_WIDTH} ${height}" ` +
      `width="${VIEW_WIDTH}" height="${height}" role="img">`
  );

  const byId = new Map(layout.nodes.map((node) => [node.id, node]));
  for (const edge of layout.edges) {
    const a = byId.get(edge.a);
    const b = byId.get(edge.b);
    if (!a || !b) {
      continue;
    }
    parts.push(
      `<line x1="${px(a.x)}" y1="${py(a.y)}" x2="${px(b.x)}" y2="${py(b.y)}" ` +
        `stroke="#777" stroke-width="${edge.thickness}" data-edge="${edge.a}-${edge.b}" />`
    );
  }

  for (const node of layout.nodes) {
    const title = `<title>${escapeXml(describeCluster(state, node.id).join("\n"))}</title>`;
    const fill = grayFill(node.darkness);
    const r = node.radius * scale;
    const common =
      `fill="${fill}" stroke="#333" stroke-width="1" data-cluster="${node.id}" ` +
      `class="cluster-node${node.atypical ? " atypical" : ""}"`;
    if (node.shape === "square") {
      const side = r * Math.sqrt(Math.PI);
      parts.push(
        `<rect x="${px(node.x) - side / 2}" y="${py(node.y) - side / 2}" ` +
          `width="${side}" height="${side}" ${common}>${title}</rect>`
      );
    } else {
      parts.push(
        `<circle cx="${px(node.x)}" cy="${py(node.y)}" r="${r}" ${common}>${title}</circle>`
      );
    }
  }

  parts.push("</svg>");
  return parts.join("\n");
}

/** Shapes of the server's JSON payloads. Field names mirror the API. */

export type Shape = "circle" | "square";

export interface LayoutNode {
  id: number;
  x: number;
  y: number;
  radius: number;
  darkness: number;
  shape: Shape;
  atypical: boolean;
  value: number | null;
}

export interface LayoutEdge {
  a: number;
  b: number;
  thickness: number;
}

export interface LayoutObj {
  format_version: string;
  kind: "layout";
  seed: number;
  iterations: number;
  bounding_box: [number, number, number, number];
  mode: string | null;
  category: string | null;
  alpha: number | null;
  nodes: LayoutNode[];
  edges: LayoutEdge[];
}

export interface ClusterGraphNode {
  id: number;
  size: number;
  internal: number;
  degree: number;
  q_contribution: number;
}

export interface ClusterGraphObj {
  format_version: string;
  kind: "cluster_graph";
  m: number;
  nodes: ClusterGraphNode[];
  edges: { a: number; b: number; weight: number }[];
}

export interface OverlayClusterRow {
  cluster: number;
  n: number;
  statistic: number;
  df: number;
  p_value: number;
  residuals: Record<string, number>;
  low_count: boolean;
}

export interface OverlayObj {
  format_version: string;
  kind: "overlay";
  attribute: string;
  categories: string[];
  global_counts: number[];
  clusters: OverlayClusterRow[];
}

export interface GeodesicObj {
  format_version: string;
  kind: "geodesic_table";
  labels: string[];
  cells: [string, string, number, number][];
  global_count: number;
  global_sum: number;
}

export interface YearlyRow {
  year: number;
  counts: Record<string, number>;
}

export interface YearlyObj {
  format_version: string;
  kind: "yearly_table";
  year_attribute: string;
  classes: string[];
  rows: YearlyRow[];
}

export interface HistoryStep {
  kind: string;
  affected: number[];
  k: number;
}

export interface HistoryObj {
  cursor: number;
  length: number;
  steps: HistoryStep[];
}

export interface Verdict {
  cluster: number;
  accepted: boolean;
  sub_k: number | null;
  sub_q: number | null;
  threshold: number | null;
  reason?: string | null;
}

export interface GlobalSignificance {
  threshold: number;
  replicates: number;
  observed_q: number;
  significant: boolean;
}

export interface SignificanceObj {
  global: GlobalSignificance | null;
  verdicts: Record<string, Verdict>;
}

export interface PartitionSummary {
  k: number;
  modularity: number;
  sizes: number[];
  assignment?: Record<string, number>;
}

export interface OverlayParams {
  attribute: string;
  category: string | null;
  alpha: number;
}

export interface StatePayload {
  format_version: string;
  session: string;
  dataset: string;
  seed: number;
  n: number;
  m: number;
  schema: Record<string, string>;
  partition: PartitionSummary;
  cluster_graph: ClusterGraphObj;
  layout: LayoutObj;
  overlay: OverlayObj | null;
  overlay_params: OverlayParams | null;
  groups: Record<string, string> | null;
  tables: { geodesic: GeodesicObj | null; yearly: YearlyObj | null };
  history: HistoryObj;
  significance: SignificanceObj;
  state_hash: string;
}

export interface SessionOpened {
  session: string;
  state: StatePayload;
}

export interface DatasetRegistered {
  dataset: string;
  n: number;
  m: number;
  schema: Record<string, string>;
}

export interface RefineResponse {
  verdicts: Verdict[];
  state: StatePayload;
}

export interface CoarsenResponse {
  significant: boolean;
  threshold: number;
  state: StatePayload;
}

export interface StateResponse {
  state: StatePayload;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

/** Session controller: gestures in, server state out.
 *
 * Every gesture issues exactly one API call per detent and replaces the
 * held state with the payload the server returned. The view model below is
 * a pure projection of that payload — no statistic, coordinate, or verdict
 * is computed client-side.
 */

import { NetmineClient, SchemaVersionError } from "./api.js";
import { renderMetagraph } from "./render.js";
import {
  renderGeodesicTable,
  renderYearlyTable,
  verdictToast,
} from "./tables.js";
import type { StatePayload, Verdict } from "./types.js";

export interface GestureRecord {
  kind: "refine" | "coarsen" | "overlay" | "groups" | "undo" | "redo";
  cursorBefore: number;
  send: () => Promise<void>;
}

export interface SliderMark {
  k: number;
  significant: boolean;
}

export interface ViewModel {
  svg: string;
  k: number;
  modularity: string;
  stateHash: string;
  canUndo: boolean;
  canRedo: boolean;
  sliderMax: number;
  sliderMarks: SliderMark[];
  geodesicHtml: string | null;
  yearlyHtml: string | null;
  overlayLabel: string | null;
  toasts: string[];
  banner: string | null;
  busy: boolean;
}

export class SessionController {
  private state: StatePayload;
  private busy = false;
  private toasts: string[] = [];
  private banner: string | null = null;
  private lastGesture: GestureRecord | null = null;
  /** Largest k seen in this session; upper end of the coarsen slider. */
  private maxK: number;
  /** Significance marks keyed by k, harvested from server responses only. */
  private readonly significanceByK = new Map<number, boolean>();

  constructor(
    private readonly client: NetmineClient,
    private readonly session: string,
    initial: StatePayload
  ) {
    this.state = initial;
    this.maxK = initial.partition.k;
    this.harvestSignificance(initial);
  }

  static async open(
    client: NetmineClient,
    dataset: string,
    opts: { seed?: number; replicates?: number } = {}
  ): Promise<SessionController> {
    const opened = await client.openSession(dataset, opts);
    return new SessionController(client, opened.session, opened.state);
  }

  get currentState(): StatePayload {
    return this.state;
  }

  get isBusy(): boolean {
    return this.busy;
  }

  private harvestSignificance(state: StatePayload): void {
    const g = state.significance.global;
    if (g !== null) {
      this.significanceByK.set(state.partition.k, g.significant);
    }
  }

  private adopt(state: StatePayload): void {
    this.state = state;
    this.maxK = Math.max(this.maxK, state.partition.k);
    this.harvestSignificance(state);
  }

  private toast(message: string): void {
    this.toasts.push(message);
  }

  /** Run one mutating gesture; at most one is in flight at a time. */
  private async gesture(
    kind: GestureRecord["kind"],
    send: () => Promise<void>
  ): Promise<boolean> {
    if (this.busy) {
      return false;
    }
    this.busy = true;
    const record: GestureRecord = {
      kind,
      cursorBefore: this.state.history.cursor,
      send,
    };
    this.lastGesture = record;
    try {
      await send();
      return true;
    } catch (err) {
      if (err instanceof SchemaVersionError) {
        this.banner = err.message;
        return false;
      }
      throw err;
    } finally {
      this.busy = false;
    }
  }

  /** Ask the gate to split one cluster. Rejections change nothing visible. */
  async refineCluster(cluster: number): Promise<boolean> {
    return this.gesture("refine", async () => {
      const resp = await this.client.refine(this.session, [cluster]);
      this.adopt(resp.state);
      for (const verdict of resp.verdicts) {
        this.toast(verdictToast(verdict));
      }
    });
  }

  /**
   * Slide the coarsen control to `targetK`. Each detent crossed is one
   * merge request, so n detents = n history entries = n undos back.
   */
  async coarsenTo(targetK: number): Promise<boolean> {
    if (targetK >= this.state.partition.k || targetK < 1) {
      return false;
    }
    return this.gesture("coarsen", async () => {
      while (this.state.partition.k > targetK) {
        const next = this.state.partition.k - 1;
        const resp = await this.client.coarsen(this.session, next);
        this.adopt(resp.state);
        this.significanceByK.set(resp.state.partition.k, resp.significant);
        if (!resp.significant) {
          this.toast(
            `merged view at k=${resp.state.partition.k} is not significant ` +
              `(threshold=${resp.threshold})`
          );
        }
      }
    });
  }

  async setOverlay(
    attribute: string,
    category: string | null = null,
    alpha = 0.05
  ): Promise<boolean> {
    return this.gesture("overlay", async () => {
      const resp = await this.client.overlay(this.session, attribute, category, alpha);
      this.adopt(resp.state);
    });
  }

  async applyGroups(
    labels: Record<string, string>,
    yearAttribute?: string
  ): Promise<boolean> {
    return this.gesture("groups", async () => {
      const resp = await this.client.groups(this.session, labels, yearAttribute);
      this.adopt(resp.state);
    });
  }

  async undo(): Promise<boolean> {
    return this.gesture("undo", async () => {
      const resp = await this.client.undo(this.session);
      this.adopt(resp.state);
    });
  }

  async redo(): Promise<boolean> {
    return this.gesture("redo", async () => {
      const resp = await this.client.redo(this.session);
      this.adopt(resp.state);
    });
  }

  /** Refresh state after a dropped connection. */
  async reconnect(): Promise<void> {
    this.busy = false;
    this.adopt(await this.client.state(this.session));
  }

  /**
   * True when the last gesture never reached the server: the history cursor
   * is still where it was before the gesture was sent. If the cursor moved,
   * the gesture landed and resending would double-apply it.
   */
  shouldResendLastGesture(): boolean {
    if (this.lastGesture === null) {
      return false;
    }
    return this.state.history.cursor === this.lastGesture.cursorBefore;
  }

  /** Resend the last gesture only if the reconnect check says it was lost. */
  async resendLastGesture(): Promise<boolean> {
    const record = this.lastGesture;
    if (record === null || !this.shouldResendLastGesture()) {
      return false;
    }
    return this.gesture(record.kind, record.send);
  }

  drainToasts(): string[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }

  render(): ViewModel {
    const state = this.state;
    const marks: SliderMark[] = [...this.significanceByK.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([k, significant]) => ({ k, significant }));
    return {
      svg: renderMetagraph(state),
      k: state.partition.k,
      modularity: `${state.partition.modularity}`,
      stateHash: state.state_hash,
      canUndo: state.history.cursor > 0,
      canRedo: state.history.cursor < state.history.length - 1,
      sliderMax: this.maxK,
      sliderMarks: marks,
      geodesicHtml: state.tables.geodesic
        ? renderGeodesicTable(state.tables.geodesic)
        : null,
      yearlyHtml: state.tables.yearly ? renderYearlyTable(state.tables.yearly) : null,
      overlayLabel: state.overlay_params
        ? `${state.overlay_params.attribute} (alpha=${state.overlay_params.alpha})`
        : null,
      toasts: [...this.toasts],
      banner: this.banner,
      busy: this.busy,
    };
  }
}

export type { Verdict };

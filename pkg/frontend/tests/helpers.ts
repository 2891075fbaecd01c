/** Test support: fixture loading and a scripted fetch double.
 *
 * Fixtures under tests/fixtures/ are verbatim HTTP bodies recorded from the
 * real server (see scripts/record_fixtures.py); tests replay them so the
 * client is exercised against byte-accurate payloads without a live server.
 */

import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";
import type { SessionOpened, StatePayload } from "../src/types.js";

export function loadFixture<T = unknown>(name: string): T {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export function openedState(name: string): StatePayload {
  return loadFixture<SessionOpened>(name).state;
}

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export interface ScriptStep {
  /** Expected method for this step; mismatch fails the test loudly. */
  method: string;
  /** Substring the request URL must contain. */
  path: string;
  status?: number;
  body?: unknown;
  /** Simulate a transport failure after the request is recorded. */
  networkError?: string;
}

export interface ScriptedFetch {
  fetch: FetchLike;
  calls: RecordedCall[];
}

/** A fetch double that replays `steps` in order and records every request. */
export function scriptedFetch(steps: ScriptStep[]): ScriptedFetch {
  const calls: RecordedCall[] = [];
  let index = 0;
  const fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body === undefined ? undefined : JSON.parse(init.body);
    calls.push({ method, url, body });
    const step = steps[index];
    index += 1;
    if (!step) {
      throw new Error(`unexpected request #${index}: ${method} ${url}`);
    }
    if (method !== step.method || !url.includes(step.path)) {
      throw new Error(
        `request #${index} was ${method} ${url}, script expected ${step.method} *${step.path}*`
      );
    }
    if (step.networkError !== undefined) {
      throw new Error(step.networkError);
    }
    return { status: step.status ?? 200, json: async () => step.body };
  };
  return { fetch, calls };
}

/** Deep copy for fixtures tests need to perturb. */
export function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

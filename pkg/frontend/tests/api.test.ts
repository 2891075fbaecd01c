import { describe, expect, it } from "vitest";

import {
  ApiError,
  NetmineClient,
  SchemaVersionError,
  SUPPORTED_SCHEMA_VERSION,
} from "../src/api.js";
import type {
  CoarsenResponse,
  ErrorBody,
  RefineResponse,
  SessionOpened,
  StateResponse,
} from "../src/types.js";
import { clone, loadFixture, scriptedFetch } from "./helpers.js";

const OPENED = loadFixture<SessionOpened>("colored_initial");

describe("NetmineClient requests", () => {
  it("opens a session with a single POST and returns the payload untouched", async () => {
    const { fetch, calls } = scriptedFetch([
      { method: "POST", path: "/sessions", body: OPENED },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    const opened = await client.openSession("abc123", { seed: 0, replicates: 5 });
    expect(calls).toHaveLength(1);
    expect(calls[0]!.url).toBe("http://svc/sessions");
    expect(calls[0]!.body).toEqual({ dataset: "abc123", seed: 0, replicates: 5 });
    expect(opened).toEqual(OPENED);
  });

  it("refine and coarsen and undo send the exact API bodies", async () => {
    const refined = loadFixture<RefineResponse>("colored_refine_rejected");
    const coarsened = loadFixture<CoarsenResponse>("ring_coarsen_15");
    const undone = loadFixture<StateResponse>("ring_undo_to_initial");
    const { fetch, calls } = scriptedFetch([
      { method: "POST", path: "/sessions/s1/refine", body: refined },
      { method: "POST", path: "/sessions/s1/coarsen", body: coarsened },
      { method: "POST", path: "/sessions/s1/undo", body: undone },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    await client.refine("s1", [0]);
    await client.coarsen("s1", 15);
    await client.undo("s1");
    expect(calls.map((c) => c.body)).toEqual([
      { clusters: [0] },
      { target_k: 15 },
      undefined,
    ]);
  });

  it("reads state with a body-less GET", async () => {
    const { fetch, calls } = scriptedFetch([
      { method: "GET", path: "/sessions/s1/state", body: OPENED.state },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    const state = await client.state("s1");
    expect(calls[0]!.body).toBeUndefined();
    expect(state.state_hash).toBe(OPENED.state.state_hash);
  });

  it("overlay omits category when null and includes it when chosen", async () => {
    const styled = loadFixture<StateResponse>("colored_overlay");
    const { fetch, calls } = scriptedFetch([
      { method: "POST", path: "/overlay", body: styled },
      { method: "POST", path: "/overlay", body: styled },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    await client.overlay("s1", "color");
    await client.overlay("s1", "color", "red", 0.01);
    expect(calls[0]!.body).toEqual({ attribute: "color", alpha: 0.05 });
    expect(calls[1]!.body).toEqual({ attribute: "color", category: "red", alpha: 0.01 });
  });

  it("builds export URLs without issuing a request", () => {
    const { fetch, calls } = scriptedFetch([]);
    const client = new NetmineClient("http://svc", fetch);
    expect(client.exportUrl("s1", "svg")).toBe("http://svc/sessions/s1/export?kind=svg");
    expect(calls).toHaveLength(0);
  });
});

describe("schema version gate", () => {
  it(`accepts only version ${JSON.stringify(SUPPORTED_SCHEMA_VERSION)}`, async () => {
    const tampered = clone(OPENED);
    tampered.state.format_version = "2";
    const { fetch } = scriptedFetch([
      { method: "POST", path: "/sessions", body: tampered },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    const failure = await client.openSession("abc123").catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(SchemaVersionError);
    expect((failure as SchemaVersionError).got).toBe("2");
    expect((failure as SchemaVersionError).message).toContain('"2"');
    expect((failure as SchemaVersionError).message).toContain(
      JSON.stringify(SUPPORTED_SCHEMA_VERSION)
    );
  });

  it("checks the state nested in every mutating response", async () => {
    const tampered = clone(loadFixture<CoarsenResponse>("ring_coarsen_15"));
    tampered.state.format_version = "0";
    const { fetch } = scriptedFetch([
      { method: "POST", path: "/coarsen", body: tampered },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    await expect(client.coarsen("s1", 15)).rejects.toBeInstanceOf(SchemaVersionError);
  });
});

describe("error mapping", () => {
  it("turns structured error bodies into ApiError with code and status", async () => {
    const body = loadFixture<ErrorBody>("error_unknown_attribute");
    const { fetch } = scriptedFetch([
      { method: "POST", path: "/overlay", status: 400, body },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    const failure = await client.overlay("s1", "nope").catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ApiError);
    const apiErr = failure as ApiError;
    expect(apiErr.code).toBe(body.code);
    expect(apiErr.status).toBe(400);
    expect(apiErr.message).toBe(body.message);
  });

  it("falls back to a generic code when the error body is malformed", async () => {
    const { fetch } = scriptedFetch([
      { method: "GET", path: "/state", status: 502, body: { oops: true } },
    ]);
    const client = new NetmineClient("http://svc", fetch);
    const failure = await client.state("s1").catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("UnknownError");
    expect((failure as ApiError).status).toBe(502);
  });
});

/** Controller tests: polling cadence, queue refresh, unreachable banner. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { App, DEFAULT_POLL_INTERVAL_MS } from "../src/app.js";
import type { RecordPayload } from "../src/types.js";
import { fakeFetch, makeRecord, makeSummary, type FakeFetch } from "./helpers.js";

function appRoutes(state: { records: RecordPayload[]; down: boolean }): FakeFetch {
  return fakeFetch([
    {
      method: "GET",
      pattern: /\/records$/,
      reply: () => {
        if (state.down) throw new Error("connection refused");
        return { body: { count: state.records.length, records: state.records } };
      },
    },
    {
      method: "GET",
      pattern: /\/stats\/summary$/,
      reply: () => {
        if (state.down) throw new Error("connection refused");
        return { body: makeSummary({ total: state.records.length, pending: state.records.length }) };
      },
    },
  ]);
}

describe("app polling", () => {
  let root: HTMLElement;
  let app: App | null = null;

  beforeEach(() => {
    vi.useFakeTimers();
    root = document.createElement("div");
    document.body.append(root);
  });

  afterEach(() => {
    app?.stop();
    app = null;
    vi.useRealTimers();
    document.body.innerHTML = "";
  });

  it("defaults to a 2 second poll interval", () => {
    expect(DEFAULT_POLL_INTERVAL_MS).toBe(2000);
  });

  it("renders the queue from the first poll and refreshes on the next tick", async () => {
    const state = { records: [makeRecord()], down: false };
    app = new App(root, { baseUrl: "http://service", fetchFn: appRoutes(state).fetchFn });
    await app.start();
    expect(root.querySelectorAll("[data-role=queue-row]")).toHaveLength(1);

    state.records = [makeRecord(), makeRecord({ id: "r-0002" })];
    await vi.advanceTimersByTimeAsync(DEFAULT_POLL_INTERVAL_MS);
    expect(root.querySelectorAll("[data-role=queue-row]")).toHaveLength(2);
  });

  it("marks the service unreachable and recovers on a later poll", async () => {
    const state = { records: [makeRecord()], down: false };
    app = new App(root, { baseUrl: "http://service", fetchFn: appRoutes(state).fetchFn });
    await app.start();
    expect(root.querySelector("[data-role=unreachable-banner]")).toBeNull();
    expect(root.querySelector("[data-role=connection]")?.textContent).toBe("online");

    state.down = true;
    await vi.advanceTimersByTimeAsync(DEFAULT_POLL_INTERVAL_MS);
    expect(root.querySelector("[data-role=unreachable-banner]")).not.toBeNull();
    expect(root.querySelector("[data-role=connection]")?.textContent).toBe("offline");
    expect(root.querySelectorAll("[data-role=queue-row]")).toHaveLength(1);

    state.down = false;
    await vi.advanceTimersByTimeAsync(DEFAULT_POLL_INTERVAL_MS);
    expect(root.querySelector("[data-role=unreachable-banner]")).toBeNull();
  });

  it("dashboard shows the unreachable banner when polls fail", async () => {
    const state = { records: [], down: false };
    app = new App(root, { baseUrl: "http://service", fetchFn: appRoutes(state).fetchFn });
    await app.start();
    root.querySelector<HTMLButtonElement>("[data-role=nav-dashboard]")!.click();
    expect(root.querySelector("[data-role=unreachable-banner]")).toBeNull();

    state.down = true;
    await vi.advanceTimersByTimeAsync(DEFAULT_POLL_INTERVAL_MS);
    expect(root.querySelector("[data-role=unreachable-banner]")).not.toBeNull();
  });
});

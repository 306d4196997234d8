import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient } from "../src/api.js";
import { SessionController, type ControllerView } from "../src/controller.js";
import type {
  CurvePoint,
  SessionResponse,
  WindowsResponse,
} from "../src/model.js";

const GRID = [30, 40, 50, 60, 70];

function makeCurve(): CurvePoint[] {
  return GRID.map((t, i) => ({ srr_target: t, ratio: 8 - i, r: 0.9 + i * 0.02 }));
}

function makeSession(): SessionResponse {
  return {
    id: "s1",
    curve: makeCurve(),
    recommended: { srr_target: 50, ratio: 6, r: 0.94, target_unreachable: false },
  };
}

function makeWindows(target: number): WindowsResponse {
  return {
    srr_target: target,
    ratio: 8 - GRID.indexOf(target),
    metrics: { pearson_r: 0.9, srr_db: target },
    spectra: {
      x: { bins_db: [0, -3], peak_db: 0, floor_db: -3, mean_db: -1.5,
           dynamic_range_db: 3 },
      d: { bins_db: [-40, -43], peak_db: -40, floor_db: -43, mean_db: -41.5,
           dynamic_range_db: 3 },
    },
    s2r: { cdf: [[target - 10, 0], [target + 10, 1]], two_sigma_margin_db: target - 5 },
  };
}

interface Deferred {
  target: number;
  resolve(w: WindowsResponse): void;
  reject(err: Error): void;
}

/** Fake client that records calls and lets the test resolve each request. */
function makeFakeApi() {
  const windowCalls: number[] = [];
  const pending: Deferred[] = [];
  let deleted = 0;
  const api: ApiClient = {
    async createSession() {
      return makeSession();
    },
    getWindows(_id, target) {
      windowCalls.push(target);
      return new Promise<WindowsResponse>((resolve, reject) => {
        pending.push({ target, resolve, reject });
      });
    },
    async deleteSession() {
      deleted += 1;
    },
  };
  return {
    api,
    windowCalls,
    /** Resolve the oldest outstanding request with canned windows. */
    async resolveNext(): Promise<void> {
      const d = pending.shift();
      if (!d) throw new Error("no pending request");
      d.resolve(makeWindows(d.target));
      await Promise.resolve(); // let the controller's .then run
      await Promise.resolve();
    },
    async rejectNext(message: string): Promise<void> {
      const d = pending.shift();
      if (!d) throw new Error("no pending request");
      d.reject(new Error(message));
      await Promise.resolve();
      await Promise.resolve();
    },
    pendingCount: () => pending.length,
    deletedCount: () => deleted,
  };
}

function makeView() {
  const moves: Array<{ target: number; pending: boolean }> = [];
  const windows: WindowsResponse[] = [];
  const errors: string[] = [];
  const view: ControllerView = {
    onPointMoved: (target, pending) => moves.push({ target, pending }),
    onWindows: (w) => windows.push(w),
    onError: (m) => errors.push(m),
  };
  return { view, moves, windows, errors };
}

async function makeController(fake = makeFakeApi(), v = makeView()) {
  const created = SessionController.create(fake.api, { synth: { kind: "sine",
    dtype: "i16", length: 4096, amplitude: 1000 } }, v.view);
  await Promise.resolve();
  await fake.resolveNext(); // initial windows at the recommended point
  const ctl = await created;
  return { ctl, fake, v };
}

describe("SessionController", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("starts at the recommended point and loads its windows first", async () => {
    const { ctl, fake, v } = await makeController();
    expect(ctl.currentTarget).toBe(50);
    expect(fake.windowCalls).toEqual([50]);
    expect(v.windows).toHaveLength(1);
    expect(v.windows[0].srr_target).toBe(50);
    // The first dot placement is the recommended target.
    expect(v.moves[0]).toEqual({ target: 50, pending: true });
    expect(ctl.pendingRequest).toBe(false);
  });

  it("snaps raw drag values to the nearest grid point and clamps to the ends", async () => {
    const { ctl } = await makeController();
    expect(ctl.snapTarget(43.2)).toBe(40);
    expect(ctl.snapTarget(46.0)).toBe(50);
    expect(ctl.snapTarget(-999)).toBe(30);
    expect(ctl.snapTarget(999)).toBe(70);
  });

  it("a drag across 5 grid points issues at most 5 debounced requests", async () => {
    const { ctl, fake } = await makeController();
    // Sweep the pointer across every grid point with realistic pauses:
    // each pause exceeds the debounce window, so each point may fire once.
    for (const t of GRID) {
      ctl.dragTo(t + 0.3);
      vi.advanceTimersByTime(200);
      if (fake.pendingCount() > 0) await fake.resolveNext();
    }
    // 1 initial + at most 5 drag-driven requests.
    expect(fake.windowCalls.length - 1).toBeLessThanOrEqual(5);
    expect(fake.windowCalls.at(-1)).toBe(70);
  });

  it("a fast sweep collapses to a single trailing request", async () => {
    const { ctl, fake } = await makeController();
    for (const t of GRID) ctl.dragTo(t); // all within one debounce window
    expect(fake.windowCalls).toEqual([50]);
    vi.advanceTimersByTime(150);
    expect(fake.windowCalls).toEqual([50, 70]);
  });

  it("keeps at most one request in flight and drains the queue", async () => {
    const { ctl, fake, v } = await makeController();
    ctl.dragTo(60);
    vi.advanceTimersByTime(150);
    expect(fake.pendingCount()).toBe(1);
    // Drag again while 60 is still in flight: queued, not raced.
    ctl.dragTo(30);
    vi.advanceTimersByTime(150);
    expect(fake.pendingCount()).toBe(1);
    await fake.resolveNext(); // 60 completes, queued 30 fires
    expect(fake.pendingCount()).toBe(1);
    await fake.resolveNext();
    expect(fake.windowCalls).toEqual([50, 60, 30]);
    expect(v.windows.map((w) => w.srr_target)).toEqual([50, 60, 30]);
    expect(ctl.pendingRequest).toBe(false);
  });

  it("updates windows atomically: each onWindows call is one full response", async () => {
    const { ctl, fake, v } = await makeController();
    ctl.dragTo(40);
    vi.advanceTimersByTime(150);
    await fake.resolveNext();
    for (const w of v.windows) {
      expect(w.metrics).toBeDefined();
      expect(w.spectra.x.bins_db.length).toBeGreaterThan(0);
      expect(w.spectra.d.bins_db.length).toBeGreaterThan(0);
      expect(w.s2r.cdf.length).toBeGreaterThan(0);
      // ratio/metrics/spectra all belong to the same target
      expect(w.ratio).toBe(8 - GRID.indexOf(w.srr_target));
      expect(w.metrics.srr_db).toBe(w.srr_target);
    }
  });

  it("reverts the dot to the last committed target when a request fails", async () => {
    const { ctl, fake, v } = await makeController();
    ctl.dragTo(70);
    vi.advanceTimersByTime(150);
    await fake.rejectNext("boom");
    expect(ctl.currentTarget).toBe(50);
    expect(v.errors).toEqual(["boom"]);
    expect(v.moves.at(-2)).toEqual({ target: 50, pending: false });
    // Windows were never updated with partial/failed state.
    expect(v.windows.map((w) => w.srr_target)).toEqual([50]);
  });

  it("discards responses that complete after dispose", async () => {
    const { ctl, fake, v } = await makeController();
    ctl.dragTo(60);
    vi.advanceTimersByTime(150);
    const nWindows = v.windows.length;
    const disposed = ctl.dispose();
    await fake.resolveNext(); // response lands after dispose: stale
    await disposed;
    expect(v.windows).toHaveLength(nWindows);
    expect(fake.deletedCount()).toBe(1);
  });

  it("dragging to the current target is a no-op", async () => {
    const { ctl, fake } = await makeController();
    ctl.dragTo(50);
    ctl.dragTo(51); // snaps to 50 as well
    vi.advanceTimersByTime(1000);
    expect(fake.windowCalls).toEqual([50]);
    expect(ctl.pendingRequest).toBe(false);
  });

  it("gotoRecommended jumps back and requests immediately", async () => {
    const { ctl, fake } = await makeController();
    ctl.dragTo(30);
    vi.advanceTimersByTime(150);
    await fake.resolveNext();
    ctl.gotoRecommended();
    // flush() bypasses the debounce: the request is already issued.
    expect(fake.windowCalls).toEqual([50, 30, 50]);
    await fake.resolveNext();
    expect(ctl.currentTarget).toBe(50);
  });
});

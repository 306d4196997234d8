/** Session state machine behind the draggable operating point.
 *
 * Invariants enforced here, independent of the DOM:
 *  - the operating point is always parameterized by an srr_target on the
 *    swept curve (drags snap to the nearest curve point, clamped to the
 *    range ends);
 *  - at most one windows request is in flight; drags are debounced and a
 *    drag landing mid-flight is queued, not raced;
 *  - stale responses are discarded by sequence number;
 *  - the displayed windows always correspond to one completed response
 *    (the view callback receives whole responses, never partial state);
 *  - a failed request reverts the dot to the last committed target.
 */

import type { ApiClient } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import type {
  CurvePoint,
  RecommendedPoint,
  SessionSource,
  WindowsResponse,
} from "./model.js";

export interface ControllerView {
  /** Dot position update (optimistic during drag, reverted on failure). */
  onPointMoved(srrTarget: number, pendingRequest: boolean): void;
  /** Atomic windows 2-4 update from one completed response. */
  onWindows(windows: WindowsResponse): void;
  /** Request failure surfaced to the user (toast). */
  onError(message: string): void;
}

export const DEBOUNCE_MS = 150;

export class SessionController {
  readonly id: string;
  readonly curve: CurvePoint[];
  readonly recommended: RecommendedPoint;

  /** Where the dot is drawn right now (optimistic during drag). */
  currentTarget: number;
  /** Last target whose windows completed; revert destination on error. */
  private committedTarget: number;

  private seq = 0;
  private inFlight = false;
  private queuedTarget: number | null = null;
  private readonly requestLater: Debounced<number>;

  private constructor(
    private readonly api: ApiClient,
    private readonly view: ControllerView,
    session: { id: string; curve: CurvePoint[]; recommended: RecommendedPoint },
    debounceMs: number,
  ) {
    this.id = session.id;
    this.curve = session.curve;
    this.recommended = session.recommended;
    this.currentTarget = session.recommended.srr_target;
    this.committedTarget = this.currentTarget;
    this.requestLater = debounce((t: number) => void this.request(t), debounceMs);
  }

  /** Create a session, then populate windows at the recommended point. */
  static async create(
    api: ApiClient,
    source: SessionSource,
    view: ControllerView,
    opts: { grid?: number[]; debounceMs?: number } = {},
  ): Promise<SessionController> {
    const session = await api.createSession(source, opts.grid);
    const ctl = new SessionController(api, view, session,
      opts.debounceMs ?? DEBOUNCE_MS);
    view.onPointMoved(ctl.currentTarget, true);
    await ctl.request(ctl.currentTarget);
    return ctl;
  }

  get pendingRequest(): boolean {
    return this.inFlight || this.requestLater.pending();
  }

  /** Nearest curve target to a raw (possibly out-of-range) value. */
  snapTarget(raw: number): number {
    const first = this.curve[0].srr_target;
    const last = this.curve[this.curve.length - 1].srr_target;
    if (raw <= first) return first;
    if (raw >= last) return last;
    let best = first;
    let bestDist = Math.abs(raw - first);
    for (const p of this.curve) {
      const d = Math.abs(raw - p.srr_target);
      if (d < bestDist) {
        best = p.srr_target;
        bestDist = d;
      }
    }
    return best;
  }

  /** Drag handler: optimistic dot move plus a debounced windows request. */
  dragTo(rawTarget: number): void {
    const target = this.snapTarget(rawTarget);
    if (target === this.currentTarget) return;
    this.currentTarget = target;
    this.view.onPointMoved(target, true);
    this.requestLater(target);
  }

  /** Jump straight to the recommended operating point. */
  gotoRecommended(): void {
    this.dragTo(this.recommended.srr_target);
    this.requestLater.flush();
  }

  private async request(target: number): Promise<void> {
    if (this.inFlight) {
      this.queuedTarget = target; // single in-flight request: queue the rest
      return;
    }
    this.inFlight = true;
    const mySeq = ++this.seq;
    try {
      const windows = await this.api.getWindows(this.id, target);
      if (mySeq !== this.seq) return; // stale: a newer request superseded it
      this.committedTarget = target;
      this.view.onWindows(windows);
    } catch (err) {
      if (mySeq === this.seq) {
        this.currentTarget = this.committedTarget;
        this.view.onPointMoved(this.committedTarget, false);
        this.view.onError(err instanceof Error ? err.message : String(err));
      }
    } finally {
      if (mySeq === this.seq) {
        this.inFlight = false;
        this.view.onPointMoved(this.currentTarget, this.pendingRequest);
        const next = this.queuedTarget;
        this.queuedTarget = null;
        if (next !== null && next !== this.committedTarget) {
          void this.request(next);
        }
      }
    }
  }

  async dispose(): Promise<void> {
    this.requestLater.cancel();
    this.seq++; // invalidate any in-flight response
    await this.api.deleteSession(this.id);
  }
}

/** Pure axis-mapping helpers producing SVG path data and table rows.
 *
 * The UI does no numeric work beyond mapping service values onto pixels;
 * every displayed number comes verbatim from the service JSON.
 */

import type { CurvePoint, MaybeNumber } from "./model.js";

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return lo <= hi ? [lo, hi] : [0, 1];
}

/** SVG path through (x, y) pairs already mapped to pixels. */
export function pathData(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${xs[i].toFixed(2)},${ys[i].toFixed(2)}`);
  }
  return parts.join(" ");
}

/** Rate-correlation curve: x = srr_target, y = ratio (log-free, direct). */
export function curvePath(points: CurvePoint[], x: Scale, y: Scale): string {
  return pathData(points.map((p) => x(p.srr_target)), points.map((p) => y(p.ratio)));
}

/** Interpolate the dot's y (ratio) along the polyline for a given target,
 * so the dot stays visually on the curve between grid points. */
export function ratioOnCurve(points: CurvePoint[], srrTarget: number): number {
  if (srrTarget <= points[0].srr_target) return points[0].ratio;
  const last = points[points.length - 1];
  if (srrTarget >= last.srr_target) return last.ratio;
  for (let i = 1; i < points.length; i++) {
    const a = points[i - 1];
    const b = points[i];
    if (srrTarget <= b.srr_target) {
      const f = (srrTarget - a.srr_target) / (b.srr_target - a.srr_target || 1);
      return a.ratio + f * (b.ratio - a.ratio);
    }
  }
  return last.ratio;
}

/** Inverse of the x mapping: pixel offset back to a raw srr value. */
export function pixelToTarget(px: number, x: Scale): number {
  const [r0, r1] = x.range;
  const [d0, d1] = x.domain;
  return d0 + ((px - r0) / (r1 - r0 || 1)) * (d1 - d0);
}

/** Display formatting: service nulls (non-finite values) render as a dash. */
export function formatValue(v: MaybeNumber): string {
  if (v === null) return "—";
  if (Number.isInteger(v)) return String(v);
  return Math.abs(v) >= 1e-3 && Math.abs(v) < 1e6
    ? v.toPrecision(6)
    : v.toExponential(4);
}

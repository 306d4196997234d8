/** DOM wiring for the profiler UI.
 *
 * Window 1: rate-correlation curve with the draggable operating point and
 * the highlighted recommended point.  Window 2: the 18-metric comparison
 * table.  Window 3: input vs residual spectra.  Window 4: the sample-to-
 * residual CDF with the 2-sigma margin.  All numbers come from the service;
 * this module only maps them onto pixels.
 */

import { createApiClient } from "./api.js";
import {
  curvePath,
  extent,
  formatValue,
  linearScale,
  pathData,
  pixelToTarget,
  ratioOnCurve,
  type Scale,
} from "./charts.js";
import { SessionController, type ControllerView } from "./controller.js";
import {
  METRIC_KEYS,
  type SessionSource,
  type SpectrumJson,
  type WindowsResponse,
} from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 460;
const H = 260;
const PAD = { left: 52, right: 16, top: 14, bottom: 34 };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function clearChildren(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

function axis(svg: SVGSVGElement, x: Scale, y: Scale,
              xLabel: string, yLabel: string): void {
  const [x0, x1] = x.range;
  const [y0, y1] = y.range;
  svg.appendChild(svgEl("line",
    { x1: x0, y1: y0, x2: x1, y2: y0, class: "axis" }));
  svg.appendChild(svgEl("line",
    { x1: x0, y1: y0, x2: x0, y2: y1, class: "axis" }));
  for (const f of [0, 0.25, 0.5, 0.75, 1]) {
    const xv = x.domain[0] + f * (x.domain[1] - x.domain[0]);
    const yv = y.domain[0] + f * (y.domain[1] - y.domain[0]);
    const tx = svgEl("text", { x: x(xv), y: y0 + 16, class: "tick" });
    tx.textContent = xv.toFixed(Math.abs(x.domain[1] - x.domain[0]) < 10 ? 1 : 0);
    svg.appendChild(tx);
    const ty = svgEl("text",
      { x: x0 - 6, y: y(yv) + 4, class: "tick tick-y" });
    ty.textContent = yv.toFixed(Math.abs(y.domain[1] - y.domain[0]) < 10 ? 1 : 0);
    svg.appendChild(ty);
  }
  const lx = svgEl("text",
    { x: (x0 + x1) / 2, y: H - 4, class: "axis-label" });
  lx.textContent = xLabel;
  svg.appendChild(lx);
  const ly = svgEl("text", {
    x: 12, y: (y0 + y1) / 2, class: "axis-label",
    transform: `rotate(-90 12 ${(y0 + y1) / 2})`,
  });
  ly.textContent = yLabel;
  svg.appendChild(ly);
}

/** Window 1: the curve, recommended marker, and draggable dot. */
class CurveChart {
  readonly svg: SVGSVGElement;
  private x!: Scale;
  private y!: Scale;
  private dot!: SVGCircleElement;
  private readout!: HTMLElement;
  private controller: SessionController | null = null;

  constructor(root: HTMLElement) {
    this.svg = svgEl("svg", { viewBox: `0 0 ${W} ${H}`, class: "chart" });
    root.appendChild(this.svg);
    this.readout = el("div", "readout", "");
    root.appendChild(this.readout);
    this.svg.addEventListener("pointerdown", (ev) => this.startDrag(ev));
  }

  render(controller: SessionController): void {
    this.controller = controller;
    clearChildren(this.svg);
    const points = controller.curve;
    const [rLo, rHi] = extent(points.map((p) => p.ratio));
    this.x = linearScale(
      [points[0].srr_target, points[points.length - 1].srr_target],
      [PAD.left, W - PAD.right]);
    this.y = linearScale([Math.min(rLo, 1), rHi], [H - PAD.bottom, PAD.top]);
    axis(this.svg, this.x, this.y, "SRR target (dB)", "compression ratio");
    this.svg.appendChild(svgEl("path",
      { d: curvePath(points, this.x, this.y), class: "curve" }));
    for (const p of points) {
      this.svg.appendChild(svgEl("circle", {
        cx: this.x(p.srr_target), cy: this.y(p.ratio), r: 2.5,
        class: "grid-dot",
      }));
    }
    const rec = controller.recommended;
    this.svg.appendChild(svgEl("circle", {
      cx: this.x(rec.srr_target),
      cy: this.y(ratioOnCurve(points, rec.srr_target)),
      r: 7, class: "recommended-dot",
    }));
    this.dot = svgEl("circle", { r: 6, class: "operating-dot" });
    this.svg.appendChild(this.dot);
    this.moveDot(controller.currentTarget, false);
  }

  moveDot(srrTarget: number, pending: boolean): void {
    if (!this.controller) return;
    const ratio = ratioOnCurve(this.controller.curve, srrTarget);
    this.dot.setAttribute("cx", String(this.x(srrTarget)));
    this.dot.setAttribute("cy", String(this.y(ratio)));
    this.dot.classList.toggle("pending", pending);
    const atRec = srrTarget === this.controller.recommended.srr_target;
    this.readout.textContent =
      `operating point: ${srrTarget.toFixed(2)} dB, ` +
      `${ratio.toFixed(2)}:1${atRec ? "  (recommended)" : ""}` +
      (pending ? "  …" : "");
  }

  private startDrag(ev: PointerEvent): void {
    if (!this.controller) return;
    ev.preventDefault();
    this.svg.setPointerCapture(ev.pointerId);
    const move = (e: PointerEvent) => this.dragAt(e);
    const up = (e: PointerEvent) => {
      this.svg.releasePointerCapture(e.pointerId);
      this.svg.removeEventListener("pointermove", move);
      this.svg.removeEventListener("pointerup", up);
    };
    this.svg.addEventListener("pointermove", move);
    this.svg.addEventListener("pointerup", up);
    this.dragAt(ev);
  }

  private dragAt(ev: PointerEvent): void {
    if (!this.controller) return;
    const rect = this.svg.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * W;
    this.controller.dragTo(pixelToTarget(px, this.x));
  }
}

/** Window 2: the comparison metric table. */
class MetricsTable {
  private readonly body: HTMLTableSectionElement;

  constructor(root: HTMLElement) {
    const table = el("table", "metrics");
    const head = table.createTHead().insertRow();
    head.appendChild(el("th", "", "metric"));
    head.appendChild(el("th", "", "value"));
    this.body = table.createTBody();
    root.appendChild(table);
  }

  render(windows: WindowsResponse): void {
    clearChildren(this.body);
    for (const key of METRIC_KEYS) {
      const row = this.body.insertRow();
      row.insertCell().textContent = key;
      const cell = row.insertCell();
      cell.textContent = formatValue(windows.metrics[key] ?? null);
      cell.className = "num";
    }
  }
}

function spectrumPath(spec: SpectrumJson, x: Scale, y: Scale): string {
  const n = spec.bins_db.length;
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < n; i++) {
    const v = spec.bins_db[i];
    if (v === null) continue;
    xs.push(x(i / (n - 1 || 1)));
    ys.push(y(v));
  }
  return pathData(xs, ys);
}

/** Window 3: input vs residual spectra. */
class SpectraChart {
  readonly svg: SVGSVGElement;

  constructor(root: HTMLElement) {
    this.svg = svgEl("svg", { viewBox: `0 0 ${W} ${H}`, class: "chart" });
    root.appendChild(this.svg);
    const legend = el("div", "legend");
    legend.appendChild(el("span", "key key-x", "input"));
    legend.appendChild(el("span", "key key-d", "residual"));
    root.appendChild(legend);
  }

  render(windows: WindowsResponse): void {
    clearChildren(this.svg);
    const { x: xs, d: ds } = windows.spectra;
    const finite = [...xs.bins_db, ...ds.bins_db]
      .filter((v): v is number => v !== null);
    const [lo, hi] = extent(finite);
    const x = linearScale([0, 0.5], [PAD.left, W - PAD.right]);
    const y = linearScale([lo - 3, hi + 3], [H - PAD.bottom, PAD.top]);
    axis(this.svg, x, y, "normalized frequency", "power (dB)");
    const xPix = linearScale([0, 1], [PAD.left, W - PAD.right]);
    this.svg.appendChild(svgEl("path",
      { d: spectrumPath(xs, xPix, y), class: "spectrum-x" }));
    this.svg.appendChild(svgEl("path",
      { d: spectrumPath(ds, xPix, y), class: "spectrum-d" }));
  }
}

/** Window 4: sample-to-residual CDF. */
class S2RChart {
  readonly svg: SVGSVGElement;
  private readonly caption: HTMLElement;

  constructor(root: HTMLElement) {
    this.svg = svgEl("svg", { viewBox: `0 0 ${W} ${H}`, class: "chart" });
    root.appendChild(this.svg);
    this.caption = el("div", "readout", "");
    root.appendChild(this.caption);
  }

  render(windows: WindowsResponse): void {
    clearChildren(this.svg);
    const cdf = windows.s2r.cdf.filter(([v]) => Number.isFinite(v));
    const margin = windows.s2r.two_sigma_margin_db;
    if (cdf.length === 0) {
      const note = svgEl("text",
        { x: W / 2, y: H / 2, class: "axis-label" });
      note.textContent = "all samples reconstruct exactly (infinite S2R)";
      this.svg.appendChild(note);
      this.caption.textContent = "2σ margin: ∞";
      return;
    }
    const [lo, hi] = extent(cdf.map(([v]) => v));
    const x = linearScale([lo, hi === lo ? lo + 1 : hi],
      [PAD.left, W - PAD.right]);
    const y = linearScale([0, 1], [H - PAD.bottom, PAD.top]);
    axis(this.svg, x, y, "sample-to-residual ratio (dB)", "fraction ≤");
    this.svg.appendChild(svgEl("path", {
      d: pathData(cdf.map(([v]) => x(v)), cdf.map(([, p]) => y(p))),
      class: "curve",
    }));
    if (margin !== null) {
      this.svg.appendChild(svgEl("line", {
        x1: x(margin), y1: y.range[0], x2: x(margin), y2: y.range[1],
        class: "margin-line",
      }));
    }
    this.caption.textContent =
      `2σ margin: ${margin === null ? "∞" : margin.toFixed(2) + " dB"}`;
  }
}

function showToast(message: string): void {
  const host = document.getElementById("toast")!;
  host.textContent = message;
  host.classList.add("visible");
  window.setTimeout(() => host.classList.remove("visible"), 4000);
}

function readSource(form: HTMLFormElement): SessionSource {
  const data = new FormData(form);
  const snr = String(data.get("snr_db") ?? "").trim();
  return {
    synth: {
      kind: String(data.get("kind")),
      dtype: String(data.get("dtype")),
      length: Number(data.get("length")),
      amplitude: Number(data.get("amplitude")),
      oversampling_ratio: Number(data.get("oversampling_ratio")),
      snr_db: snr === "" || snr.toLowerCase() === "inf" ? null : Number(snr),
      seed: Number(data.get("seed")),
    },
  };
}

async function boot(): Promise<void> {
  const api = createApiClient("");
  const form = document.getElementById("dataset-form") as HTMLFormElement;
  const status = document.getElementById("status")!;
  const curveChart = new CurveChart(document.getElementById("window1")!);
  const table = new MetricsTable(document.getElementById("window2")!);
  const spectra = new SpectraChart(document.getElementById("window3")!);
  const s2r = new S2RChart(document.getElementById("window4")!);
  let controller: SessionController | null = null;

  const view: ControllerView = {
    onPointMoved: (target, pending) => curveChart.moveDot(target, pending),
    onWindows: (windows) => {
      table.render(windows);
      spectra.render(windows);
      s2r.render(windows);
      status.textContent =
        `windows at ${windows.srr_target.toFixed(2)} dB ` +
        `(ratio ${windows.ratio.toFixed(2)}:1)`;
    },
    onError: (message) => showToast(message),
  };

  form.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    status.textContent = "profiling…";
    try {
      const next = await SessionController.create(api, readSource(form), view);
      if (controller) void controller.dispose();
      controller = next;
      curveChart.render(controller);
      curveChart.moveDot(controller.currentTarget, controller.pendingRequest);
    } catch (err) {
      status.textContent = "";
      showToast(err instanceof Error ? err.message : String(err));
    }
  });

  document.getElementById("goto-recommended")!.addEventListener("click", () => {
    controller?.gotoRecommended();
  });

  window.addEventListener("beforeunload", () => {
    void controller?.dispose();
  });
}

document.addEventListener("DOMContentLoaded", () => void boot());

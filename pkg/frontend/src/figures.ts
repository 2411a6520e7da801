/**
 * The three figure kinds built from qwmix CSV artifacts.
 *
 * limiting       limiting.csv + avg_*.csv ("node,prob"): the time-average
 *                band converging onto the limiting distribution, with the
 *                uniform 1/n reference drawn dashed black.
 * mixing-curves  trace_n<N>.csv files ("t,D_P"): one decay curve per size on
 *                log-log axes, the epsilon threshold, and an inset with the
 *                fitted t_mix ~ n^c exponent.
 * spectrum       spectrum.csv ("i,lambda,gamma"): bulk eigenvalue histogram
 *                normalized to unit mass, semicircle density overlay, and
 *                the classical locations as a rug.
 */

import { basename } from "path";

import { column, InputError, Table } from "./csv.js";
import { Axes, fmt, FONT } from "./svg.js";

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f4a261", "#7209b7", "#264653"];
const MARGIN = { l: 64, r: 18, t: 40, b: 48 };
const W = 760;
const H = 430;

export interface FigureOptions {
  epsilon?: number;
  title?: string;
}

// ---------------------------------------------------------------------------
// limiting
// ---------------------------------------------------------------------------

export function buildLimiting(tables: Table[], opts: FigureOptions = {}): string {
  if (tables.length === 0) throw new InputError("limiting needs at least one CSV");
  const series = tables.map((t) => ({
    name: basename(t.file).replace(/\.csv$/, ""),
    probs: assertSameLength(column(t, "node"), column(t, "prob"), t.file),
  }));
  const n = series[0].probs.length;
  for (const s of series) {
    if (s.probs.length !== n) {
      throw new InputError(`inputs disagree on n: ${series[0].name} has ${n} rows, ${s.name} has ${s.probs.length}`);
    }
  }
  const limits = series.filter((s) => s.name.startsWith("limiting"));
  const band = series.filter((s) => !s.name.startsWith("limiting"));
  const yMax = Math.max(...series.map((s) => Math.max(...s.probs)), 1 / n) * 1.08;

  const ax = new Axes({
    width: W, height: H, margin: MARGIN,
    xDomain: [0, n - 1], yDomain: [0, yMax],
    title: opts.title ?? "Time-averaged node distribution",
    xLabel: "node", yLabel: "probability",
  });
  const xs = Array.from({ length: n }, (_, i) => i);
  band.forEach((s, i) => {
    ax.path(xs, s.probs, "#4361ee", 1.2, "", 0.3 + 0.5 * (i + 1) / band.length);
  });
  for (const s of limits) {
    ax.path(xs, s.probs, "#e63946", 2.0);
  }
  ax.hline(1 / n, "#000000", "5,4", `uniform 1/n = ${fmt(1 / n)}`);
  ax.legend(
    band.map((s, i) => ({ label: s.name, color: "#4361ee" }))
      .concat(limits.map((s) => ({ label: s.name, color: "#e63946" }))),
    W - MARGIN.r - 120, MARGIN.t + 14);
  return ax.render();
}

function assertSameLength(a: number[], b: number[], file: string): number[] {
  if (a.length !== b.length) throw new InputError(`${file}: ragged columns`);
  return b;
}

// ---------------------------------------------------------------------------
// mixing-curves
// ---------------------------------------------------------------------------

export function traceSize(file: string): number {
  const m = basename(file).match(/n(\d+)/);
  if (!m) {
    throw new InputError(
      `cannot infer the chain size from "${file}"; expected a trace_n<N>.csv name`);
  }
  return parseInt(m[1], 10);
}

/** First grid time at which the distance dips to eps; null if it never does. */
export function crossingTime(ts: number[], ds: number[], eps: number): number | null {
  for (let i = 0; i < ts.length; i++) {
    if (ds[i] <= eps) return ts[i];
  }
  return null;
}

/** Least-squares slope of log t against log n. */
export function fitExponent(ns: number[], ts: number[]): { c: number; intercept: number } {
  if (ns.length < 2) throw new InputError("exponent fit needs at least two crossed sizes");
  const xs = ns.map(Math.log);
  const ys = ts.map(Math.log);
  const mx = xs.reduce((a, b) => a + b, 0) / xs.length;
  const my = ys.reduce((a, b) => a + b, 0) / ys.length;
  let sxx = 0, sxy = 0;
  for (let i = 0; i < xs.length; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) throw new InputError("exponent fit needs at least two distinct sizes");
  const c = sxy / sxx;
  return { c, intercept: my - c * mx };
}

export function buildMixingCurves(tables: Table[], opts: FigureOptions = {}): string {
  if (tables.length === 0) throw new InputError("mixing-curves needs at least one CSV");
  const eps = opts.epsilon ?? 0.1;
  const curves = tables
    .map((t) => ({
      n: traceSize(t.file),
      ts: column(t, "t"),
      ds: column(t, "D_P"),
    }))
    .sort((a, b) => a.n - b.n);

  let tLo = Infinity, tHi = 0, dLo = Infinity, dHi = 0;
  for (const c of curves) {
    for (let i = 0; i < c.ts.length; i++) {
      tLo = Math.min(tLo, c.ts[i]);
      tHi = Math.max(tHi, c.ts[i]);
      if (c.ds[i] > 0) dLo = Math.min(dLo, c.ds[i]);
      dHi = Math.max(dHi, c.ds[i]);
    }
  }
  dLo = Math.min(dLo, eps) / 1.5;
  dHi = Math.max(dHi, eps) * 1.3;

  const ax = new Axes({
    width: W, height: H, margin: MARGIN,
    xDomain: [tLo, tHi], yDomain: [dLo, dHi], xLog: true, yLog: true,
    title: opts.title ?? "Distance to the limiting distribution",
    xLabel: "t", yLabel: "1-norm distance",
  });
  curves.forEach((c, i) => {
    const xs: number[] = [], ys: number[] = [];
    for (let k = 0; k < c.ts.length; k++) {
      if (c.ds[k] > 0) {
        xs.push(c.ts[k]);
        ys.push(Math.max(c.ds[k], dLo));
      }
    }
    ax.path(xs, ys, PALETTE[i % PALETTE.length], 1.5);
  });
  ax.hline(eps, "#000000", "5,4", `ε = ${fmt(eps)}`);
  ax.legend(curves.map((c, i) => ({
    label: `n = ${c.n}`, color: PALETTE[i % PALETTE.length],
  })), MARGIN.l + 12, MARGIN.t + 14);

  // inset: log t_mix against log n with the fitted exponent
  const crossed = curves
    .map((c) => ({ n: c.n, t: crossingTime(c.ts, c.ds, eps) }))
    .filter((p): p is { n: number; t: number } => p.t !== null);
  if (crossed.length >= 2) {
    const { c } = fitExponent(crossed.map((p) => p.n), crossed.map((p) => p.t));
    drawInset(ax, crossed, c);
  }
  return ax.render();
}

function drawInset(ax: Axes, pts: { n: number; t: number }[], c: number): void {
  const bw = 185, bh = 120;
  const bx = W - MARGIN.r - bw - 10, by = MARGIN.t + 8;
  const lx = pts.map((p) => Math.log10(p.n));
  const ly = pts.map((p) => Math.log10(p.t));
  const pad = 0.08;
  const x0 = Math.min(...lx) - pad, x1 = Math.max(...lx) + pad;
  const y0 = Math.min(...ly) - pad, y1 = Math.max(...ly) + pad;
  const mx = (v: number) => bx + 10 + ((v - x0) / (x1 - x0)) * (bw - 20);
  const my = (v: number) => by + bh - 26 - ((v - y0) / (y1 - y0)) * (bh - 44);
  ax.add(`<rect x="${bx}" y="${by}" width="${bw}" height="${bh}" fill="#fafafa" stroke="#999" stroke-width="0.8"/>`);
  // fitted line through the mean point with slope c (in log-log space)
  const cx = lx.reduce((a, b) => a + b, 0) / lx.length;
  const cy = ly.reduce((a, b) => a + b, 0) / ly.length;
  ax.add(`<line x1="${mx(x0).toFixed(2)}" y1="${my(cy + c * (x0 - cx)).toFixed(2)}" `
    + `x2="${mx(x1).toFixed(2)}" y2="${my(cy + c * (x1 - cx)).toFixed(2)}" `
    + `stroke="#e63946" stroke-width="1.3"/>`);
  for (let i = 0; i < pts.length; i++) {
    ax.add(`<circle cx="${mx(lx[i]).toFixed(2)}" cy="${my(ly[i]).toFixed(2)}" r="2.4" fill="#264653"/>`);
  }
  ax.add(`<text x="${bx + 8}" y="${by + 14}" font-family="${FONT}" font-size="11" fill="#111">t_mix ~ n^c, c = ${c.toFixed(2)}</text>`);
  ax.add(`<text x="${bx + 8}" y="${by + bh - 8}" font-family="${FONT}" font-size="10" fill="#666">log t_mix vs log n</text>`);
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

export interface Histogram {
  edges: number[];
  heights: number[];
}

/** Density-normalized histogram: sum(height * width) is exactly 1. */
export function histogramDensity(values: number[], bins = 0): Histogram {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (!(hi > lo)) throw new InputError("histogram needs a non-constant column");
  const k = bins > 0 ? bins : Math.min(40, Math.max(8, Math.ceil(Math.sqrt(values.length))));
  const w = (hi - lo) / k;
  const counts = new Array<number>(k).fill(0);
  for (const v of values) {
    counts[Math.min(k - 1, Math.floor((v - lo) / w))] += 1;
  }
  const edges = Array.from({ length: k + 1 }, (_, i) => lo + i * w);
  return { edges, heights: counts.map((c) => c / (values.length * w)) };
}

export function buildSpectrum(tables: Table[], opts: FigureOptions = {}): string {
  if (tables.length !== 1) throw new InputError("spectrum takes exactly one CSV");
  const lambda = column(tables[0], "lambda");
  const gamma = column(tables[0], "gamma");
  const hist = histogramDensity(lambda);

  // semicircle radius from the second moment: E[x^2] = R^2/4
  const m2 = lambda.reduce((a, v) => a + v * v, 0) / lambda.length;
  const R = 2 * Math.sqrt(m2);
  const pdfMax = 2 / (Math.PI * R);

  const xPad = 0.06 * R;
  const xLo = Math.min(hist.edges[0], -R) - xPad;
  const xHi = Math.max(hist.edges[hist.edges.length - 1], R) + xPad;
  const yMax = Math.max(...hist.heights, pdfMax) * 1.12;

  const ax = new Axes({
    width: W, height: H, margin: MARGIN,
    xDomain: [xLo, xHi], yDomain: [0, yMax],
    title: opts.title ?? "Bulk spectrum and the semicircle law",
    xLabel: "eigenvalue", yLabel: "density",
  });
  for (let i = 0; i < hist.heights.length; i++) {
    ax.rect(hist.edges[i], hist.edges[i + 1], 0, hist.heights[i], "#4361ee", 0.55);
  }
  const xs: number[] = [], ys: number[] = [];
  for (let i = 0; i <= 200; i++) {
    const x = -R + (2 * R * i) / 200;
    xs.push(x);
    ys.push((2 / (Math.PI * R * R)) * Math.sqrt(Math.max(R * R - x * x, 0)));
  }
  ax.path(xs, ys, "#e63946", 2.0);
  for (const g of gamma) {
    const gx = ax.sx(g).toFixed(2);
    ax.add(`<line x1="${gx}" y1="${(H - MARGIN.b - 6).toFixed(2)}" x2="${gx}" `
      + `y2="${(H - MARGIN.b).toFixed(2)}" stroke="#2d6a4f" stroke-width="0.6" opacity="0.6"/>`);
  }
  ax.legend([
    { label: "eigenvalue histogram", color: "#4361ee" },
    { label: `semicircle, R = ${fmt(R)}`, color: "#e63946" },
    { label: "classical locations (rug)", color: "#2d6a4f" },
  ], MARGIN.l + 12, MARGIN.t + 14);
  return ax.render();
}

// ---------------------------------------------------------------------------

export type FigureKind = "limiting" | "mixing-curves" | "spectrum";

export function buildFigure(kind: FigureKind, tables: Table[],
                            opts: FigureOptions = {}): string {
  switch (kind) {
    case "limiting": return buildLimiting(tables, opts);
    case "mixing-curves": return buildMixingCurves(tables, opts);
    case "spectrum": return buildSpectrum(tables, opts);
  }
}

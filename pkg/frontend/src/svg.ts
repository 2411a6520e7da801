/**
 * Minimal SVG scaffolding shared by the figure builders. Everything is a
 * pure string computation over fixed fonts and sizes, so rendering the same
 * tables twice yields the same bytes.
 */

export const FONT = "Helvetica, Arial, sans-serif";

export interface Margin {
  l: number;
  r: number;
  t: number;
  b: number;
}

export interface AxesOpts {
  width: number;
  height: number;
  margin: Margin;
  xDomain: [number, number];
  yDomain: [number, number];
  xLog?: boolean;
  yLog?: boolean;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

/** Deterministic tick label: 3 significant digits, exponential off-range. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(a >= 1e4 && a < 1e5 ? 1 : 0).replace("e+", "e");
  }
  return Number(v.toPrecision(3)).toString();
}

function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function linTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  const k0 = Math.ceil(Math.log10(lo) - 1e-9);
  const k1 = Math.floor(Math.log10(hi) + 1e-9);
  for (let k = k0; k <= k1; k++) out.push(Math.pow(10, k));
  if (out.length >= 3) return out;
  // under one decade: fall back to 1-2-5 mantissas inside the range
  const fine: number[] = [];
  for (let k = Math.floor(Math.log10(lo)); k <= k1 + 1; k++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, k);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) fine.push(v);
    }
  }
  return fine.length ? fine : out;
}

export class Axes {
  readonly o: AxesOpts;
  private parts: string[] = [];

  constructor(o: AxesOpts) {
    this.o = o;
  }

  sx(v: number): number {
    const { margin, width, xDomain, xLog } = this.o;
    const [d0, d1] = xDomain;
    const t = xLog
      ? (Math.log10(v) - Math.log10(d0)) / (Math.log10(d1) - Math.log10(d0))
      : (v - d0) / (d1 - d0);
    return margin.l + t * (width - margin.l - margin.r);
  }

  sy(v: number): number {
    const { margin, height, yDomain, yLog } = this.o;
    const [d0, d1] = yDomain;
    const t = yLog
      ? (Math.log10(v) - Math.log10(d0)) / (Math.log10(d1) - Math.log10(d0))
      : (v - d0) / (d1 - d0);
    return height - margin.b - t * (height - margin.t - margin.b);
  }

  add(s: string): void {
    this.parts.push(s);
  }

  path(xs: number[], ys: number[], stroke: string, width = 1.4,
       dash = "", opacity = 1): void {
    let d = "";
    for (let i = 0; i < xs.length; i++) {
      d += `${i === 0 ? "M" : "L"}${px(this.sx(xs[i]))} ${px(this.sy(ys[i]))}`;
    }
    const extra = (dash ? ` stroke-dasharray="${dash}"` : "")
      + (opacity !== 1 ? ` opacity="${opacity}"` : "");
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${extra}/>`);
  }

  hline(y: number, stroke: string, dash = "5,4", label = ""): void {
    const { margin, width } = this.o;
    const yy = px(this.sy(y));
    this.parts.push(
      `<line x1="${px(margin.l)}" y1="${yy}" x2="${px(width - margin.r)}" y2="${yy}" `
      + `stroke="${stroke}" stroke-width="1" stroke-dasharray="${dash}"/>`);
    if (label) {
      this.parts.push(
        `<text x="${px(width - margin.r - 4)}" y="${px(this.sy(y) - 5)}" `
        + `font-family="${FONT}" font-size="11" fill="${stroke}" `
        + `text-anchor="end">${label}</text>`);
    }
  }

  dot(x: number, y: number, fill: string, r = 2.6): void {
    this.parts.push(
      `<circle cx="${px(this.sx(x))}" cy="${px(this.sy(y))}" r="${r}" fill="${fill}"/>`);
  }

  rect(x0: number, x1: number, y0: number, y1: number, fill: string,
       opacity = 1): void {
    const a = this.sx(x0), b = this.sx(x1);
    const c = this.sy(y1), d = this.sy(y0);
    this.parts.push(
      `<rect x="${px(a)}" y="${px(c)}" width="${px(b - a)}" height="${px(d - c)}" `
      + `fill="${fill}"${opacity !== 1 ? ` opacity="${opacity}"` : ""} `
      + `stroke="#ffffff" stroke-width="0.5"/>`);
  }

  text(x: number, y: number, s: string, size = 11, fill = "#333",
       anchor = "start"): void {
    this.parts.push(
      `<text x="${px(x)}" y="${px(y)}" font-family="${FONT}" font-size="${size}" `
      + `fill="${fill}" text-anchor="${anchor}">${s}</text>`);
  }

  legend(entries: { label: string; color: string }[], x: number, y: number): void {
    entries.forEach((e, i) => {
      const yy = y + i * 16;
      this.parts.push(
        `<line x1="${px(x)}" y1="${px(yy - 4)}" x2="${px(x + 18)}" y2="${px(yy - 4)}" `
        + `stroke="${e.color}" stroke-width="2"/>`);
      this.text(x + 24, yy, e.label, 11, "#333");
    });
  }

  /** Axis box, ticks and labels; call once after the data shapes. */
  private frame(): string {
    const { width, height, margin, xDomain, yDomain, xLog, yLog,
            title, xLabel, yLabel } = this.o;
    const f: string[] = [];
    const x0 = margin.l, x1 = width - margin.r;
    const y0 = height - margin.b, y1 = margin.t;
    f.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x1)}" y2="${px(y0)}" stroke="#333" stroke-width="1"/>`);
    f.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x0)}" y2="${px(y1)}" stroke="#333" stroke-width="1"/>`);
    const xt = xLog ? logTicks(xDomain[0], xDomain[1]) : linTicks(xDomain[0], xDomain[1]);
    for (const v of xt) {
      const xx = px(this.sx(v));
      f.push(`<line x1="${xx}" y1="${px(y0)}" x2="${xx}" y2="${px(y0 + 4)}" stroke="#333" stroke-width="1"/>`);
      f.push(`<text x="${xx}" y="${px(y0 + 17)}" font-family="${FONT}" font-size="11" fill="#333" text-anchor="middle">${fmt(v)}</text>`);
    }
    const yt = yLog ? logTicks(yDomain[0], yDomain[1]) : linTicks(yDomain[0], yDomain[1]);
    for (const v of yt) {
      const yy = px(this.sy(v));
      f.push(`<line x1="${px(x0 - 4)}" y1="${yy}" x2="${px(x0)}" y2="${yy}" stroke="#333" stroke-width="1"/>`);
      f.push(`<text x="${px(x0 - 7)}" y="${px(this.sy(v) + 4)}" font-family="${FONT}" font-size="11" fill="#333" text-anchor="end">${fmt(v)}</text>`);
    }
    if (title) {
      f.push(`<text x="${px((x0 + x1) / 2)}" y="${px(y1 - 12)}" font-family="${FONT}" font-size="13" fill="#111" text-anchor="middle">${title}</text>`);
    }
    if (xLabel) {
      f.push(`<text x="${px((x0 + x1) / 2)}" y="${px(height - 10)}" font-family="${FONT}" font-size="12" fill="#333" text-anchor="middle">${xLabel}</text>`);
    }
    if (yLabel) {
      f.push(`<text x="14" y="${px((y0 + y1) / 2)}" font-family="${FONT}" font-size="12" fill="#333" `
        + `text-anchor="middle" transform="rotate(-90 14 ${px((y0 + y1) / 2)})">${yLabel}</text>`);
    }
    return f.join("\n");
  }

  render(): string {
    const { width, height } = this.o;
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n`
      + `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>\n`
      + this.frame() + "\n"
      + this.parts.join("\n")
      + "\n</svg>\n";
  }
}

// Minimal hand-rolled SVG charts: enough for log-log decay lines, sublevel
// scaling curves with error whiskers, and stepped histograms.  No plotting
// dependency; the output is a single self-contained <svg> string.

export interface Axis {
  label: string;
  log?: boolean;
  ticks?: number[];
}

export interface Series {
  xs: number[];
  ys: number[];
  label: string;
  color: string;
  kind?: "line" | "step";
  width?: number;
  dash?: string;
  marker?: "circle" | "square" | "none";
  opacity?: number;
  /** symmetric whisker half-heights in data units, one per point */
  yerr?: number[];
}

export interface RuleX {
  x: number;
  color: string;
  label?: string;
  dash?: string;
}

export interface ChartOpts {
  title: string;
  width?: number;
  height?: number;
  x: Axis;
  y: Axis;
  series: Series[];
  rulesX?: RuleX[];
  /** extra text lines drawn in a box at the top right of the plot area */
  annotations?: string[];
  legend?: boolean;
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function niceTicks(min: number, max: number, count: number): number[] {
  if (!(max > min)) return [min];
  const span = max - min;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= step0) { step = m * mag; break; }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function logTicks(min: number, max: number): number[] {
  const lo = Math.ceil(Math.log10(min) - 1e-9);
  const hi = Math.floor(Math.log10(max) + 1e-9);
  const ticks: number[] = [];
  const stride = Math.max(1, Math.ceil((hi - lo + 1) / 8));
  for (let e = lo; e <= hi; e += stride) ticks.push(Math.pow(10, e));
  if (ticks.length < 2) return [min, max];
  return ticks;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    if (Number.isInteger(v)) return String(v);
    return String(parseFloat(v.toPrecision(3)));
  }
  const e = v.toExponential(2);
  return e.replace(/\.?0+e/, "e").replace(/e([+-])0(\d)/, "e$1$2");
}

interface Scale {
  (v: number): number;
}

function makeScale(log: boolean | undefined, d0: number, d1: number,
                   r0: number, r1: number): Scale {
  if (log) {
    const l0 = Math.log(d0);
    const l1 = Math.log(d1);
    return (v) => r0 + ((Math.log(v) - l0) / (l1 - l0)) * (r1 - r0);
  }
  return (v) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0);
}

function dataRange(values: number[], log: boolean | undefined): [number, number] {
  const vs = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (vs.length === 0) return log ? [0.1, 10] : [0, 1];
  let lo = Math.min(...vs);
  let hi = Math.max(...vs);
  if (lo === hi) {
    if (log) { lo /= 2; hi *= 2; } else { lo -= 1; hi += 1; }
  } else if (log) {
    const pad = Math.pow(hi / lo, 0.06);
    lo /= pad;
    hi *= pad;
  } else {
    const pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return [lo, hi];
}

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function marker(shape: "circle" | "square", x: number, y: number,
                color: string): string {
  if (shape === "circle") {
    return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3.2" fill="${color}"/>`;
  }
  return `<rect x="${(x - 3).toFixed(2)}" y="${(y - 3).toFixed(2)}" width="6" height="6" fill="${color}"/>`;
}

export function buildChart(opts: ChartOpts): string {
  const W = opts.width ?? 640;
  const H = opts.height ?? 420;
  const mL = 70;
  const mR = 24;
  const mT = 40;
  const mB = 52;
  const plotW = W - mL - mR;
  const plotH = H - mT - mB;

  const xsAll: number[] = [];
  const ysAll: number[] = [];
  for (const s of opts.series) {
    xsAll.push(...s.xs);
    ysAll.push(...s.ys);
    if (s.yerr) s.ys.forEach((y, i) => ysAll.push(y + s.yerr![i], y - s.yerr![i]));
  }
  for (const r of opts.rulesX ?? []) xsAll.push(r.x);
  const [x0, x1] = dataRange(opts.x.ticks ? xsAll.concat(opts.x.ticks) : xsAll, opts.x.log);
  const [y0, y1] = dataRange(opts.y.ticks ? ysAll.concat(opts.y.ticks) : ysAll, opts.y.log);
  const sx = makeScale(opts.x.log, x0, x1, mL, mL + plotW);
  const sy = makeScale(opts.y.log, y0, y1, mT + plotH, mT);

  const xTicks = (opts.x.ticks ?? (opts.x.log ? logTicks(x0, x1) : niceTicks(x0, x1, 6)))
    .filter((v) => v >= x0 - 1e-12 && v <= x1 * (1 + 1e-12));
  const yTicks = (opts.y.ticks ?? (opts.y.log ? logTicks(y0, y1) : niceTicks(y0, y1, 6)))
    .filter((v) => v >= y0 - 1e-12 && v <= y1 * (1 + 1e-12));

  const out: string[] = [];
  out.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`);
  out.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  out.push(`<text x="${mL}" y="22" ${FONT} font-size="14" font-weight="bold" fill="#222">${esc(opts.title)}</text>`);

  // grid and tick labels
  for (const v of xTicks) {
    const x = sx(v);
    out.push(`<line x1="${x.toFixed(2)}" y1="${mT}" x2="${x.toFixed(2)}" y2="${mT + plotH}" stroke="#e4e4e4"/>`);
    out.push(`<text x="${x.toFixed(2)}" y="${mT + plotH + 16}" ${FONT} font-size="11" fill="#444" text-anchor="middle">${esc(fmtTick(v))}</text>`);
  }
  for (const v of yTicks) {
    const y = sy(v);
    out.push(`<line x1="${mL}" y1="${y.toFixed(2)}" x2="${mL + plotW}" y2="${y.toFixed(2)}" stroke="#e4e4e4"/>`);
    out.push(`<text x="${mL - 6}" y="${(y + 3.5).toFixed(2)}" ${FONT} font-size="11" fill="#444" text-anchor="end">${esc(fmtTick(v))}</text>`);
  }
  out.push(`<rect x="${mL}" y="${mT}" width="${plotW}" height="${plotH}" fill="none" stroke="#555"/>`);
  out.push(`<text x="${mL + plotW / 2}" y="${H - 14}" ${FONT} font-size="12" fill="#222" text-anchor="middle">${esc(opts.x.label)}</text>`);
  out.push(`<text x="18" y="${mT + plotH / 2}" ${FONT} font-size="12" fill="#222" text-anchor="middle" transform="rotate(-90 18 ${mT + plotH / 2})">${esc(opts.y.label)}</text>`);

  const inX = (v: number) => Number.isFinite(v) && (!opts.x.log || v > 0);
  const inY = (v: number) => Number.isFinite(v) && (!opts.y.log || v > 0);

  // vertical rules (recorded sups etc.), clipped to the plot band
  for (const r of opts.rulesX ?? []) {
    if (!inX(r.x)) continue;
    const x = sx(r.x);
    out.push(`<line x1="${x.toFixed(2)}" y1="${mT}" x2="${x.toFixed(2)}" y2="${mT + plotH}" stroke="${r.color}" stroke-width="1.2" stroke-dasharray="${r.dash ?? "5 3"}"/>`);
    if (r.label) {
      out.push(`<text x="${(x + 4).toFixed(2)}" y="${mT + 12}" ${FONT} font-size="10" fill="${r.color}">${esc(r.label)}</text>`);
    }
  }

  for (const s of opts.series) {
    const color = s.color;
    const sw = s.width ?? 1.8;
    const op = s.opacity ?? 1;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    if (s.kind === "step") {
      // xs are bin edges (ys.length + 1); horizontal segment per bin
      const pts: string[] = [];
      for (let i = 0; i < s.ys.length; i += 1) {
        if (!inX(s.xs[i]) || !inX(s.xs[i + 1]) || !inY(s.ys[i])) continue;
        const y = sy(s.ys[i]).toFixed(2);
        pts.push(`${sx(s.xs[i]).toFixed(2)},${y} ${sx(s.xs[i + 1]).toFixed(2)},${y}`);
      }
      if (pts.length > 0) {
        out.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${sw}" opacity="${op}"${dash}/>`);
      }
      continue;
    }
    const pts = s.xs
      .map((x, i) => [x, s.ys[i]])
      .filter(([x, y]) => inX(x) && inY(y))
      .map(([x, y]) => `${sx(x).toFixed(2)},${sy(y).toFixed(2)}`);
    if (pts.length > 1) {
      out.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${sw}" opacity="${op}"${dash}/>`);
    }
    if (s.yerr) {
      for (let i = 0; i < s.xs.length; i += 1) {
        const lo = s.ys[i] - s.yerr[i];
        const hi = s.ys[i] + s.yerr[i];
        if (!inX(s.xs[i]) || !inY(lo) || !inY(hi)) continue;
        const x = sx(s.xs[i]).toFixed(2);
        out.push(`<line x1="${x}" y1="${sy(lo).toFixed(2)}" x2="${x}" y2="${sy(hi).toFixed(2)}" stroke="${color}" stroke-width="1" opacity="0.8"/>`);
      }
    }
    const shape = s.marker ?? "circle";
    if (shape !== "none") {
      for (let i = 0; i < s.xs.length; i += 1) {
        if (!inX(s.xs[i]) || !inY(s.ys[i])) continue;
        out.push(marker(shape, sx(s.xs[i]), sy(s.ys[i]), color));
      }
    }
  }

  // legend, top left of the plot area
  if (opts.legend ?? true) {
    let ly = mT + 14;
    for (const s of opts.series) {
      if (!s.label) continue;
      const lx = mL + 10;
      out.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 20}" y2="${ly - 4}" stroke="${s.color}" stroke-width="${s.width ?? 1.8}"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
      out.push(`<text x="${lx + 26}" y="${ly}" ${FONT} font-size="11" fill="#222">${esc(s.label)}</text>`);
      ly += 16;
    }
  }

  // annotation box, top right of the plot area
  const notes = opts.annotations ?? [];
  if (notes.length > 0) {
    const wch = Math.max(...notes.map((n) => n.length));
    const bw = 8 + wch * 6.4;
    const bh = 8 + notes.length * 15;
    const bx = mL + plotW - bw - 8;
    const by = mT + 8;
    out.push(`<rect x="${bx.toFixed(2)}" y="${by}" width="${bw.toFixed(2)}" height="${bh}" fill="#fbfbf4" stroke="#999"/>`);
    notes.forEach((n, i) => {
      out.push(`<text x="${(bx + 5).toFixed(2)}" y="${by + 15 + i * 15}" font-family="Menlo, Consolas, monospace" font-size="11" fill="#222">${esc(n)}</text>`);
    });
  }

  out.push("</svg>");
  return out.join("\n");
}

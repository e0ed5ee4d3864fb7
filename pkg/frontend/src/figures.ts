// Figure assembly from validated report payloads.
//
// Slopes and sups shown on figures are raw tokens lifted from the report
// text (schema.rawNumberAt); nothing here fits, refits, or reformats a
// statistic. A figure that disagrees with its report would be worse than no
// figure, so a report without the requested data is a refusal, not a blank
// plot.

import { buildChart, Series, RuleX } from "./chart.js";
import { parseEnergyCsv } from "./csv.js";
import {
  parsePointwiseReport,
  parseSublevelReport,
  parseSweepReport,
  rawNumberAt,
} from "./schema.js";

export class RenderRefusal extends Error {}

export interface Figure {
  /** file stem, extension decided by the writer */
  name: string;
  svg: string;
}

const PALETTE = ["#3b6fb6", "#c0392b", "#2e8b57", "#8e44ad", "#d98719", "#16808a"];

// ---------------------------------------------------------------------------
// decay: sup increments of the two tracked energies against N

export function decayFigure(reportText: string, label: string, name: string,
                            annotateSlopes: boolean): Figure {
  const rep = parseSweepReport(reportText, label);
  if (rep.N.length === 0) {
    throw new RenderRefusal(`${label}: "N" is empty; nothing to render`);
  }
  const notes: string[] = [];
  if (annotateSlopes) {
    if (rep.slopes.E1 !== null) {
      notes.push(`slope E1 = ${rawNumberAt(reportText, ["slopes", "E1"])}`);
    }
    if (rep.slopes.E2 !== null) {
      notes.push(`slope E2 = ${rawNumberAt(reportText, ["slopes", "E2"])}`);
    }
    if (notes.length === 0) notes.push("slopes degenerate (not fit)");
  }
  const svg = buildChart({
    title: rep.partial
      ? "Modified-energy increments vs N (partial sweep)"
      : "Modified-energy increments vs N",
    x: { label: "N", log: true, ticks: rep.N },
    y: { label: "sup over [0, T] of |E(t) - E(0)|", log: true },
    series: [
      { xs: rep.N, ys: rep.supdE1, label: "sup |dE1|", color: PALETTE[0], marker: "circle" },
      { xs: rep.N, ys: rep.supdE2, label: "sup |dE2|", color: PALETTE[1], marker: "square" },
    ],
    annotations: notes,
  });
  return { name, svg };
}

function traceLabel(fileName: string): string {
  const stem = fileName.replace(/\.[^.]*$/, "").replace(/^energy_/, "");
  const m = /^N(\d+(?:\.\d+)?)$/.exec(stem);
  return m ? `N=${m[1]}` : stem;
}

export function traceFigure(traces: Array<{ name: string; text: string }>,
                            name: string): Figure {
  if (traces.length === 0) {
    throw new RenderRefusal("traces: empty input list; nothing to render");
  }
  const series: Series[] = [];
  traces.forEach((tr, i) => {
    const rows = parseEnergyCsv(tr.text, tr.name);
    const color = PALETTE[i % PALETTE.length];
    const ts = rows.map((r) => r.t);
    const d1 = rows.map((r) => Math.abs(r.E1 - rows[0].E1));
    const d2 = rows.map((r) => Math.abs(r.E2 - rows[0].E2));
    const who = traceLabel(tr.name);
    series.push({ xs: ts, ys: d2, label: `|dE2| ${who}`, color, marker: "none" });
    series.push({ xs: ts, ys: d1, label: `|dE1| ${who}`, color, marker: "none",
                  dash: "4 3", width: 1.2, opacity: 0.85 });
  });
  const svg = buildChart({
    title: "Tracked energy drift along the flow",
    x: { label: "t" },
    y: { label: "|E(t) - E(0)|", log: true },
    series,
  });
  return { name, svg };
}

// ---------------------------------------------------------------------------
// sublevel: measure estimate against the level K

export function sublevelFigure(reportText: string, label: string, name: string,
                               annotateSlopes: boolean): Figure {
  const rep = parseSublevelReport(reportText, label);
  if (rep.levels.length === 0) {
    throw new RenderRefusal(`${label}: "levels" is empty; nothing to render`);
  }
  const series: Series[] = [{
    xs: rep.levels,
    ys: rep.estimates,
    yerr: rep.stderr,
    label: `sup estimate (${rep.weight})`,
    color: PALETTE[0],
    marker: "circle",
  }];
  if (rep.slope !== null) {
    // guide with the reported slope through the geometric midpoint; purely
    // presentational, the slope itself is never recomputed here
    const pos = rep.levels
      .map((k, i) => [k, rep.estimates[i]])
      .filter(([, e]) => e > 0);
    if (pos.length >= 2) {
      const gmK = Math.exp(pos.reduce((a, [k]) => a + Math.log(k), 0) / pos.length);
      const gmE = Math.exp(pos.reduce((a, [, e]) => a + Math.log(e), 0) / pos.length);
      const kLo = pos[0][0];
      const kHi = pos[pos.length - 1][0];
      series.push({
        xs: [kLo, kHi],
        ys: [gmE * Math.pow(kLo / gmK, rep.slope), gmE * Math.pow(kHi / gmK, rep.slope)],
        label: "reported slope",
        color: "#888888",
        dash: "6 4",
        width: 1.2,
        marker: "none",
      });
    }
  }
  const notes: string[] = [];
  if (annotateSlopes) {
    if (rep.slope !== null) {
      notes.push(`slope = ${rawNumberAt(reportText, ["slope"])}`);
      if (rep.slopeCi !== null) {
        notes.push(`ci = ${rawNumberAt(reportText, ["slope_ci"])}`);
      }
    } else {
      notes.push("slope degenerate (not fit)");
    }
  }
  const svg = buildChart({
    title: `Sublevel sup scaling, weight ${rep.weight}`,
    x: { label: "K", log: true, ticks: rep.levels },
    y: { label: "sup estimate", log: true },
    series,
    annotations: notes,
  });
  return { name, svg };
}

// ---------------------------------------------------------------------------
// histogram: pointwise ratio distribution with the recorded sup marked

export function histogramFigure(reportText: string, label: string, name: string,
                                annotateSup: boolean): Figure {
  const rep = parsePointwiseReport(reportText, label);
  if (rep.perN.length === 0) {
    throw new RenderRefusal(`${label}: "per_N" is empty; nothing to render`);
  }
  const series: Series[] = [];
  const rules: RuleX[] = [];
  const notes: string[] = [];
  rep.perN.forEach((e, i) => {
    const color = PALETTE[i % PALETTE.length];
    series.push({
      xs: e.histEdges,
      ys: e.histCounts,
      kind: "step",
      label: `N=${e.N}`,
      color,
      marker: "none",
    });
    rules.push({ x: e.sup, color, label: annotateSup ? `sup N=${e.N}` : undefined });
    if (annotateSup) {
      notes.push(`sup(N=${e.N}) = ${rawNumberAt(reportText, ["per_N", i, "sup"])}`);
    }
  });
  const svg = buildChart({
    title: `Pointwise ratio histogram, eps = ${rep.epsilon}`,
    x: { label: "ratio" },
    y: { label: "count" },
    series,
    rulesX: rules,
    annotations: notes,
  });
  return { name, svg };
}

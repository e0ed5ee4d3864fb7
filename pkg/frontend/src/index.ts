export { buildChart, esc, fmtTick, logTicks, niceTicks } from "./chart.js";
export type { Axis, ChartOpts, RuleX, Series } from "./chart.js";
export { ENERGY_HEADER, parseEnergyCsv } from "./csv.js";
export type { EnergyRow } from "./csv.js";
export {
  decayFigure,
  histogramFigure,
  RenderRefusal,
  sublevelFigure,
  traceFigure,
} from "./figures.js";
export type { Figure } from "./figures.js";
export {
  parsePointwiseReport,
  parseSublevelReport,
  parseSweepReport,
  rawNumberAt,
  SchemaError,
} from "./schema.js";
export type {
  JsonPath,
  PointwiseEntry,
  PointwiseReport,
  SublevelReport,
  SweepReport,
} from "./schema.js";
export { KINDS, parseFigureSpec, renderSpecFile, renderSpecText } from "./spec.js";
export type { FigureKind, FigureSpec } from "./spec.js";
export { main } from "./cli.js";

// Typed views of the run artifacts written by the kdvlab CLI, plus strict
// validators.  Every validation failure names the offending field so a bad
// report is diagnosable from the error message alone.
//
// Slope and sup annotations on figures must be string-equal to the report
// JSON, so numbers destined for annotation are extracted as raw tokens from
// the document text (rawNumberAt) instead of being parsed and reprinted:
// JSON.parse followed by String() would reformat e.g. 1e-05 as 0.00001.

export class SchemaError extends Error {}

export interface SweepReport {
  N: number[];
  K: number[];
  supdE1: number[];
  supdE2: number[];
  slopes: { E1: number | null; E2: number | null };
  ci: { E1: number | null; E2: number | null };
  configHash: string;
  partial: boolean;
}

export interface SublevelReport {
  weight: string;
  levels: number[];
  estimates: number[];
  stderr: number[];
  slope: number | null;
  slopeCi: number | null;
  seed: number;
}

export interface PointwiseEntry {
  N: number;
  samples: number;
  sup: number;
  histEdges: number[];
  histCounts: number[];
}

export interface PointwiseReport {
  s: number;
  epsilon: number;
  perN: PointwiseEntry[];
  supOverall: number;
  seed: number;
}

// ---------------------------------------------------------------------------
// field accessors

type JsonObject = { [key: string]: unknown };

function fail(label: string, field: string, want: string, got: unknown): never {
  const kind = got === null ? "null" : Array.isArray(got) ? "array" : typeof got;
  throw new SchemaError(`${label}: field "${field}": expected ${want}, got ${kind}`);
}

function asObject(label: string, field: string, v: unknown): JsonObject {
  if (typeof v !== "object" || v === null || Array.isArray(v)) {
    fail(label, field, "object", v);
  }
  return v as JsonObject;
}

function getField(label: string, obj: JsonObject, field: string): unknown {
  if (!(field in obj)) {
    throw new SchemaError(`${label}: missing field "${field}"`);
  }
  return obj[field];
}

function numberField(label: string, obj: JsonObject, field: string): number {
  const v = getField(label, obj, field);
  if (typeof v !== "number" || !Number.isFinite(v)) fail(label, field, "finite number", v);
  return v;
}

function nullableNumberField(label: string, obj: JsonObject, field: string,
                             shown: string = field): number | null {
  if (!(field in obj)) {
    throw new SchemaError(`${label}: missing field "${shown}"`);
  }
  const v = obj[field];
  if (v === null) return null;
  if (typeof v !== "number" || !Number.isFinite(v)) fail(label, shown, "number or null", v);
  return v;
}

function stringField(label: string, obj: JsonObject, field: string): string {
  const v = getField(label, obj, field);
  if (typeof v !== "string") fail(label, field, "string", v);
  return v;
}

function booleanField(label: string, obj: JsonObject, field: string): boolean {
  const v = getField(label, obj, field);
  if (typeof v !== "boolean") fail(label, field, "boolean", v);
  return v;
}

function numberArrayField(label: string, obj: JsonObject, field: string): number[] {
  const v = getField(label, obj, field);
  if (!Array.isArray(v)) fail(label, field, "array of numbers", v);
  return v.map((x, i) => {
    if (typeof x !== "number" || !Number.isFinite(x)) {
      fail(label, `${field}[${i}]`, "finite number", x);
    }
    return x;
  });
}

function sameLength(label: string, ref: string, n: number, field: string, m: number): void {
  if (n !== m) {
    throw new SchemaError(
      `${label}: field "${field}" has length ${m}, expected ${n} to match "${ref}"`);
  }
}

function parseDocument(label: string, text: string): JsonObject {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${label}: not valid JSON: ${(err as Error).message}`);
  }
  return asObject(label, "<root>", doc);
}

// ---------------------------------------------------------------------------
// report parsers

export function parseSweepReport(text: string, label: string): SweepReport {
  const doc = parseDocument(label, text);
  const N = numberArrayField(label, doc, "N");
  const K = numberArrayField(label, doc, "K");
  const supdE1 = numberArrayField(label, doc, "supdE1");
  const supdE2 = numberArrayField(label, doc, "supdE2");
  sameLength(label, "N", N.length, "K", K.length);
  sameLength(label, "N", N.length, "supdE1", supdE1.length);
  sameLength(label, "N", N.length, "supdE2", supdE2.length);
  const slopes = asObject(label, "slopes", getField(label, doc, "slopes"));
  const ci = asObject(label, "ci", getField(label, doc, "ci"));
  return {
    N,
    K,
    supdE1,
    supdE2,
    slopes: {
      E1: nullableNumberField(label, slopes, "E1", "slopes.E1"),
      E2: nullableNumberField(label, slopes, "E2", "slopes.E2"),
    },
    ci: {
      E1: nullableNumberField(label, ci, "E1", "ci.E1"),
      E2: nullableNumberField(label, ci, "E2", "ci.E2"),
    },
    configHash: stringField(label, doc, "config_hash"),
    partial: booleanField(label, doc, "partial"),
  };
}

export function parseSublevelReport(text: string, label: string): SublevelReport {
  const doc = parseDocument(label, text);
  const levels = numberArrayField(label, doc, "levels");
  const estimates = numberArrayField(label, doc, "estimates");
  const stderr = numberArrayField(label, doc, "stderr");
  sameLength(label, "levels", levels.length, "estimates", estimates.length);
  sameLength(label, "levels", levels.length, "stderr", stderr.length);
  return {
    weight: stringField(label, doc, "weight"),
    levels,
    estimates,
    stderr,
    slope: nullableNumberField(label, doc, "slope"),
    slopeCi: nullableNumberField(label, doc, "slope_ci"),
    seed: numberField(label, doc, "seed"),
  };
}

export function parsePointwiseReport(text: string, label: string): PointwiseReport {
  const doc = parseDocument(label, text);
  const raw = getField(label, doc, "per_N");
  if (!Array.isArray(raw)) fail(label, "per_N", "array", raw);
  const perN = raw.map((entry, i) => {
    const e = asObject(label, `per_N[${i}]`, entry);
    const edges = numberArrayField(label, e, "hist_edges");
    const counts = numberArrayField(label, e, "hist_counts");
    if (edges.length !== counts.length + 1) {
      throw new SchemaError(
        `${label}: field "per_N[${i}].hist_edges" has length ${edges.length}, ` +
        `expected hist_counts length + 1 = ${counts.length + 1}`);
    }
    return {
      N: numberField(label, e, "N"),
      samples: numberField(label, e, "samples"),
      sup: numberField(label, e, "sup"),
      histEdges: edges,
      histCounts: counts,
    };
  });
  return {
    s: numberField(label, doc, "s"),
    epsilon: numberField(label, doc, "epsilon"),
    perN,
    supOverall: numberField(label, doc, "sup_overall"),
    seed: numberField(label, doc, "seed"),
  };
}

// ---------------------------------------------------------------------------
// raw token extraction

export type JsonPath = Array<string | number>;

interface Cursor {
  text: string;
  pos: number;
}

function skipWs(c: Cursor): void {
  while (c.pos < c.text.length && " \t\n\r".includes(c.text[c.pos])) c.pos += 1;
}

function skipString(c: Cursor): void {
  c.pos += 1; // opening quote
  while (c.pos < c.text.length) {
    const ch = c.text[c.pos];
    if (ch === "\\") c.pos += 2;
    else if (ch === '"') { c.pos += 1; return; }
    else c.pos += 1;
  }
  throw new SchemaError("unterminated string in JSON document");
}

function readKey(c: Cursor): string {
  const start = c.pos;
  skipString(c);
  return JSON.parse(c.text.slice(start, c.pos)) as string;
}

function skipValue(c: Cursor): void {
  skipWs(c);
  const ch = c.text[c.pos];
  if (ch === '"') { skipString(c); return; }
  if (ch === "{" || ch === "[") {
    const close = ch === "{" ? "}" : "]";
    c.pos += 1;
    skipWs(c);
    if (c.text[c.pos] === close) { c.pos += 1; return; }
    for (;;) {
      if (ch === "{") { skipWs(c); skipString(c); skipWs(c); c.pos += 1; /* colon */ }
      skipValue(c);
      skipWs(c);
      if (c.text[c.pos] === ",") { c.pos += 1; continue; }
      if (c.text[c.pos] === close) { c.pos += 1; return; }
      throw new SchemaError(`malformed JSON near offset ${c.pos}`);
    }
  }
  // number / true / false / null
  while (c.pos < c.text.length && !",}] \t\n\r".includes(c.text[c.pos])) c.pos += 1;
}

function descend(c: Cursor, path: JsonPath, pathStr: string): string {
  skipWs(c);
  if (path.length === 0) {
    const start = c.pos;
    skipValue(c);
    return c.text.slice(start, c.pos);
  }
  const head = path[0];
  if (typeof head === "string") {
    if (c.text[c.pos] !== "{") {
      throw new SchemaError(`path "${pathStr}": expected an object at "${head}"`);
    }
    c.pos += 1;
    for (;;) {
      skipWs(c);
      if (c.text[c.pos] === "}") break;
      const key = readKey(c);
      skipWs(c);
      c.pos += 1; // colon
      if (key === head) return descend(c, path.slice(1), pathStr);
      skipValue(c);
      skipWs(c);
      if (c.text[c.pos] === ",") c.pos += 1;
    }
    throw new SchemaError(`path "${pathStr}": missing field "${head}"`);
  }
  if (c.text[c.pos] !== "[") {
    throw new SchemaError(`path "${pathStr}": expected an array at index ${head}`);
  }
  c.pos += 1;
  for (let i = 0; ; i += 1) {
    skipWs(c);
    if (c.text[c.pos] === "]") {
      throw new SchemaError(`path "${pathStr}": index ${head} out of range`);
    }
    if (i === head) return descend(c, path.slice(1), pathStr);
    skipValue(c);
    skipWs(c);
    if (c.text[c.pos] === ",") c.pos += 1;
  }
}

/** Return the exact source text of the number at `path` in a JSON document.
 *  The token is taken verbatim from the file, so annotating a figure with it
 *  is string-equal to the report by construction. */
export function rawNumberAt(text: string, path: JsonPath): string {
  const pathStr = path.join(".");
  const token = descend({ text, pos: 0 }, path.slice(), pathStr).trim();
  if (!/^-?(0|[1-9]\d*)(\.\d+)?([eE][+-]?\d+)?$/.test(token)) {
    throw new SchemaError(`path "${pathStr}": value ${token} is not a JSON number`);
  }
  return token;
}

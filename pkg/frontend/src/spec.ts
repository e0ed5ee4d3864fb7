// FigureSpec: a small JSON document naming the artifacts to plot, the plot
// kind, and which annotations to draw.  Input paths are resolved relative to
// the spec file so a spec can live next to its run directory.

import { mkdir, readFile, writeFile } from "fs/promises";
import * as path from "path";

import {
  decayFigure,
  Figure,
  histogramFigure,
  sublevelFigure,
  traceFigure,
} from "./figures.js";
import { SchemaError } from "./schema.js";

export const KINDS = ["decay", "sublevel", "histogram"] as const;
export type FigureKind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  report: string;
  traces: string[];
  annotateSlopes: boolean;
  annotateSup: boolean;
  name: string;
}

const LABEL = "figure spec";

function specFail(field: string, want: string, got: unknown): never {
  const kind = got === null ? "null" : Array.isArray(got) ? "array" : typeof got;
  throw new SchemaError(`${LABEL}: field "${field}": expected ${want}, got ${kind}`);
}

export function parseFigureSpec(text: string): FigureSpec {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${LABEL}: not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    specFail("<root>", "object", doc);
  }
  const obj = doc as { [key: string]: unknown };

  for (const key of Object.keys(obj)) {
    if (!["kind", "report", "traces", "annotations", "name"].includes(key)) {
      throw new SchemaError(`${LABEL}: unknown field "${key}"`);
    }
  }

  const kind = obj.kind;
  if (typeof kind !== "string" || !(KINDS as readonly string[]).includes(kind)) {
    specFail("kind", `one of ${KINDS.join(" | ")}`, kind);
  }
  if (!("report" in obj)) {
    throw new SchemaError(`${LABEL}: missing field "report"`);
  }
  if (typeof obj.report !== "string" || obj.report.length === 0) {
    specFail("report", "non-empty string path", obj.report);
  }

  let traces: string[] = [];
  if ("traces" in obj) {
    if (!Array.isArray(obj.traces)) specFail("traces", "array of string paths", obj.traces);
    traces = obj.traces.map((p, i) => {
      if (typeof p !== "string" || p.length === 0) {
        specFail(`traces[${i}]`, "non-empty string path", p);
      }
      return p;
    });
    if (kind !== "decay" && traces.length > 0) {
      throw new SchemaError(`${LABEL}: field "traces" only applies to kind "decay"`);
    }
  }

  let slopes = true;
  let sup = true;
  if ("annotations" in obj) {
    const a = obj.annotations;
    if (typeof a !== "object" || a === null || Array.isArray(a)) {
      specFail("annotations", "object", a);
    }
    const ann = a as { [key: string]: unknown };
    for (const key of Object.keys(ann)) {
      if (!["slopes", "sup"].includes(key)) {
        throw new SchemaError(`${LABEL}: unknown field "annotations.${key}"`);
      }
      if (typeof ann[key] !== "boolean") {
        specFail(`annotations.${key}`, "boolean", ann[key]);
      }
    }
    if ("slopes" in ann) slopes = ann.slopes as boolean;
    if ("sup" in ann) sup = ann.sup as boolean;
  }

  let name = kind as string;
  if ("name" in obj) {
    if (typeof obj.name !== "string" || !/^[A-Za-z0-9._-]+$/.test(obj.name)) {
      specFail("name", "file stem matching [A-Za-z0-9._-]+", obj.name);
    }
    name = obj.name;
  }

  return {
    kind: kind as FigureKind,
    report: obj.report,
    traces,
    annotateSlopes: slopes,
    annotateSup: sup,
    name,
  };
}

// ---------------------------------------------------------------------------

export async function renderSpecText(specText: string, baseDir: string): Promise<Figure[]> {
  const spec = parseFigureSpec(specText);
  const reportPath = path.resolve(baseDir, spec.report);
  const reportText = await readFile(reportPath, "utf8");
  const label = path.basename(reportPath);

  const figures: Figure[] = [];
  if (spec.kind === "decay") {
    figures.push(decayFigure(reportText, label, spec.name, spec.annotateSlopes));
    if (spec.traces.length > 0) {
      const traces = [];
      for (const rel of spec.traces) {
        const p = path.resolve(baseDir, rel);
        traces.push({ name: path.basename(p), text: await readFile(p, "utf8") });
      }
      figures.push(traceFigure(traces, `${spec.name}_traces`));
    }
  } else if (spec.kind === "sublevel") {
    figures.push(sublevelFigure(reportText, label, spec.name, spec.annotateSlopes));
  } else {
    figures.push(histogramFigure(reportText, label, spec.name, spec.annotateSup));
  }
  return figures;
}

/** Render every figure a spec file asks for into outDir; returns the written
 *  paths. */
export async function renderSpecFile(specPath: string, outDir: string): Promise<string[]> {
  const specText = await readFile(specPath, "utf8");
  const figures = await renderSpecText(specText, path.dirname(path.resolve(specPath)));
  await mkdir(outDir, { recursive: true });
  const written: string[] = [];
  for (const fig of figures) {
    const p = path.join(outDir, `${fig.name}.svg`);
    await writeFile(p, fig.svg + "\n", "utf8");
    written.push(p);
  }
  return written;
}

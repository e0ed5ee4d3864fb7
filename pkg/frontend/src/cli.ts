#!/usr/bin/env node
// render --spec PATH --out DIR
//
// Exit codes follow the main tool: 2 for unusable input (bad flags, bad spec,
// schema mismatch, refusal), 1 for unexpected failures, 0 on success.

import { pathToFileURL } from "url";

import { RenderRefusal } from "./figures.js";
import { SchemaError } from "./schema.js";
import { renderSpecFile } from "./spec.js";

const USAGE = "usage: kdvlab-figures render --spec PATH --out DIR";

export async function main(argv: string[]): Promise<number> {
  if (argv.length === 0 || argv[0] !== "render") {
    console.error(USAGE);
    return 2;
  }
  let specPath = "";
  let outDir = "";
  const rest = argv.slice(1);
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const val = rest[i + 1];
    if (val === undefined) {
      console.error(`${USAGE}\nmissing value for ${flag}`);
      return 2;
    }
    if (flag === "--spec") specPath = val;
    else if (flag === "--out") outDir = val;
    else {
      console.error(`${USAGE}\nunknown flag ${flag}`);
      return 2;
    }
  }
  if (!specPath || !outDir) {
    console.error(USAGE);
    return 2;
  }
  try {
    const written = await renderSpecFile(specPath, outDir);
    for (const p of written) console.log(`wrote ${p}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof RenderRefusal) {
      console.error((err as Error).message);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`input not found: ${(err as NodeJS.ErrnoException).path}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2))
    .then((code) => process.exit(code))
    .catch((err) => {
      console.error("Fatal:", err instanceof Error ? err.message : err);
      process.exit(1);
    });
}

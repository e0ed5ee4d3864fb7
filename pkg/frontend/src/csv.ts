// Strict reader for the per-N energy traces written next to sweep_energy.json.
// The writer emits exactly this header and full-precision floats, so anything
// else is a schema violation and the error names the column.  The two
// derivative columns are "nan" on runs that do not track derivatives; the
// energy columns themselves must always be finite.

import { SchemaError } from "./schema.js";

export const ENERGY_HEADER = ["t", "E1", "corr5", "E2", "dE1_fd", "dE1_lambda5"] as const;

export interface EnergyRow {
  t: number;
  E1: number;
  corr5: number;
  E2: number;
  /** NaN when the run did not track derivatives */
  dE1Fd: number;
  dE1Lambda5: number;
}

export function parseEnergyCsv(text: string, label: string): EnergyRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${label}: empty file, expected an energy CSV`);
  }
  const header = lines[0].split(",");
  if (header.length !== ENERGY_HEADER.length) {
    throw new SchemaError(
      `${label}: header has ${header.length} columns, expected ` +
      `${ENERGY_HEADER.length} (${ENERGY_HEADER.join(",")})`);
  }
  for (let j = 0; j < ENERGY_HEADER.length; j += 1) {
    if (header[j] !== ENERGY_HEADER[j]) {
      throw new SchemaError(
        `${label}: header column ${j} is "${header[j]}", expected "${ENERGY_HEADER[j]}"`);
    }
  }
  const rows: EnergyRow[] = [];
  for (let i = 1; i < lines.length; i += 1) {
    const cells = lines[i].split(",");
    if (cells.length !== ENERGY_HEADER.length) {
      throw new SchemaError(
        `${label}: row ${i} has ${cells.length} cells, expected ${ENERGY_HEADER.length}`);
    }
    const nums = cells.map((cell, j) => {
      if (j >= 4 && cell === "nan") return NaN;
      const v = Number(cell);
      if (cell.trim() === "" || !Number.isFinite(v)) {
        throw new SchemaError(
          `${label}: row ${i}, column "${ENERGY_HEADER[j]}": ` +
          `"${cell}" is not a finite number`);
      }
      return v;
    });
    rows.push({
      t: nums[0], E1: nums[1], corr5: nums[2], E2: nums[3],
      dE1Fd: nums[4], dE1Lambda5: nums[5],
    });
  }
  if (rows.length === 0) {
    throw new SchemaError(`${label}: no data rows after the header`);
  }
  return rows;
}

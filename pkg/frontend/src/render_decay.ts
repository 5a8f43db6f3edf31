/** Log-log decay charts: one SVG per fitted sup-norm series, with the
 * fitted slope and the theory reference slope drawn over the data. */

import { join } from 'path';
import { column, hasColumn, readCsv } from './csv.js';
import { appendSummary, parseArgs, runMain, slopeLabel, writeChart } from './common.js';
import { pickColor, renderChart, Series } from './svg.js';

const REFERENCE_SLOPES: Record<string, number> = {
  v_sup: -1.0,
  u_sup: -0.5,
  du_sup_ball: -1.25,
};

export interface FitRow {
  seriesId: string;
  exponent: number;
  amplitude: number;
  tLo: number;
  tHi: number;
  rsq: number;
}

export function readFits(path: string): FitRow[] {
  const table = readCsv(path);
  const idx = (name: string) => {
    const i = table.header.indexOf(name);
    if (i < 0) throw new Error(`missing column '${name}' in ${path}`);
    return i;
  };
  return table.raw.map((cells) => ({
    seriesId: cells[idx('series_id')],
    exponent: Number(cells[idx('exponent')]),
    amplitude: Number(cells[idx('amplitude')]),
    tLo: Number(cells[idx('t_lo')]),
    tHi: Number(cells[idx('t_hi')]),
    rsq: Number(cells[idx('rsq')]),
  }));
}

export function renderDecay(inDir: string, outDir: string): string[] {
  const series = readCsv(join(inDir, 'decay_series.csv'));
  const fits = readFits(join(inDir, 'decay_fits.csv'));
  const t = column(series, 't');
  const notes: string[] = [];
  const written: string[] = [];

  for (const fit of fits) {
    if (!hasColumn(series, fit.seriesId)) {
      notes.push(`decay: no series column for fit '${fit.seriesId}', skipped`);
      continue;
    }
    const y = column(series, fit.seriesId);
    const positive = y.filter((v, i) => Number.isFinite(v) && v > 0 && t[i] > 0);
    if (positive.length < 2) {
      notes.push(`decay: series '${fit.seriesId}' is empty or nonpositive, skipped`);
      continue;
    }

    const drawn: Series[] = [
      { label: fit.seriesId, x: t, y, color: pickColor(0) },
    ];
    const fx: number[] = [];
    const fy: number[] = [];
    for (let v = fit.tLo; v <= fit.tHi * 1.0001; v *= 1.05) {
      fx.push(v);
      fy.push(fit.amplitude * Math.pow(v, fit.exponent));
    }
    drawn.push({ label: slopeLabel(fit.exponent), x: fx, y: fy, color: pickColor(1), dashed: true });

    const ref = REFERENCE_SLOPES[fit.seriesId];
    const annotations = [`${slopeLabel(fit.exponent)}  (rsq ${fit.rsq.toFixed(4)})`];
    if (ref !== undefined) {
      const anchor = fit.amplitude * Math.pow(fit.tLo, fit.exponent - ref);
      drawn.push({
        label: `reference ${ref.toFixed(2)}`,
        x: fx,
        y: fx.map((v) => anchor * Math.pow(v, ref)),
        color: pickColor(2),
        dashed: true,
      });
      annotations.push(`reference slope ${ref.toFixed(2)}`);
    }

    const svg = renderChart({
      title: `decay of ${fit.seriesId}`,
      xLabel: 't',
      yLabel: fit.seriesId,
      xLog: true,
      yLog: true,
      series: drawn,
      annotations,
    });
    const path = writeChart(outDir, `decay_${fit.seriesId}.svg`, svg);
    written.push(path);
    notes.push(`decay: wrote decay_${fit.seriesId}.svg (${slopeLabel(fit.exponent)})`);
  }
  appendSummary(outDir, notes);
  return written;
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
  runMain(() => {
    const { inDir, outDir } = parseArgs(process.argv.slice(2));
    for (const p of renderDecay(inDir, outDir)) console.log(`wrote ${p}`);
  });
}

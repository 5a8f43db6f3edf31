/** Accumulated ghost-integral histories.  These must be non-decreasing;
 * any violation gets circled in red and counted in the summary. */

import { join } from 'path';
import { column, readCsv } from './csv.js';
import { appendSummary, parseArgs, runMain, writeChart } from './common.js';
import { pickColor, renderChart, Series } from './svg.js';

export function violations(y: number[]): number[] {
  const out: number[] = [];
  for (let i = 1; i < y.length; i++) {
    if (y[i] < y[i - 1] - 1e-15 * Math.abs(y[i - 1])) out.push(i);
  }
  return out;
}

export function renderGhost(inDir: string, outDir: string): string[] {
  const table = readCsv(join(inDir, 'energies.csv'));
  const t = column(table, 't');
  const notes: string[] = [];

  const names = ['Ighost_G', 'Ighost_m', 'Ighost_G_damped', 'Ighost_m_damped'];
  const series: Series[] = [];
  let totalViolations = 0;
  names.forEach((name, i) => {
    const y = column(table, name);
    const bad = violations(y);
    totalViolations += bad.length;
    series.push({ label: name, x: t, y, color: pickColor(i), markers: bad });
  });

  const svg = renderChart({
    title: 'accumulated ghost integrals',
    xLabel: 't',
    yLabel: 'spacetime integral',
    series,
    annotations: totalViolations > 0
      ? [`monotonicity violations: ${totalViolations}`]
      : ['monotone: yes'],
  });
  const p = writeChart(outDir, 'ghost.svg', svg);
  notes.push(`ghost: wrote ghost.svg (${totalViolations} monotonicity violations)`);
  appendSummary(outDir, notes);
  return [p];
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
  runMain(() => {
    const { inDir, outDir } = parseArgs(process.argv.slice(2));
    for (const p of renderGhost(inDir, outDir)) console.log(`wrote ${p}`);
  });
}

/** Energy histories: flat energies of both components plus the conformal
 * pieces of the wave slot; accumulated ghost integrals get their own
 * chart family (render_ghost). */

import { join } from 'path';
import { column, readCsv } from './csv.js';
import { appendSummary, parseArgs, runMain, writeChart } from './common.js';
import { pickColor, renderChart } from './svg.js';

export function renderEnergy(inDir: string, outDir: string): string[] {
  const table = readCsv(join(inDir, 'energies.csv'));
  const t = column(table, 't');
  const notes: string[] = [];

  const svg = renderChart({
    title: 'energy histories',
    xLabel: 't',
    yLabel: 'energy',
    series: [
      { label: 'E_wave', x: t, y: column(table, 'E_wave'), color: pickColor(0) },
      { label: 'E_kg', x: t, y: column(table, 'E_kg'), color: pickColor(1) },
      { label: 'Egst_inst', x: t, y: column(table, 'Egst_inst'), color: pickColor(2) },
    ],
  });
  const p1 = writeChart(outDir, 'energy.svg', svg);
  notes.push('energy: wrote energy.svg');

  const conf = renderChart({
    title: 'conformal energy pieces (wave slot)',
    xLabel: 't',
    yLabel: 'squared norms',
    series: [
      { label: 'scaling part', x: t, y: column(table, 'Econ_S'), color: pickColor(0) },
      { label: 'rotation part', x: t, y: column(table, 'Econ_Omega'), color: pickColor(1) },
      { label: 'boost part', x: t, y: column(table, 'Econ_L'), color: pickColor(2) },
    ],
  });
  const p2 = writeChart(outDir, 'energy_conformal.svg', conf);
  notes.push('energy: wrote energy_conformal.svg');
  appendSummary(outDir, notes);
  return [p1, p2];
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
  runMain(() => {
    const { inDir, outDir } = parseArgs(process.argv.slice(2));
    for (const p of renderEnergy(inDir, outDir)) console.log(`wrote ${p}`);
  });
}

/** Contraction chart: successive-difference norms per iteration on a log
 * axis, with the measured ratios annotated and a geometric guide line. */

import { join } from 'path';
import { readCsv } from './csv.js';
import { appendSummary, parseArgs, runMain, writeChart } from './common.js';
import { pickColor, renderChart, Series } from './svg.js';

export function renderPicard(inDir: string, outDir: string): string[] {
  const table = readCsv(join(inDir, 'picard_log.csv'));
  const idx = (name: string) => table.header.indexOf(name);
  const iters: number[] = [];
  const diffs: number[] = [];
  const ratios: number[] = [];
  for (const cells of table.raw) {
    const it = Number(cells[idx('iter')]);
    const diff = Number(cells[idx('diff_norm')]);
    const ratio = Number(cells[idx('ratio')]);
    if (Number.isFinite(diff) && diff > 0) {
      iters.push(it);
      diffs.push(diff);
    }
    if (Number.isFinite(ratio)) ratios.push(ratio);
  }
  const notes: string[] = [];
  if (iters.length === 0) {
    notes.push('picard: no positive successive differences, chart skipped');
    appendSummary(outDir, notes);
    return [];
  }

  const series: Series[] = [
    { label: 'successive diff norm', x: iters, y: diffs, color: pickColor(0) },
  ];
  if (iters.length >= 2) {
    // geometric guide at ratio 0.6 anchored on the first difference
    series.push({
      label: 'geometric 0.6 guide',
      x: iters,
      y: iters.map((it) => diffs[0] * Math.pow(0.6, it - iters[0])),
      color: pickColor(2),
      dashed: true,
    });
  }
  const annotations = ratios.length > 0
    ? [`ratios: ${ratios.map((r) => r.toFixed(4)).join(', ')}`]
    : [];
  const svg = renderChart({
    title: 'fixed-point contraction',
    xLabel: 'iteration',
    yLabel: 'difference norm',
    yLog: true,
    series,
    annotations,
  });
  const p = writeChart(outDir, 'picard.svg', svg);
  notes.push(`picard: wrote picard.svg (${iters.length} iterations)`);
  appendSummary(outDir, notes);
  return [p];
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
  runMain(() => {
    const { inDir, outDir } = parseArgs(process.argv.slice(2));
    for (const p of renderPicard(inDir, outDir)) console.log(`wrote ${p}`);
  });
}

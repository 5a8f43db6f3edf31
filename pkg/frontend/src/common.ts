import { appendFileSync, mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';

export interface Dirs {
  inDir: string;
  outDir: string;
}

/** Parse the `--in <dir> --out <dir>` invocation shared by every script. */
export function parseArgs(argv: string[]): Dirs {
  let inDir: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === '--in') inDir = argv[++i];
    else if (argv[i] === '--out') outDir = argv[++i];
  }
  if (!inDir || !outDir) {
    throw new Error('usage: --in <input dir> --out <output dir>');
  }
  return { inDir, outDir };
}

export function writeChart(outDir: string, name: string, svg: string): string {
  mkdirSync(outDir, { recursive: true });
  const path = join(outDir, name);
  writeFileSync(path, svg);
  return path;
}

export function appendSummary(outDir: string, lines: string[]): void {
  mkdirSync(outDir, { recursive: true });
  appendFileSync(join(outDir, 'summary.txt'), lines.map((l) => l + '\n').join(''));
}

/** Format a fitted slope the way it is displayed on the charts. */
export function slopeLabel(exponent: number): string {
  return `slope ${exponent.toFixed(2)}`;
}

export function runMain(fn: () => void): void {
  try {
    fn();
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exitCode = 1;
  }
}

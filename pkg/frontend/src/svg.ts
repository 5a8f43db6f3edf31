/** Hand-assembled SVG line charts: deterministic output, no DOM, no canvas. */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
  markers?: number[]; // indices to circle (e.g. violations)
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  series: Series[];
  annotations?: string[]; // lines drawn in the top-right corner
  width?: number;
  height?: number;
}

const PALETTE = ['#1f6fb4', '#d1495b', '#2e8b57', '#8d6cab', '#c97b2d', '#3b3b3b'];

export function pickColor(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function fmt(v: number): string {
  return v.toFixed(2);
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let p = Math.ceil(Math.log10(lo)); Math.pow(10, p) <= hi * 1.0001; p++) {
      out.push(Math.pow(10, p));
    }
    if (out.length === 0) out.push(lo, hi);
    return out;
  }
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  for (let v = Math.ceil(lo / (step * mult)) * step * mult; v <= hi + 1e-12 * span; v += step * mult) {
    out.push(v);
  }
  return out;
}

function tickLabel(v: number, log: boolean): string {
  if (log) {
    const p = Math.round(Math.log10(v));
    return `1e${p}`;
  }
  if (Math.abs(v) >= 1000 || (Math.abs(v) < 0.01 && v !== 0)) return v.toExponential(0);
  return String(Math.round(v * 100) / 100);
}

/** Render a chart spec to a complete SVG document string. */
export function renderChart(spec: ChartSpec): string {
  const W = spec.width ?? 720;
  const H = spec.height ?? 440;
  const m = { left: 70, right: 24, top: 44, bottom: 52 };
  const pw = W - m.left - m.right;
  const ph = H - m.top - m.bottom;

  const finite = (vals: number[]) => vals.filter((v) => Number.isFinite(v) && (!spec.yLog || v > 0));
  let xs: number[] = [];
  let ys: number[] = [];
  for (const s of spec.series) {
    for (let i = 0; i < s.x.length; i++) {
      const ok = Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])
        && (!spec.xLog || s.x[i] > 0) && (!spec.yLog || s.y[i] > 0);
      if (ok) {
        xs.push(s.x[i]);
        ys.push(s.y[i]);
      }
    }
  }
  if (xs.length === 0) {
    xs = [1, 10];
    ys = [1, 10];
  }
  const tx = spec.xLog ? Math.log10 : (v: number) => v;
  const ty = spec.yLog ? Math.log10 : (v: number) => v;
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xLo === xHi) { xLo -= 0.5; xHi += 0.5; }
  if (yLo === yHi) { yLo = yLo === 0 ? -0.5 : yLo * 0.9; yHi = yHi === 0 ? 0.5 : yHi * 1.1; }
  const padY = spec.yLog ? Math.pow(yHi / yLo, 0.05) : (yHi - yLo) * 0.05;
  if (spec.yLog) { yLo /= padY; yHi *= padY; } else { yLo -= padY; yHi += padY; }

  const px = (v: number) => m.left + ((tx(v) - tx(xLo)) / (tx(xHi) - tx(xLo))) * pw;
  const py = (v: number) => m.top + ph - ((ty(v) - ty(yLo)) / (ty(yHi) - ty(yLo))) * ph;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${m.left}" y="24" font-size="15" font-weight="bold">${esc(spec.title)}</text>`);

  for (const v of ticks(xLo, xHi, !!spec.xLog)) {
    const x = px(v);
    parts.push(`<line x1="${fmt(x)}" y1="${m.top}" x2="${fmt(x)}" y2="${m.top + ph}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${fmt(x)}" y="${m.top + ph + 18}" font-size="11" text-anchor="middle">${tickLabel(v, !!spec.xLog)}</text>`);
  }
  for (const v of ticks(yLo, yHi, !!spec.yLog)) {
    const y = py(v);
    parts.push(`<line x1="${m.left}" y1="${fmt(y)}" x2="${m.left + pw}" y2="${fmt(y)}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${m.left - 6}" y="${fmt(y + 4)}" font-size="11" text-anchor="end">${tickLabel(v, !!spec.yLog)}</text>`);
  }
  parts.push(`<rect x="${m.left}" y="${m.top}" width="${pw}" height="${ph}" fill="none" stroke="#555"/>`);
  parts.push(`<text x="${m.left + pw / 2}" y="${H - 12}" font-size="12" text-anchor="middle">${esc(spec.xLabel)}</text>`);
  parts.push(`<text x="18" y="${m.top + ph / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 18 ${m.top + ph / 2})">${esc(spec.yLabel)}</text>`);

  spec.series.forEach((s) => {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const ok = Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])
        && (!spec.xLog || s.x[i] > 0) && (!spec.yLog || s.y[i] > 0);
      if (ok) pts.push(`${fmt(px(s.x[i]))},${fmt(py(s.y[i]))}`);
    }
    if (pts.length >= 2) {
      const dash = s.dashed ? ' stroke-dasharray="6,4"' : '';
      parts.push(`<polyline points="${pts.join(' ')}" fill="none" stroke="${s.color}" stroke-width="1.8"${dash}/>`);
    } else if (pts.length === 1) {
      const [x, y] = pts[0].split(',');
      parts.push(`<circle cx="${x}" cy="${y}" r="3.5" fill="${s.color}"/>`);
    }
    for (const i of s.markers ?? []) {
      if (i >= 0 && i < s.x.length) {
        parts.push(`<circle cx="${fmt(px(s.x[i]))}" cy="${fmt(py(s.y[i]))}" r="4.5" fill="none" stroke="#d1001f" stroke-width="1.8"/>`);
      }
    }
  });

  let ly = m.top + 16;
  for (const s of spec.series) {
    const dash = s.dashed ? ' stroke-dasharray="6,4"' : '';
    parts.push(`<line x1="${m.left + pw - 190}" y1="${ly - 4}" x2="${m.left + pw - 166}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.8"${dash}/>`);
    parts.push(`<text x="${m.left + pw - 160}" y="${ly}" font-size="11">${esc(s.label)}</text>`);
    ly += 16;
  }
  for (const a of spec.annotations ?? []) {
    parts.push(`<text x="${m.left + pw - 190}" y="${ly}" font-size="11" fill="#333">${esc(a)}</text>`);
    ly += 16;
  }
  parts.push('</svg>');
  return parts.join('\n') + '\n';
}

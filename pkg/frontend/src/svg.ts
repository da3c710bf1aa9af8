/** Deterministic SVG primitives: no clock, no randomness, fixed number
 *  formatting, so a re-render of the same inputs is byte-identical. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 40, right: 24, bottom: 52, left: 64 };

export const PALETTE = ["#1f6fb2", "#c4451c", "#2e8540", "#7a3e9d", "#8a6d1a"];

/** Fixed coordinate formatting (2 decimals, no negative zero). */
export function fx(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (v: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((v: number) => rlo + ((v - lo) / (hi - lo)) * (rhi - rlo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

export function logScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi === llo ? 1 : lhi - llo;
  const f = ((v: number) => rlo + ((Math.log10(v) - llo) / span) * (rhi - rlo)) as Scale;
  const ticks: number[] = [];
  for (let d = Math.ceil(llo - 1e-9); d <= Math.floor(lhi + 1e-9); d++) {
    ticks.push(Math.pow(10, d));
  }
  f.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  return f;
}

function linearTicks(lo: number, hi: number): number[] {
  const span = hi - lo;
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

/** Tick label formatting: compact, deterministic. */
export function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e5)) {
    return v.toExponential(0).replace("+", "");
  }
  return Number(v.toPrecision(6)).toString();
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export interface Series {
  label: string;
  color: string;
  /** screen-space points */
  pts: { x: number; y: number; marker: "dot" | "tri" }[];
  dashed?: boolean;
}

export function renderFrame(opts: {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
  series: Series[];
  noteForTri?: string;
}): string {
  const { xScale, yScale } = opts;
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`);

  for (const t of xScale.ticks) {
    const x = fx(xScale(t));
    parts.push(`<line x1="${x}" y1="${top}" x2="${x}" y2="${bottom}" stroke="#dddddd"/>`);
    parts.push(`<text x="${x}" y="${bottom + 18}" text-anchor="middle" font-size="11">${tickLabel(t)}</text>`);
  }
  for (const t of yScale.ticks) {
    const y = fx(yScale(t));
    parts.push(`<line x1="${left}" y1="${y}" x2="${right}" y2="${y}" stroke="#dddddd"/>`);
    parts.push(`<text x="${left - 6}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="11">${tickLabel(t)}</text>`);
  }
  parts.push(`<rect x="${left}" y="${top}" width="${right - left}" height="${bottom - top}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${(left + right) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="12">${esc(opts.xLabel)}</text>`);
  parts.push(
    `<text x="18" y="${(top + bottom) / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 18 ${(top + bottom) / 2})">${esc(opts.yLabel)}</text>`,
  );

  for (const s of opts.series) {
    if (s.pts.length > 1) {
      const d = s.pts.map((p) => `${fx(p.x)},${fx(p.y)}`).join(" ");
      const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
      parts.push(`<polyline points="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
    }
    for (const p of s.pts) {
      if (s.dashed) {
        continue; // reference lines carry no markers
      }
      if (p.marker === "tri") {
        // open triangle: the distinct marker for rule-of-three cells
        const x = p.x;
        const y = p.y;
        parts.push(
          `<polygon points="${fx(x)},${fx(y - 5)} ${fx(x - 4.5)},${fx(y + 4)} ${fx(x + 4.5)},${fx(y + 4)}" ` +
            `fill="white" stroke="${s.color}" stroke-width="1.5"/>`,
        );
      } else {
        parts.push(`<circle cx="${fx(p.x)}" cy="${fx(p.y)}" r="3.2" fill="${s.color}"/>`);
      }
    }
  }

  let ly = top + 14;
  for (const s of opts.series) {
    parts.push(`<line x1="${right - 150}" y1="${ly - 4}" x2="${right - 126}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.5"${s.dashed ? ` stroke-dasharray="6 4"` : ""}/>`);
    parts.push(`<text x="${right - 120}" y="${ly}" font-size="11">${esc(s.label)}</text>`);
    ly += 16;
  }
  if (opts.noteForTri) {
    parts.push(`<text x="${left + 6}" y="${bottom - 8}" font-size="10" fill="#555555">${esc(opts.noteForTri)}</text>`);
  }
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

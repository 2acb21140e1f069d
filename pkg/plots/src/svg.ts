/** Minimal deterministic SVG assembly: axes, log scales, markers, text. */

export interface Frame {
  width: number;
  height: number;
  margin: { left: number; right: number; top: number; bottom: number };
}

export const DEFAULT_FRAME: Frame = {
  width: 640,
  height: 480,
  margin: { left: 64, right: 16, top: 36, bottom: 48 },
};

export const SERIES_COLORS = ["#1f6fb2", "#c44e52", "#2a9d5c", "#8a63b8", "#b8860b"];

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number,
    readonly log = false,
  ) {}

  map(v: number): number {
    const [a, b] = this.log ? [Math.log10(this.lo), Math.log10(this.hi)] : [this.lo, this.hi];
    const x = this.log ? Math.log10(v) : v;
    const t = b > a ? (x - a) / (b - a) : 0.5;
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(): number[] {
    if (this.log) {
      const out: number[] = [];
      for (let e = Math.ceil(Math.log10(this.lo) - 1e-9); e <= Math.floor(Math.log10(this.hi) + 1e-9); e++) {
        out.push(10 ** e);
      }
      if (out.length === 0) out.push(this.lo, this.hi);
      return out;
    }
    const span = this.hi - this.lo;
    if (span <= 0) return [this.lo];
    const step = 10 ** Math.floor(Math.log10(span / 4));
    const mult = span / step > 8 ? 2 : 1;
    const out: number[] = [];
    for (let v = Math.ceil(this.lo / (step * mult)) * step * mult; v <= this.hi + 1e-12; v += step * mult) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  }
}

export function expanded(lo: number, hi: number, log: boolean): [number, number] {
  if (log) {
    return [lo / 1.5, hi * 1.5];
  }
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.08;
  return [lo - pad, hi + pad];
}

export function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e4)) return v.toExponential(0);
  return Number(v.toPrecision(6)).toString();
}

export function axes(frame: Frame, sx: Scale, sy: Scale, xlabel: string, ylabel: string): string {
  const { width, height, margin } = frame;
  const parts: string[] = [];
  const x0 = margin.left;
  const x1 = width - margin.right;
  const y0 = height - margin.bottom;
  const y1 = margin.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333"/>`);
  for (const t of sx.ticks()) {
    const px = sx.map(t);
    if (px < x0 - 1e-6 || px > x1 + 1e-6) continue;
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" stroke="#333"/>`);
    parts.push(`<text x="${px.toFixed(2)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmtTick(t)}</text>`);
  }
  for (const t of sy.ticks()) {
    const py = sy.map(t);
    if (py > y0 + 1e-6 || py < y1 - 1e-6) continue;
    parts.push(`<line x1="${x0 - 5}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="#333"/>`);
    parts.push(`<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmtTick(t)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${height - 10}" text-anchor="middle" font-size="13">${esc(xlabel)}</text>`);
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(ylabel)}</text>`,
  );
  return parts.join("\n");
}

export function document(frame: Frame, title: string, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
    `<rect width="${frame.width}" height="${frame.height}" fill="white"/>`,
    `<title>${esc(title)}</title>`,
    `<text x="${frame.width / 2}" y="22" text-anchor="middle" font-size="15">${esc(title)}</text>`,
    body,
    "</svg>",
  ].join("\n");
}

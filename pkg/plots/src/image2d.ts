/**
 * Scatter rendering of one 2-d tube node, with optional highlighted points.
 *
 * A highlight is drawn only if some grid point of the tube lies within the
 * matching tolerance (default: the tube's grid width), so absent targets
 * silently produce a plain scatter.
 */

import { Tube } from "./csv";
import { DEFAULT_FRAME, Frame, Scale, axes, document, expanded } from "./svg";

export interface Image2dOptions {
  highlights?: number[][];
  tol?: number;
  title?: string;
  frame?: Frame;
}

export interface MatchedHighlight {
  target: number[];
  nearest: number[];
  distance: number;
}

export function matchHighlights(tube: Tube, highlights: number[][], tol: number): MatchedHighlight[] {
  const out: MatchedHighlight[] = [];
  for (const target of highlights) {
    let best: number[] | null = null;
    let bestD = Infinity;
    for (const p of tube.points) {
      const d = Math.hypot(p[0] - target[0], p[1] - target[1]);
      if (d < bestD) {
        bestD = d;
        best = p;
      }
    }
    if (best && bestD <= tol) {
      out.push({ target, nearest: best, distance: bestD });
    }
  }
  return out;
}

export function renderImage2d(tube: Tube, opts: Image2dOptions = {}): string {
  if (tube.center.length !== 2) {
    throw new Error(`image2d needs a 2-d tube node, got dimension ${tube.center.length}`);
  }
  const frame = opts.frame ?? DEFAULT_FRAME;
  const tol = opts.tol ?? tube.rho;
  const xs = tube.points.map((p) => p[0]);
  const ys = tube.points.map((p) => p[1]);
  const [xlo, xhi] = expanded(Math.min(...xs), Math.max(...xs), false);
  const [ylo, yhi] = expanded(Math.min(...ys), Math.max(...ys), false);
  const sx = new Scale(xlo, xhi, frame.margin.left, frame.width - frame.margin.right);
  const sy = new Scale(ylo, yhi, frame.height - frame.margin.bottom, frame.margin.top);
  const parts: string[] = [axes(frame, sx, sy, "x1", "x2")];
  const r = Math.max(1.2, Math.min(4, 180 / Math.sqrt(tube.points.length + 1)));
  const dots = tube.points
    .map((p) => `<circle cx="${sx.map(p[0]).toFixed(2)}" cy="${sy.map(p[1]).toFixed(2)}" r="${r.toFixed(2)}"/>`)
    .join("");
  parts.push(`<g class="cells" fill="#1f6fb2" fill-opacity="0.75">${dots}</g>`);
  const matched = matchHighlights(tube, opts.highlights ?? [], tol);
  for (const m of matched) {
    const cx = sx.map(m.target[0]).toFixed(2);
    const cy = sy.map(m.target[1]).toFixed(2);
    parts.push(
      `<g class="highlight"><circle cx="${cx}" cy="${cy}" r="7" fill="none" stroke="#c44e52" stroke-width="2"/>` +
        `<text x="${cx}" y="${Number(cy) - 10}" text-anchor="middle" font-size="11" fill="#c44e52">` +
        `(${m.target[0]}, ${m.target[1]})</text></g>`,
    );
  }
  const title = opts.title ?? `tube node scatter (${tube.points.length} cells, rho=${tube.rho})`;
  return document(frame, title, parts.join("\n"));
}

/** Limiting-hull endpoints per step size from an attractor report CSV. */

import { AttractorRow } from "./csv";
import { DEFAULT_FRAME, Frame, SERIES_COLORS, Scale, axes, document, esc, expanded } from "./svg";

export function renderAttractor(rows: AttractorRow[], opts: { title?: string; frame?: Frame } = {}): string {
  if (rows.length === 0) {
    throw new Error("attractor report has no data rows");
  }
  const frame = opts.frame ?? DEFAULT_FRAME;
  const hs = rows.map((r) => r.h);
  const vals = rows.flatMap((r) => [r.lower, r.upper]);
  const [xlo, xhi] = expanded(Math.min(...hs), Math.max(...hs), false);
  const [ylo, yhi] = expanded(Math.min(...vals), Math.max(...vals), false);
  const sx = new Scale(xlo, xhi, frame.margin.left, frame.width - frame.margin.right);
  const sy = new Scale(ylo, yhi, frame.height - frame.margin.bottom, frame.margin.top);
  const parts: string[] = [axes(frame, sx, sy, "step size h", "limit hull endpoints")];
  const schemes = [...new Set(rows.map((r) => String(r.scheme)))];
  schemes.forEach((scheme, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length];
    for (const r of rows.filter((q) => String(q.scheme) === scheme)) {
      const px = sx.map(r.h).toFixed(2);
      parts.push(
        `<g class="hull"><line x1="${px}" y1="${sy.map(r.lower).toFixed(2)}" x2="${px}" y2="${sy.map(r.upper).toFixed(2)}" stroke="${color}" stroke-width="2"/>` +
          `<circle cx="${px}" cy="${sy.map(r.lower).toFixed(2)}" r="3.5" fill="${color}"/>` +
          `<circle cx="${px}" cy="${sy.map(r.upper).toFixed(2)}" r="3.5" fill="${color}"/></g>`,
      );
    }
    const ly = frame.margin.top + 16 + 16 * si;
    parts.push(`<rect x="${frame.margin.left + 10}" y="${ly - 9}" width="10" height="10" fill="${color}"/>`);
    parts.push(`<text class="legend" x="${frame.margin.left + 25}" y="${ly}" font-size="12">${esc(scheme)}</text>`);
  });
  return document(frame, opts.title ?? "attractor hull endpoints", parts.join("\n"));
}

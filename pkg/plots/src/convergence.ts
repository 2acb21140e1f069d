/**
 * Log-log convergence curves from a report CSV: error against step size and
 * error against wall time, one series per scheme, with a slope-1 guide line
 * and a per-scheme regression-slope annotation on the error-vs-h panel.
 */

import { ReportRow } from "./csv";
import { DEFAULT_FRAME, Frame, SERIES_COLORS, Scale, axes, document, esc, expanded } from "./svg";
import { loglogSlope } from "./regression";

export interface ConvergenceOptions {
  title?: string;
  frame?: Frame;
}

function groupBySchemes(rows: ReportRow[]): Map<string, ReportRow[]> {
  const out = new Map<string, ReportRow[]>();
  for (const row of rows) {
    const k = String(row.scheme ?? "series");
    if (!out.has(k)) out.set(k, []);
    out.get(k)!.push(row);
  }
  for (const rs of out.values()) rs.sort((a, b) => b.h - a.h);
  return out;
}

export function schemeSlopes(rows: ReportRow[]): Map<string, number> {
  const out = new Map<string, number>();
  for (const [scheme, rs] of groupBySchemes(rows)) {
    if (rs.length >= 2 && rs.every((r) => r.max_err > 0)) {
      out.set(scheme, loglogSlope(rs.map((r) => r.h), rs.map((r) => r.max_err)));
    }
  }
  return out;
}

function panel(
  frame: Frame,
  box: { x0: number; x1: number },
  groups: Map<string, ReportRow[]>,
  xKey: "h" | "wall_s",
  xlabel: string,
  annotate: Map<string, number> | null,
): string {
  const sub: Frame = {
    width: frame.width,
    height: frame.height,
    margin: { ...frame.margin, left: box.x0, right: frame.width - box.x1 },
  };
  const all = [...groups.values()].flat();
  const xs = all.map((r) => Number(r[xKey])).filter((v) => v > 0);
  const ys = all.map((r) => r.max_err).filter((v) => v > 0);
  const [xlo, xhi] = expanded(Math.min(...xs), Math.max(...xs), true);
  const [ylo, yhi] = expanded(Math.min(...ys), Math.max(...ys), true);
  const sx = new Scale(xlo, xhi, box.x0, box.x1, true);
  const sy = new Scale(ylo, yhi, frame.height - frame.margin.bottom, frame.margin.top, true);
  const parts: string[] = [axes(sub, sx, sy, xlabel, "max error")];
  let si = 0;
  for (const [scheme, rs] of groups) {
    const color = SERIES_COLORS[si % SERIES_COLORS.length];
    const pts = rs
      .filter((r) => Number(r[xKey]) > 0 && r.max_err > 0)
      .map((r) => [sx.map(Number(r[xKey])), sy.map(r.max_err)]);
    if (pts.length > 1) {
      const d = pts.map((p) => `${p[0].toFixed(2)},${p[1].toFixed(2)}`).join(" ");
      parts.push(`<polyline class="series" fill="none" stroke="${color}" stroke-width="1.6" points="${d}"/>`);
    }
    for (const p of pts) {
      parts.push(`<circle class="series-pt" cx="${p[0].toFixed(2)}" cy="${p[1].toFixed(2)}" r="3.4" fill="${color}"/>`);
    }
    const lx = box.x0 + 10;
    const ly = frame.margin.top + 16 + 16 * si;
    parts.push(`<rect x="${lx}" y="${ly - 9}" width="10" height="10" fill="${color}"/>`);
    let label = scheme;
    if (annotate && annotate.has(scheme)) {
      label += ` (slope=${annotate.get(scheme)!.toFixed(2)})`;
    }
    parts.push(`<text class="legend" x="${lx + 15}" y="${ly}" font-size="12">${esc(label)}</text>`);
    si += 1;
  }
  if (xKey === "h" && xs.length > 1) {
    // slope-1 guide through the geometric center of the data
    const gx = Math.sqrt(Math.min(...xs) * Math.max(...xs));
    const gy = Math.sqrt(Math.min(...ys) * Math.max(...ys));
    const x0 = Math.min(...xs);
    const x1 = Math.max(...xs);
    const y0 = (gy * x0) / gx;
    const y1 = (gy * x1) / gx;
    parts.push(
      `<line class="guide" x1="${sx.map(x0).toFixed(2)}" y1="${sy.map(y0).toFixed(2)}" ` +
        `x2="${sx.map(x1).toFixed(2)}" y2="${sy.map(y1).toFixed(2)}" ` +
        `stroke="#888" stroke-dasharray="5,4"/>`,
    );
    parts.push(
      `<text x="${sx.map(gx).toFixed(2)}" y="${(sy.map(gy) + 14).toFixed(2)}" font-size="10" fill="#888">slope 1</text>`,
    );
  }
  return parts.join("\n");
}

export function renderConvergence(rows: ReportRow[], opts: ConvergenceOptions = {}): string {
  if (rows.length === 0) {
    throw new Error("report has no data rows");
  }
  const frame = opts.frame ?? { ...DEFAULT_FRAME, width: 980 };
  const groups = groupBySchemes(rows);
  const slopes = schemeSlopes(rows);
  const mid = Math.floor(frame.width / 2);
  const left = panel(frame, { x0: frame.margin.left, x1: mid - 24 }, groups, "h",
    "step size h", slopes.size > 0 ? slopes : null);
  const right = panel(frame, { x0: mid + 40, x1: frame.width - frame.margin.right },
    groups, "wall_s", "wall time [s]", null);
  const title = opts.title ?? "convergence: error vs step size and vs wall time";
  return document(frame, title, left + "\n" + right);
}

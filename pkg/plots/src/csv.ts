/**
 * Parsers for the semireach CSV formats.
 *
 * Tube files: a comment header `# rho=<r> center=<c1,...,cd>` followed by one
 * row of integer cell coordinates per line. Report/attractor files: a header
 * row naming the columns, comma separated, '.' decimals, LF endings.
 * All parse failures carry a `file:line:` prefix.
 */

export interface Tube {
  rho: number;
  center: number[];
  cells: number[][];
  /** grid points center + rho * cell */
  points: number[][];
}

export interface ReportRow {
  scheme: string;
  h: number;
  max_err: number;
  wall_s: number;
  [key: string]: string | number;
}

export interface AttractorRow {
  scheme: string;
  h: number;
  lower: number;
  upper: number;
  [key: string]: string | number;
}

function fail(path: string, line: number, msg: string): never {
  throw new Error(`${path}:${line}: ${msg}`);
}

function parseNum(raw: string, path: string, line: number, what: string): number {
  const v = Number(raw);
  if (raw.trim() === "" || Number.isNaN(v)) {
    fail(path, line, `malformed ${what}: ${JSON.stringify(raw)}`);
  }
  return v;
}

export function parseTubeCsv(text: string, path: string): Tube {
  const lines = text.split("\n");
  if (lines.length === 0 || !lines[0].startsWith("# rho=")) {
    fail(path, 1, "expected tube header '# rho=<r> center=<c1,...,cd>'");
  }
  const header = lines[0].slice(2);
  const m = header.match(/^rho=(\S+) center=(\S+)\s*$/);
  if (!m) {
    fail(path, 1, `malformed tube header: ${JSON.stringify(lines[0])}`);
  }
  const rho = parseNum(m[1], path, 1, "rho");
  const center = m[2].split(",").map((v) => parseNum(v, path, 1, "center entry"));
  const cells: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const cell = line.split(",").map((v) => {
      const n = parseNum(v, path, i + 1, "cell coordinate");
      if (!Number.isInteger(n)) fail(path, i + 1, `cell coordinate not an integer: ${v}`);
      return n;
    });
    if (cell.length !== center.length) {
      fail(path, i + 1, `expected ${center.length} coordinates, got ${cell.length}`);
    }
    cells.push(cell);
  }
  const points = cells.map((c) => c.map((k, j) => center[j] + rho * k));
  return { rho, center, cells, points };
}

function parseTable(text: string, path: string, numeric: string[]): Record<string, string | number>[] {
  const lines = text.split("\n").filter((l, i) => l.trim() !== "" || i === 0);
  if (lines.length === 0 || lines[0].trim() === "") {
    fail(path, 1, "empty CSV");
  }
  const cols = lines[0].trim().split(",");
  for (const need of numeric) {
    if (!cols.includes(need)) {
      fail(path, 1, `missing required column '${need}'`);
    }
  }
  const rows: Record<string, string | number>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const raw = lines[i].trim();
    if (!raw) continue;
    const parts = raw.split(",");
    if (parts.length !== cols.length) {
      fail(path, i + 1, `expected ${cols.length} fields, got ${parts.length}`);
    }
    const row: Record<string, string | number> = {};
    cols.forEach((c, j) => {
      row[c] = numeric.includes(c) ? parseNum(parts[j], path, i + 1, `'${c}'`) : parts[j];
    });
    rows.push(row);
  }
  return rows;
}

export function parseReportCsv(text: string, path: string): ReportRow[] {
  return parseTable(text, path, ["h", "max_err", "wall_s"]) as unknown as ReportRow[];
}

export function parseAttractorCsv(text: string, path: string): AttractorRow[] {
  return parseTable(text, path, ["h", "lower", "upper"]) as unknown as AttractorRow[];
}

/** `slope scheme=<name> value=<v>` lines from a harness manifest. */
export function parseManifestSlopes(text: string): Map<string, number> {
  const out = new Map<string, number>();
  for (const line of text.split("\n")) {
    const m = line.match(/^slope scheme=(\S+) value=(\S+)/);
    if (m) out.set(m[1], Number(m[2]));
  }
  return out;
}

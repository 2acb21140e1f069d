import * as fs from "fs";
import * as path from "path";
import { describe, expect, it } from "vitest";

import {
  parseAttractorCsv,
  parseManifestSlopes,
  parseReportCsv,
  parseTubeCsv,
} from "../src/csv";

const FIX = path.join(__dirname, "fixtures");

describe("tube parser", () => {
  it("round-trips a real harness dump", () => {
    const file = path.join(FIX, "reach_parameterized_h1.0", "tube_1.csv");
    const tube = parseTubeCsv(fs.readFileSync(file, "utf-8"), file);
    expect(tube.rho).toBe(0.02);
    expect(tube.center).toEqual([0, 0]);
    expect(tube.cells.length).toBeGreaterThan(50);
    // grid points reconstruct as center + rho * cell
    expect(tube.points[0][0]).toBeCloseTo(tube.center[0] + tube.rho * tube.cells[0][0], 12);
  });

  it("rejects a missing header with a line number", () => {
    expect(() => parseTubeCsv("1,2\n", "x.csv")).toThrow(/x\.csv:1:/);
  });

  it("rejects non-integer cells with a line number", () => {
    const text = "# rho=0.5 center=0.0,0.0\n1,2\n3.5,1\n";
    expect(() => parseTubeCsv(text, "t.csv")).toThrow(/t\.csv:3:/);
  });

  it("rejects wrong arity rows", () => {
    const text = "# rho=0.5 center=0.0,0.0\n1,2,3\n";
    expect(() => parseTubeCsv(text, "t.csv")).toThrow(/t\.csv:2:.*expected 2/);
  });
});

describe("report parser", () => {
  it("parses a real report", () => {
    const file = path.join(FIX, "conv", "report.csv");
    const rows = parseReportCsv(fs.readFileSync(file, "utf-8"), file);
    expect(rows.length).toBe(6); // two schemes x three step sizes
    expect(new Set(rows.map((r) => r.scheme))).toEqual(new Set(["parameterized", "split"]));
    for (const row of rows) {
      expect(row.max_err).toBeGreaterThan(0);
      expect(row.wall_s).toBeGreaterThan(0);
    }
  });

  it("rejects a missing column by name", () => {
    expect(() => parseReportCsv("scheme,h\nsplit,0.5\n", "r.csv")).toThrow(/max_err/);
  });

  it("rejects malformed numerics with a line number", () => {
    const text = "scheme,h,max_err,wall_s\nsplit,0.5,oops,0.1\n";
    expect(() => parseReportCsv(text, "r.csv")).toThrow(/r\.csv:2:.*max_err/);
  });
});

describe("attractor parser and manifest", () => {
  it("parses a real attractor report", () => {
    const file = path.join(FIX, "att", "attractor.csv");
    const rows = parseAttractorCsv(fs.readFileSync(file, "utf-8"), file);
    expect(rows.length).toBe(1);
    expect(rows[0].upper).toBeGreaterThan(rows[0].lower);
  });

  it("reads harness slopes from a manifest", () => {
    const text = fs.readFileSync(path.join(FIX, "conv", "manifest.txt"), "utf-8");
    const slopes = parseManifestSlopes(text);
    expect(slopes.has("split")).toBe(true);
    expect(slopes.get("split")).toBeGreaterThan(0.5);
  });
});

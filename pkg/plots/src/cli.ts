#!/usr/bin/env node
/**
 * plots <kind> <csv...> -o <file>
 *
 * kinds: image2d (tube CSV), convergence (report CSV), attractor
 * (attractor CSV). Output format follows the -o extension: .svg natively,
 * .html as an SVG-embedding page.
 */

import * as fs from "fs";
import * as path from "path";
import yargs from "yargs";

import { parseAttractorCsv, parseReportCsv, parseTubeCsv } from "./csv";
import { renderAttractor } from "./attractor";
import { renderConvergence } from "./convergence";
import { renderImage2d } from "./image2d";

function writeImage(outPath: string, svg: string): void {
  const ext = path.extname(outPath).toLowerCase();
  if (ext === ".svg") {
    fs.writeFileSync(outPath, svg + "\n");
  } else if (ext === ".html" || ext === ".htm") {
    fs.writeFileSync(outPath, `<!DOCTYPE html>\n<html><body>\n${svg}\n</body></html>\n`);
  } else {
    throw new Error(`unsupported output format '${ext}'; use .svg or .html`);
  }
}

function parseHighlight(spec: string): number[] {
  const parts = spec.split(",").map(Number);
  if (parts.length !== 2 || parts.some(Number.isNaN)) {
    throw new Error(`malformed --highlight '${spec}'; expected 'x,y'`);
  }
  return parts;
}

export function run(argv: string[]): number {
  const args = yargs(argv)
    .usage("plots <kind> <csv...> -o <file>")
    .command("image2d <csv...>", "scatter of a 2-d tube node")
    .command("convergence <csv...>", "log-log error vs h and vs wall time")
    .command("attractor <csv...>", "limit hull endpoints per step size")
    .option("o", { alias: "out", type: "string", demandOption: true, describe: "output image path (.svg/.html)" })
    .option("highlight", { type: "array", default: [], describe: "point 'x,y' to mark when present (repeatable)" })
    .option("tol", { type: "number", describe: "highlight matching tolerance (default: grid width)" })
    .option("title", { type: "string" })
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .parseSync();

  const kind = String(args._[0]);
  const positional = (args as { csv?: (string | number)[] }).csv ?? args._.slice(1);
  const files = positional.map(String);
  if (files.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  let svg: string;
  if (kind === "image2d") {
    const tube = parseTubeCsv(fs.readFileSync(files[0], "utf-8"), files[0]);
    const highlights = (args.highlight as (string | number)[]).map((s) => parseHighlight(String(s)));
    svg = renderImage2d(tube, { highlights, tol: args.tol, title: args.title });
  } else if (kind === "convergence") {
    const rows = files.flatMap((f) => parseReportCsv(fs.readFileSync(f, "utf-8"), f));
    svg = renderConvergence(rows, { title: args.title });
  } else if (kind === "attractor") {
    const rows = files.flatMap((f) => parseAttractorCsv(fs.readFileSync(f, "utf-8"), f));
    svg = renderAttractor(rows, { title: args.title });
  } else {
    throw new Error(`unknown plot kind '${kind}'; expected image2d, convergence or attractor`);
  }
  writeImage(String(args.o), svg);
  console.log(`wrote ${args.o}`);
  return 0;
}

if (require.main === module) {
  try {
    process.exitCode = run(process.argv.slice(2));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exitCode = 1;
  }
}

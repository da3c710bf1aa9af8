#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { FIGURE_KINDS, FigureKind, render } from "./figures.js";
import { SchemaError } from "./csv.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("report <figure_kind> --in CSV --out FILE [--title ...]")
    .command("$0 <figure_kind>", "render one figure from a CSV", (y) =>
      y.positional("figure_kind", { choices: FIGURE_KINDS, demandOption: true }),
    )
    .option("in", { type: "string", demandOption: true, describe: "input CSV path" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("title", { type: "string" })
    .option("x-label", { type: "string" })
    .option("y-label", { type: "string" })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new Error(msg);
    })
    .parseSync();

  let csvText: string;
  try {
    csvText = readFileSync(args.in, "utf8");
  } catch {
    process.stderr.write(`error: cannot read input CSV '${args.in}'\n`);
    return 2;
  }
  try {
    const svg = render({
      figureKind: (args as Record<string, unknown>)["figure_kind"] as FigureKind,
      csvText,
      title: args.title,
      xLabel: args["x-label"],
      yLabel: args["y-label"],
    });
    writeFileSync(args.out, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 3;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exitCode = 2;
  }
}

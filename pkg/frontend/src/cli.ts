#!/usr/bin/env node
/**
 * Figure renderer for the balancing harness outputs.
 *
 *   signbalance-plot --kind scaling --input sweep.csv --output scaling.svg
 *   signbalance-plot --kind trace   --input trace.csv --output trace.html
 *   signbalance-plot --kind tail    --input tail.csv  --output tail.svg --width 700
 *
 * The output format follows the file extension (.svg or .html). Exit codes:
 * 0 on success, 1 on any input/schema error (message on stderr).
 */
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { readCsv } from "./csv.js";
import { HEIGHT, WIDTH, renderSvg, writeFigure } from "./render.js";
import { buildScalingOption } from "./scaling.js";
import { buildTailFigure } from "./tail.js";
import { buildTraceOption } from "./trace.js";

export interface PlotJob {
  kind: "scaling" | "trace" | "tail";
  input: string;
  output: string;
  guides: boolean;
  width: number;
  height: number;
}

export function runJob(job: PlotJob): string | null {
  const table = readCsv(job.input);
  let svg: string;
  let warning: string | null = null;
  if (job.kind === "scaling") {
    svg = renderSvg(buildScalingOption(table, job.input, { guides: job.guides }), job.width, job.height);
  } else if (job.kind === "trace") {
    svg = renderSvg(buildTraceOption(table, job.input), job.width, job.height);
  } else {
    const figure = buildTailFigure(table, job.input);
    warning = figure.warning;
    svg = renderSvg(figure.option, job.width, job.height);
  }
  writeFigure(job.output, svg);
  return warning;
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .option("kind", { choices: ["scaling", "trace", "tail"] as const, demandOption: true })
    .option("input", { type: "string", demandOption: true })
    .option("output", { type: "string", demandOption: true })
    .option("guides", { type: "boolean", default: true, describe: "draw reference curves (scaling only)" })
    .option("width", { type: "number", default: WIDTH })
    .option("height", { type: "number", default: HEIGHT })
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .strict();

  try {
    const parsed = args.parseSync();
    // --help/--version print and skip option validation, leaving the
    // required fields undefined; stop before treating that as a job.
    if (parsed.help === true || parsed.version === true) {
      return 0;
    }
    const warning = runJob({
      kind: parsed.kind,
      input: parsed.input,
      output: parsed.output,
      guides: parsed.guides,
      width: parsed.width,
      height: parsed.height,
    });
    if (warning !== null) {
      console.error(`warning: ${warning}`);
    }
    console.log(`wrote ${parsed.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const entry = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === entry) {
  process.exit(main(process.argv.slice(2)));
}

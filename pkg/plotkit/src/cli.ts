#!/usr/bin/env node
import { EmptyDataError, SchemaError } from "./csv.js";
import { FIGURE_KINDS, FigureJob, FigureKind, render } from "./figures.js";

const USAGE = `usage: plotkit <kind> --in <csv> --out <svg> [options]

kinds: ${FIGURE_KINDS.join(", ")}

options:
  --in PATH      input CSV (schema of the corresponding torusctl output)
  --out PATH     output SVG file
  --json PATH    companion JSON report (decay: fit parameters rate/prefactor)
  --log          log y axis (control); default for decay
  --linear       linear y axis (decay)
  --no-fit       skip the fitted-exponential overlay (decay)
  --title TEXT   custom figure title
`;

export function parseArgs(argv: string[]): FigureJob {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    throw new SchemaError(USAGE);
  }
  const kind = argv[0] as FigureKind;
  if (!FIGURE_KINDS.includes(kind)) {
    throw new SchemaError(`unknown figure kind '${argv[0]}'\n\n${USAGE}`);
  }
  const job: FigureJob = { kind, input: "", output: "" };
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new SchemaError(`${arg} needs a value`);
      return argv[i];
    };
    switch (arg) {
      case "--in":
        job.input = next();
        break;
      case "--out":
        job.output = next();
        break;
      case "--json":
        job.json = next();
        break;
      case "--log":
        job.logY = true;
        break;
      case "--linear":
        job.logY = false;
        break;
      case "--no-fit":
        job.fitOverlay = false;
        break;
      case "--title":
        job.title = next();
        break;
      default:
        throw new SchemaError(`unknown option '${arg}'\n\n${USAGE}`);
    }
  }
  if (!job.input || !job.output) {
    throw new SchemaError(`--in and --out are required\n\n${USAGE}`);
  }
  return job;
}

export function main(argv: string[]): number {
  try {
    const job = parseArgs(argv);
    render(job);
    console.log(`wrote ${job.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptyDataError) {
      console.error(err.message);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "@@none@@");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}

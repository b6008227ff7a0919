#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { readSweepCsv } from "./csv.js";
import { RenderResult, SCHEMAS, renderFreqCurve, renderPhaseMap, renderTrajectory } from "./figures.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .option("in", { type: "string", demandOption: true, describe: "input CSV" })
    .option("kind", {
      type: "string",
      demandOption: true,
      choices: Object.keys(SCHEMAS),
      describe: "figure kind",
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG" })
    .strict()
    .parse();

  let result: RenderResult;
  try {
    const table = readSweepCsv(argv.in);
    if (argv.kind === "freq_curve") result = renderFreqCurve(table);
    else if (argv.kind === "phase_map") result = renderPhaseMap(table);
    else result = renderTrajectory(table);
  } catch (err) {
    process.stderr.write(`render: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  writeFileSync(argv.out, result.svg);
  if (result.fit) {
    // full-precision so tests can compare against a fit recomputed from the CSV
    process.stdout.write(
      `asymptote_fit slope=${result.fit.slope.toPrecision(17)} ` +
        `intercept=${result.fit.intercept.toPrecision(17)} n=${result.fit.n}\n`,
    );
  }
  process.stdout.write(`wrote ${argv.out}\n`);
  return 0;
}

main().then((code) => {
  process.exitCode = code;
});

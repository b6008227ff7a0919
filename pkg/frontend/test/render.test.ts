import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";
import { readSweepCsv, numericColumn } from "../src/csv.js";
import { asymptoteFit } from "../src/fit.js";
import { renderFreqCurve, renderPhaseMap, renderTrajectory } from "../src/figures.js";

const root = join(dirname(fileURLToPath(import.meta.url)), "..");
const golden = (name: string) => join(root, "golden", name);
let work: string;

beforeAll(() => {
  if (!existsSync(join(root, "dist", "render.js"))) {
    execFileSync("npx", ["tsc", "-p", "."], { cwd: root });
  }
  work = mkdtempSync(join(tmpdir(), "figs-"));
});

function render(args: string[]): { stdout: string; status: number; stderr: string } {
  try {
    const stdout = execFileSync("node", [join(root, "dist", "render.js"), ...args], {
      encoding: "utf8",
    });
    return { stdout, status: 0, stderr: "" };
  } catch (err: any) {
    return { stdout: err.stdout ?? "", status: err.status ?? 1, stderr: err.stderr ?? "" };
  }
}

describe("freq_curve", () => {
  it("printed asymptote fit matches a fit recomputed from the CSV to 1e-6", () => {
    const out = join(work, "freq.svg");
    const res = render(["--in", golden("freq.csv"), "--kind", "freq_curve", "--out", out]);
    expect(res.status).toBe(0);
    const m = res.stdout.match(/asymptote_fit slope=(\S+) intercept=(\S+) n=(\d+)/);
    expect(m).not.toBeNull();
    const table = readSweepCsv(golden("freq.csv"));
    const fit = asymptoteFit(
      numericColumn(table, "T"),
      numericColumn(table, "im_lambda").map(Math.abs),
    );
    expect(Math.abs(Number(m![1]) - fit.slope)).toBeLessThan(1e-6);
    expect(Math.abs(Number(m![2]) - fit.intercept)).toBeLessThan(1e-6);
    expect(Number(m![3])).toBe(fit.n);
  });

  it("overlays a dashed asymptote on log-log axes", () => {
    const { svg } = renderFreqCurve(readSweepCsv(golden("freq.csv")));
    expect(svg).toContain('class="asymptote"');
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain('class="curve"');
  });

  it("fitted slope is near -1/2 on the golden data", () => {
    const table = readSweepCsv(golden("freq.csv"));
    const fit = asymptoteFit(
      numericColumn(table, "T"),
      numericColumn(table, "im_lambda").map(Math.abs),
    );
    expect(fit.slope).toBeLessThan(-0.35);
    expect(fit.slope).toBeGreaterThan(-0.55);
  });
});

describe("phase_map", () => {
  it("renders one cell per row plus contour and detailed-balance stripes", () => {
    const table = readSweepCsv(golden("phase.csv"));
    const { svg } = renderPhaseMap(table);
    const cells = svg.match(/<rect /g) ?? [];
    // one background rect + one rect per grid cell
    expect(cells.length).toBe(table.rows.length + 1);
    expect(svg).toContain('class="contour"');
    expect((svg.match(/db-stripe/g) ?? []).length).toBe(2);
  });

  it("round-trips through the CLI", () => {
    const out = join(work, "phase.svg");
    const res = render(["--in", golden("phase.csv"), "--kind", "phase_map", "--out", out]);
    expect(res.status).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("</svg>");
  });
});

describe("trajectory", () => {
  it("draws all four series and populations stay on the simplex", () => {
    const table = readSweepCsv(golden("traj.csv"));
    const { svg } = renderTrajectory(table);
    expect((svg.match(/class="series"/g) ?? []).length).toBe(4);
    const pm = numericColumn(table, "P_minus");
    const pz = numericColumn(table, "P_zero");
    const pp = numericColumn(table, "P_plus");
    for (let i = 0; i < pm.length; i++) {
      expect(pm[i] + pz[i] + pp[i]).toBeCloseTo(1, 9);
    }
  });
});

describe("degenerate inputs", () => {
  it("header-only CSV yields an empty-axes figure with a warning", () => {
    const p = join(work, "empty.csv");
    writeFileSync(p, "T,gamma,omega_dis,regime,osc_count,im_lambda,re_lambda\n");
    const out = join(work, "empty.svg");
    const res = render(["--in", p, "--kind", "freq_curve", "--out", out]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain('class="warning"');
    expect(svg).toContain("no data rows");
  });

  it("schema mismatch fails with a descriptive message and nonzero exit", () => {
    const out = join(work, "x.svg");
    const res = render(["--in", golden("traj.csv"), "--kind", "phase_map", "--out", out]);
    expect(res.status).not.toBe(0);
    expect(res.stderr).toContain("schema mismatch");
    expect(res.stderr).toContain("V1");
  });

  it("unknown kind is rejected by argument parsing", () => {
    const res = render(["--in", golden("traj.csv"), "--kind", "nope", "--out", join(work, "y.svg")]);
    expect(res.status).not.toBe(0);
  });
});

describe("csv reader", () => {
  it("recovers the embedded generator configuration", () => {
    const table = readSweepCsv(golden("phase.csv"));
    expect(table.config.get("system.v2")).toBe("1.5");
    expect(table.config.get("system.v3")).toBe("4.0");
    expect(table.config.get("resolved.mode")).toBe("phase_diagram");
  });

  it("rendering is read-only: same CSV gives byte-identical SVG", () => {
    const a = renderPhaseMap(readSweepCsv(golden("phase.csv"))).svg;
    const b = renderPhaseMap(readSweepCsv(golden("phase.csv"))).svg;
    expect(a).toBe(b);
  });
});

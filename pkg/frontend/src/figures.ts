import { SweepTable, numericColumn, requireColumns } from "./csv.js";
import { PowerLawFit, asymptoteFit } from "./fit.js";
import { Figure, linearScale, logScale } from "./svg.js";

export const SCHEMAS: Record<string, string[]> = {
  freq_curve: ["T", "gamma", "omega_dis", "regime", "osc_count", "im_lambda", "re_lambda"],
  phase_map: ["V1", "T", "gamma", "regime", "osc_count"],
  trajectory: ["t", "P_minus", "P_zero", "P_plus", "dP_plus_rescaled"],
};

export interface RenderResult {
  svg: string;
  /** asymptote coefficients, present for freq_curve only */
  fit?: PowerLawFit;
}

/**
 * Oscillation frequency |Im λ| against temperature on log–log axes, with the
 * fitted high-T power-law overlaid as a dashed line over its fit window.
 */
export function renderFreqCurve(table: SweepTable): RenderResult {
  requireColumns(table, "freq_curve", SCHEMAS.freq_curve);
  const fig = new Figure();
  if (table.rows.length === 0) {
    fig.warning("no data rows — empty freq_curve CSV");
    return { svg: fig.render() };
  }
  const T = numericColumn(table, "T");
  const im = numericColumn(table, "im_lambda").map(Math.abs);
  const pos = T.filter((_, i) => im[i] > 0);
  if (pos.length < 2) {
    fig.warning("no oscillatory points — nothing to plot");
    return { svg: fig.render() };
  }
  const imPos = im.filter((v) => v > 0);
  const xs = logScale([Math.min(...pos), Math.max(...pos)], fig.xRange());
  const ys = logScale([Math.min(...imPos) * 0.8, Math.max(...imPos) * 1.25], fig.yRange());
  fig.axes(xs, ys, "T", "|Im lambda|", "oscillation frequency vs temperature");
  const pts: [number, number][] = [];
  for (let i = 0; i < T.length; i++) {
    if (im[i] > 0) pts.push([xs(T[i]), ys(im[i])]);
  }
  fig.polyline(pts, 'stroke="#1a6fb0" stroke-width="1.8" class="curve"');
  const fit = asymptoteFit(T, im);
  const tLo = Math.max(...pos) / 100;
  const tHi = Math.max(...pos);
  const yAt = (t: number) => Math.pow(10, fit.intercept + fit.slope * Math.log10(t));
  fig.polyline(
    [
      [xs(tLo), ys(yAt(tLo))],
      [xs(tHi), ys(yAt(tHi))],
    ],
    'stroke="#d4a017" stroke-width="2" stroke-dasharray="7 4" class="asymptote"',
  );
  fig.text(
    fig.xRange()[0] + 10,
    fig.yRange()[1] + 16,
    `fit: slope ${fit.slope.toFixed(4)} over top two decades (${fit.n} pts)`,
    'font-size="12" fill="#555"',
  );
  return { svg: fig.render(), fit };
}

/**
 * Regime heatmap over the (V1, T) grid. Oscillatory cells are shaded red by
 * oscillation count, exponential cells blue, degenerate cells black. The
 * gamma = 0 boundary is drawn as black segments, and if the generating
 * potentials are recorded in the CSV comments, the two detailed-balance
 * columns V1 = V2 and V1 = V3 get dashed gray guides.
 */
export function renderPhaseMap(table: SweepTable): RenderResult {
  requireColumns(table, "phase_map", SCHEMAS.phase_map);
  const fig = new Figure();
  if (table.rows.length === 0) {
    fig.warning("no data rows — empty phase_map CSV");
    return { svg: fig.render() };
  }
  const V1 = numericColumn(table, "V1");
  const T = numericColumn(table, "T");
  const gamma = numericColumn(table, "gamma");
  const osc = numericColumn(table, "osc_count");
  const regime = table.rows.map((r) => r.regime);

  const vGrid = [...new Set(V1)].sort((a, b) => a - b);
  const tGrid = [...new Set(T)].sort((a, b) => a - b);
  const iv = new Map(vGrid.map((v, i) => [v, i]));
  const it = new Map(tGrid.map((t, i) => [t, i]));

  const xs = linearScale([vGrid[0], vGrid[vGrid.length - 1]], fig.xRange());
  const ys = logScale([tGrid[0], tGrid[tGrid.length - 1]], fig.yRange());
  fig.axes(xs, ys, "V1", "T", "thermalization regimes");

  // cell edges: midpoints between grid lines, clamped at the borders
  const vEdge = edges(vGrid, false);
  const tEdge = edges(tGrid, true);
  const oscMax = Math.max(...osc.filter(Number.isFinite), 1e-12);
  const gammaGrid: number[][] = vGrid.map(() => tGrid.map(() => NaN));
  for (let k = 0; k < table.rows.length; k++) {
    const i = iv.get(V1[k])!;
    const j = it.get(T[k])!;
    gammaGrid[i][j] = gamma[k];
    const x0 = xs(vEdge[i]);
    const x1 = xs(vEdge[i + 1]);
    const y0 = ys(tEdge[j]);
    const y1 = ys(tEdge[j + 1]);
    fig.rect(Math.min(x0, x1), Math.min(y0, y1), Math.abs(x1 - x0), Math.abs(y1 - y0),
      cellColor(regime[k], osc[k], oscMax));
  }

  // gamma = 0 boundary: linear interpolation of sign changes along each column,
  // neighbouring columns joined when their crossings are close in log T
  const crossings: [number, number][][] = vGrid.map((v, i) => {
    const out: [number, number][] = [];
    for (let j = 0; j + 1 < tGrid.length; j++) {
      const a = gammaGrid[i][j];
      const b = gammaGrid[i][j + 1];
      if (Number.isFinite(a) && Number.isFinite(b) && a * b < 0) {
        const f = a / (a - b);
        const tc = Math.pow(10, Math.log10(tGrid[j]) + f * (Math.log10(tGrid[j + 1]) - Math.log10(tGrid[j])));
        out.push([v, tc]);
      }
    }
    return out;
  });
  for (let i = 0; i + 1 < vGrid.length; i++) {
    for (const [va, ta] of crossings[i]) {
      let best: [number, number] | null = null;
      for (const [vb, tb] of crossings[i + 1]) {
        if (!best || Math.abs(Math.log10(tb / ta)) < Math.abs(Math.log10(best[1] / ta))) {
          best = [vb, tb];
        }
      }
      if (best && Math.abs(Math.log10(best[1] / ta)) < 0.5) {
        fig.polyline(
          [
            [xs(va), ys(ta)],
            [xs(best[0]), ys(best[1])],
          ],
          'stroke="black" stroke-width="2" class="contour"',
        );
      }
    }
  }

  for (const key of ["system.v2", "system.v3"]) {
    const raw = table.config.get(key);
    const v = raw === undefined ? NaN : Number(raw);
    if (Number.isFinite(v) && v >= vGrid[0] && v <= vGrid[vGrid.length - 1]) {
      fig.line(xs(v), fig.yRange()[0], xs(v), fig.yRange()[1],
        'stroke="#777" stroke-width="1.5" stroke-dasharray="5 4" class="db-stripe"');
    }
  }
  return { svg: fig.render() };
}

/** Populations and the rescaled excited-state deviation against time. */
export function renderTrajectory(table: SweepTable): RenderResult {
  requireColumns(table, "trajectory", SCHEMAS.trajectory);
  const fig = new Figure();
  if (table.rows.length === 0) {
    fig.warning("no data rows — empty trajectory CSV");
    return { svg: fig.render() };
  }
  const t = numericColumn(table, "t");
  const series: [string, string, number[]][] = [
    ["P_minus", "#1a6fb0", numericColumn(table, "P_minus")],
    ["P_zero", "#2e8b57", numericColumn(table, "P_zero")],
    ["P_plus", "#c23b22", numericColumn(table, "P_plus")],
    ["dP_plus_rescaled", "#8a2be2", numericColumn(table, "dP_plus_rescaled")],
  ];
  const all = series.flatMap(([, , v]) => v);
  const lo = Math.min(...all, 0);
  const hi = Math.max(...all, 1);
  const xs = linearScale([t[0], t[t.length - 1]], fig.xRange());
  const ys = linearScale([lo - 0.05, hi + 0.05], fig.yRange());
  fig.axes(xs, ys, "t", "population", "relaxation to the Gibbs state");
  fig.line(xs(t[0]), ys(0), xs(t[t.length - 1]), ys(0), 'stroke="#bbb" stroke-width="1"');
  let ly = fig.yRange()[1] + 14;
  for (const [name, color, v] of series) {
    fig.polyline(t.map((ti, i) => [xs(ti), ys(v[i])]), `stroke="${color}" stroke-width="1.8" class="series"`);
    fig.text(fig.xRange()[1] - 8, ly, name, `text-anchor="end" font-size="12" fill="${color}"`);
    ly += 15;
  }
  return { svg: fig.render() };
}

function edges(grid: number[], log: boolean): number[] {
  const f = log ? Math.log10 : (v: number) => v;
  const g = log ? (v: number) => Math.pow(10, v) : (v: number) => v;
  const out = [grid[0]];
  for (let i = 0; i + 1 < grid.length; i++) out.push(g((f(grid[i]) + f(grid[i + 1])) / 2));
  out.push(grid[grid.length - 1]);
  return out;
}

function cellColor(regime: string, osc: number, oscMax: number): string {
  if (regime === "lep") return "#111111";
  if (regime === "oscillatory") {
    const s = Math.max(0, Math.min(1, osc / oscMax));
    const ch = Math.round(235 - 140 * s);
    return `rgb(${Math.round(200 + 55 * s)},${ch},${ch})`;
  }
  return "#9db8d9";
}

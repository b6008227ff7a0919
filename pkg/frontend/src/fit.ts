export interface PowerLawFit {
  /** slope of log10(y) vs log10(x) */
  slope: number;
  intercept: number;
  /** number of points used */
  n: number;
}

/**
 * Least-squares power-law fit of the oscillation frequency tail.
 *
 * Points with y <= 0 are discarded (no oscillation), and the fit window is the
 * top two decades of x present in the data, so the same rule applied to the
 * same CSV always reproduces the same coefficients.
 */
export function asymptoteFit(x: number[], y: number[]): PowerLawFit {
  if (x.length !== y.length) throw new Error("asymptoteFit: length mismatch");
  const xs: number[] = [];
  const ys: number[] = [];
  const xMax = Math.max(...x.filter((_, i) => y[i] > 0));
  for (let i = 0; i < x.length; i++) {
    if (y[i] > 0 && x[i] >= xMax / 100) {
      xs.push(Math.log10(x[i]));
      ys.push(Math.log10(y[i]));
    }
  }
  const n = xs.length;
  if (n < 2) throw new Error(`asymptoteFit: only ${n} usable point(s)`);
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx, n };
}

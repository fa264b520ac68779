export interface LinearFit {
  slope: number;
  intercept: number;
  r2: number;
}

/** Ordinary least squares y = intercept + slope * x with its R^2. */
export function linearFit(xs: number[], ys: number[]): LinearFit {
  const n = Math.min(xs.length, ys.length);
  if (n < 2) {
    return { slope: 0, intercept: n === 1 ? ys[0] : 0, r2: 1 };
  }
  let sx = 0;
  let sy = 0;
  for (let i = 0; i < n; i++) {
    sx += xs[i];
    sy += ys[i];
  }
  const mx = sx / n;
  const my = sy / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i] - mx;
    const dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const slope = sxx === 0 ? 0 : sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  for (let i = 0; i < n; i++) {
    const e = ys[i] - (intercept + slope * xs[i]);
    ssRes += e * e;
  }
  const r2 = syy === 0 ? 1 : 1 - ssRes / syy;
  return { slope, intercept, r2 };
}

/** Fit ||u(t)|| ~ C exp(-c t) on the trailing part of a decay series. */
export function decayFit(ts: number[], norms: number[], tailFraction = 0.8): LinearFit & {
  rate: number;
  prefactor: number;
} {
  const tMax = Math.max(...ts);
  const start = tMax * (1 - tailFraction);
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < ts.length; i++) {
    if (ts[i] >= start && norms[i] > 0) {
      xs.push(ts[i]);
      ys.push(Math.log(norms[i]));
    }
  }
  const fit = linearFit(xs, ys);
  return { ...fit, rate: -fit.slope, prefactor: Math.exp(fit.intercept) };
}

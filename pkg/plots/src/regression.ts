/** Least-squares slope of log(err) against log(h); matches the harness. */
export function loglogSlope(hs: number[], errs: number[]): number {
  if (hs.length < 2) {
    throw new Error("need at least two step sizes for a regression slope");
  }
  if (errs.some((e) => e <= 0) || hs.some((h) => h <= 0)) {
    throw new Error("step sizes and errors must be positive for a log-log fit");
  }
  const xs = hs.map(Math.log);
  const ys = errs.map(Math.log);
  const xm = xs.reduce((a, b) => a + b, 0) / xs.length;
  const ym = ys.reduce((a, b) => a + b, 0) / ys.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < xs.length; i++) {
    num += (xs[i] - xm) * (ys[i] - ym);
    den += (xs[i] - xm) ** 2;
  }
  return num / den;
}

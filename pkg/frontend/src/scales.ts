/** Axis scaling with sentinel handling for infinities and log-zero values.
 *
 * Infinite values render at the top/right edge; values <= 0 on a log axis
 * clamp to the bottom/left edge. Pixel-to-data conversion returns
 * +-Infinity at the edges so that a full-plot brush rectangle includes the
 * sentinel-positioned points.
 */

export interface Scale {
  lo: number;
  hi: number;
  log: boolean;
  pixelSpan: number;
  toPixel(value: number): number;
  fromPixel(pixel: number): number;
}

export function makeScale(values: Iterable<number>, log: boolean, pixelSpan: number): Scale {
  let lo = Infinity;
  let hi = -Infinity;
  for (const value of values) {
    if (!Number.isFinite(value)) continue;
    if (log && value <= 0) continue;
    if (value < lo) lo = value;
    if (value > hi) hi = value;
  }
  if (lo > hi) {
    lo = log ? 1 : 0;
    hi = log ? 10 : 1;
  }
  if (lo === hi) {
    // degenerate domain: widen so points sit mid-axis
    hi = log ? lo * 10 : lo + 1;
    lo = log ? lo / 10 : lo - 1;
  }
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;

  return {
    lo,
    hi,
    log,
    pixelSpan,
    toPixel(value: number): number {
      if (Number.isNaN(value)) return NaN;
      if (value === Infinity) return pixelSpan;
      if (value === -Infinity) return 0;
      let v = value;
      if (log) {
        if (v <= 0) return 0;
        v = Math.log10(v);
      }
      const t = (v - a) / (b - a);
      return Math.max(0, Math.min(pixelSpan, t * pixelSpan));
    },
    fromPixel(pixel: number): number {
      if (pixel <= 0) return -Infinity;
      if (pixel >= pixelSpan) return Infinity;
      const t = pixel / pixelSpan;
      const v = a + t * (b - a);
      return log ? 10 ** v : v;
    },
  };
}

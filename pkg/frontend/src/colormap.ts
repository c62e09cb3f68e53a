/** Client-side color transfer: density and diverging error colormaps.
 *
 * Stop tables mirror the server's so PNG exports and canvas panes agree.
 * Density values map relative to a shared reference maximum, with values
 * below floorFraction * referenceMax rendered as background white.
 */

export type Rgb = readonly [number, number, number];

export const COLORMAPS: Record<string, readonly Rgb[]> = {
  ylorrd: [
    [255, 255, 204], [255, 237, 160], [254, 217, 118], [254, 178, 76],
    [253, 141, 60], [252, 78, 42], [227, 26, 28], [189, 0, 38], [128, 0, 38],
  ],
  ylgnbu: [
    [255, 255, 217], [237, 248, 177], [199, 233, 180], [127, 205, 187],
    [65, 182, 196], [29, 145, 192], [34, 94, 168], [37, 52, 148], [8, 29, 88],
  ],
  blues: [
    [247, 251, 255], [222, 235, 247], [198, 219, 239], [158, 202, 225],
    [107, 174, 214], [66, 146, 198], [33, 113, 181], [8, 81, 156], [8, 48, 107],
  ],
  greys: [
    [255, 255, 255], [240, 240, 240], [217, 217, 217], [189, 189, 189],
    [150, 150, 150], [115, 115, 115], [82, 82, 82], [37, 37, 37], [0, 0, 0],
  ],
};

/** Diverging map for signed error grids: approx-too-large red, too-small blue. */
export const DIVERGING_RDBU: readonly Rgb[] = [
  [103, 0, 31], [178, 24, 43], [214, 96, 77], [244, 165, 130],
  [253, 219, 199], [247, 247, 247], [209, 229, 240], [146, 197, 222],
  [67, 147, 195], [33, 102, 172], [5, 48, 97],
];

export const BACKGROUND: Rgb = [255, 255, 255];

export const DENSITY_MAP_NAMES = Object.keys(COLORMAPS);

export function sampleColormap(stops: readonly Rgb[], t: number): Rgb {
  if (stops.length < 2) throw new Error("colormap needs at least 2 stops");
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (stops.length - 1);
  const lo = Math.min(stops.length - 2, Math.floor(pos));
  const frac = pos - lo;
  const a = stops[lo];
  const b = stops[lo + 1];
  return [
    Math.round(a[0] + (b[0] - a[0]) * frac),
    Math.round(a[1] + (b[1] - a[1]) * frac),
    Math.round(a[2] + (b[2] - a[2]) * frac),
  ];
}

/** Density grid (row 0 at low y) to RGBA pixels (row 0 at top). */
export function densityToRgba(
  values: Float32Array,
  width: number,
  height: number,
  referenceMax: number,
  floorFraction: number,
  stops: readonly Rgb[],
): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(width * height * 4);
  const floor = floorFraction * referenceMax;
  for (let row = 0; row < height; row++) {
    const srcRow = height - 1 - row; // flip so high y renders on top
    for (let col = 0; col < width; col++) {
      const v = values[srcRow * width + col];
      const offset = (row * width + col) * 4;
      let rgb: Rgb = BACKGROUND;
      if (referenceMax > 0 && v >= floor) {
        rgb = sampleColormap(stops, v / referenceMax);
      }
      out[offset] = rgb[0];
      out[offset + 1] = rgb[1];
      out[offset + 2] = rgb[2];
      out[offset + 3] = 255;
    }
  }
  return out;
}

/** Signed error grid to RGBA on a symmetric [-scale, scale] diverging ramp. */
export function errorToRgba(
  values: Float32Array,
  width: number,
  height: number,
  scale: number,
  stops: readonly Rgb[] = DIVERGING_RDBU,
): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(width * height * 4);
  for (let row = 0; row < height; row++) {
    const srcRow = height - 1 - row;
    for (let col = 0; col < width; col++) {
      const v = values[srcRow * width + col];
      // full - approx < 0 means the subset overshoots: red end of the ramp
      const t = scale > 0 ? (v / scale + 1) / 2 : 0.5;
      const rgb = sampleColormap(stops, t);
      const offset = (row * width + col) * 4;
      out[offset] = rgb[0];
      out[offset + 1] = rgb[1];
      out[offset + 2] = rgb[2];
      out[offset + 3] = 255;
    }
  }
  return out;
}

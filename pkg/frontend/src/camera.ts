/** Shared pan/zoom state over the normalized unit square.
 *
 * Both panes hold the same Camera instance, so their views are equal by
 * construction after any gesture; subscribers re-render on each change.
 */

export interface Extent {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

const MIN_SPAN = 1 / 64;

export class Camera {
  private extentState: Extent = { x0: 0, y0: 0, x1: 1, y1: 1 };
  private listeners = new Set<(extent: Extent) => void>();

  get extent(): Extent {
    return { ...this.extentState };
  }

  get isFullView(): boolean {
    const e = this.extentState;
    return e.x0 === 0 && e.y0 === 0 && e.x1 === 1 && e.y1 === 1;
  }

  subscribe(fn: (extent: Extent) => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  reset(): void {
    this.set({ x0: 0, y0: 0, x1: 1, y1: 1 });
  }

  /** Pan by a fraction of the current view size. */
  pan(dxFrac: number, dyFrac: number): void {
    const e = this.extentState;
    const w = e.x1 - e.x0;
    const h = e.y1 - e.y0;
    this.set(clampExtent({
      x0: e.x0 + dxFrac * w,
      y0: e.y0 + dyFrac * h,
      x1: e.x1 + dxFrac * w,
      y1: e.y1 + dyFrac * h,
    }));
  }

  /** Zoom by `factor` (<1 zooms in) keeping the domain point (fx, fy),
   *  given as fractions of the current view, fixed on screen. */
  zoomAt(fx: number, fy: number, factor: number): void {
    const e = this.extentState;
    const w = e.x1 - e.x0;
    const h = e.y1 - e.y0;
    const span = Math.min(1, Math.max(MIN_SPAN, w * factor));
    const scale = span / w;
    const cx = e.x0 + fx * w;
    const cy = e.y0 + fy * h;
    this.set(clampExtent({
      x0: cx - fx * w * scale,
      y0: cy - fy * h * scale,
      x1: cx + (1 - fx) * w * scale,
      y1: cy + (1 - fy) * h * scale,
    }));
  }

  private set(extent: Extent): void {
    this.extentState = extent;
    for (const fn of this.listeners) fn(this.extent);
  }
}

function clampExtent(e: Extent): Extent {
  const w = Math.min(1, e.x1 - e.x0);
  const h = Math.min(1, e.y1 - e.y0);
  let x0 = Math.max(0, Math.min(e.x0, 1 - w));
  let y0 = Math.max(0, Math.min(e.y0, 1 - h));
  return { x0, y0, x1: x0 + w, y1: y0 + h };
}

export function extentParam(e: Extent): string | undefined {
  if (e.x0 === 0 && e.y0 === 0 && e.x1 === 1 && e.y1 === 1) return undefined;
  return `${e.x0},${e.y0},${e.x1},${e.y1}`;
}

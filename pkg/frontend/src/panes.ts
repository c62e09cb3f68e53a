/** Pane rendering: fetch the pane's grid, apply the client-side transfer
 *  function, and paint it to a canvas.  Both panes share one Camera, so pan
 *  and zoom stay synchronized by construction.
 */

import { EngineClient, LatestWins, RasterResult } from "./api.js";
import { Camera, extentParam } from "./camera.js";
import {
  COLORMAPS,
  densityToRgba,
  errorToRgba,
} from "./colormap.js";
import { PaneKind, Store, ViewState, paneLabel } from "./state.js";

export const GRID_SIZE = 256;

export interface PaneRequestPlan {
  kind: "density" | "error";
  params: Record<string, unknown>;
}

/** Resolve what a pane should fetch for the given state (pure; unit tested). */
export function planRequest(
  pane: PaneKind,
  state: ViewState,
  extent: string | undefined,
): PaneRequestPlan {
  const common = {
    dataset: state.datasetId,
    sigma: state.sigma,
    w: GRID_SIZE,
    h: GRID_SIZE,
    extent,
  };
  if (pane.type === "density") {
    const params: Record<string, unknown> = {
      ...common,
      variant: pane.variant,
    };
    if (pane.variant !== "full") {
      params.k = state.k;
      params.seed = state.seed;
    }
    if (state.denoise) {
      params.denoisePercentage = state.denoise.percentage;
      params.denoiseRadius = state.denoise.radius;
    }
    return { kind: "density", params };
  }
  return {
    kind: "error",
    params: {
      ...common,
      variant: pane.variant,
      kind: pane.kind,
      k: state.k,
      seed: state.seed,
    },
  };
}

export class PaneRenderer {
  private latest = new LatestWins();
  private lastResult: RasterResult | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly label: HTMLElement,
    private readonly client: EngineClient,
    private readonly store: Store,
    private readonly camera: Camera,
    private readonly side: "left" | "right",
  ) {}

  /** Fetch and paint; superseded fetches are dropped (latest wins). */
  async refresh(): Promise<void> {
    const state = this.store.get();
    if (!state.datasetId) return;
    const pane = this.side === "left" ? state.left : state.right;
    const plan = planRequest(pane, state, extentParam(this.camera.extent));
    try {
      const result = await this.latest.run((signal) =>
        plan.kind === "density"
          ? this.client.fetchRaster(plan.params as never, signal)
          : this.client.fetchError(plan.params as never, signal),
      );
      if (!result) return; // superseded
      this.lastResult = result;
      this.paint(pane, state, result);
    } catch (err) {
      this.label.textContent = `${paneLabel(pane)} — ${(err as Error).message}`;
    }
  }

  /** Repaint from the cached grid (colormap/floor changes need no fetch). */
  repaint(): void {
    const state = this.store.get();
    const pane = this.side === "left" ? state.left : state.right;
    if (this.lastResult) this.paint(pane, state, this.lastResult);
  }

  private paint(pane: PaneKind, state: ViewState, result: RasterResult): void {
    const { values, meta } = result;
    const stops = COLORMAPS[state.colormap] ?? COLORMAPS.ylorrd;
    const rgba =
      pane.type === "density"
        ? densityToRgba(
            values,
            meta.width,
            meta.height,
            meta.reference_max,
            state.floorFraction,
            stops,
          )
        : errorToRgba(values, meta.width, meta.height, meta.linf ?? 0);
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    this.canvas.width = meta.width;
    this.canvas.height = meta.height;
    ctx.putImageData(
      new ImageData(rgba, meta.width, meta.height), 0, 0,
    );
    const e = this.camera.extent;
    const detail =
      pane.type === "error"
        ? `linf ${(meta.linf ?? 0).toExponential(2)}`
        : pane.variant === "full"
          ? `${meta.source_size ?? ""}`
          : `k=${state.k}`;
    this.label.textContent =
      `${paneLabel(pane)} ${detail} · view ` +
      `[${e.x0.toFixed(2)},${e.x1.toFixed(2)}]x[${e.y0.toFixed(2)},${e.y1.toFixed(2)}]`;
  }
}

/** The zap workflow: drag a suspected-noise region, ask the service for the
 *  minimal (percentage, radius) pair that suppresses it, preview the
 *  suggestion, then apply it to the shared view state (or cancel).
 */

import {
  CannotSuppressError,
  DenoiseSuggestion,
  EngineClient,
  Region,
} from "./api.js";
import { Store } from "./state.js";

export type ZapPhase =
  | "idle"
  | "selecting"
  | "pending"
  | "suggested"
  | "failed";

export interface ZapView {
  phase: ZapPhase;
  region: Region | null;
  suggestion: DenoiseSuggestion | null;
  message: string;
}

export class ZapController {
  private phase: ZapPhase = "idle";
  private start: [number, number] | null = null;
  private region: Region | null = null;
  private suggestion: DenoiseSuggestion | null = null;
  private message = "";
  private listeners = new Set<(view: ZapView) => void>();

  constructor(
    private readonly client: EngineClient,
    private readonly store: Store,
  ) {}

  view(): ZapView {
    return {
      phase: this.phase,
      region: this.region,
      suggestion: this.suggestion,
      message: this.message,
    };
  }

  subscribe(fn: (view: ZapView) => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  /** Start a drag at a point in normalized domain coordinates. */
  begin(x: number, y: number): void {
    this.start = [x, y];
    this.region = null;
    this.suggestion = null;
    this.message = "";
    this.phase = "selecting";
    this.emit();
  }

  drag(x: number, y: number): void {
    if (this.phase !== "selecting" || !this.start) return;
    const [sx, sy] = this.start;
    this.region = {
      kind: "rect",
      x0: Math.min(sx, x),
      y0: Math.min(sy, y),
      x1: Math.max(sx, x),
      y1: Math.max(sy, y),
    };
    this.emit();
  }

  /** Finish the drag and request a suggestion for the selected region. */
  async finish(gridWidth: number, gridHeight: number): Promise<void> {
    if (this.phase !== "selecting" || !this.region) {
      this.reset();
      return;
    }
    if (this.region.x1 - this.region.x0 <= 0 || this.region.y1 - this.region.y0 <= 0) {
      this.reset();
      return;
    }
    const state = this.store.get();
    if (!state.datasetId) {
      this.reset();
      return;
    }
    this.phase = "pending";
    this.emit();
    try {
      this.suggestion = await this.client.suggestDenoise({
        dataset: state.datasetId,
        sigma: state.sigma,
        width: gridWidth,
        height: gridHeight,
        region: this.region,
        variant: zapVariant(state),
        k: state.k,
        seed: state.seed,
      });
      this.phase = "suggested";
      this.message =
        `suggest percentage=${this.suggestion.percentage.toExponential(3)} ` +
        `radius=${this.suggestion.radius.toFixed(4)}`;
    } catch (err) {
      this.phase = "failed";
      this.suggestion = null;
      this.message =
        err instanceof CannotSuppressError
          ? "this region cannot be suppressed"
          : `suggestion failed: ${(err as Error).message}`;
    }
    this.emit();
  }

  /** Write the suggested pair into the shared state; panes re-render. */
  apply(): DenoiseSuggestion | null {
    if (this.phase !== "suggested" || !this.suggestion) return null;
    const applied = this.suggestion;
    this.store.update({
      denoise: { percentage: applied.percentage, radius: applied.radius },
    });
    this.reset();
    return applied;
  }

  /** Drop the selection and suggestion without touching view state. */
  cancel(): void {
    this.reset();
  }

  private reset(): void {
    this.phase = "idle";
    this.start = null;
    this.region = null;
    this.suggestion = null;
    this.message = "";
    this.emit();
  }

  private emit(): void {
    const view = this.view();
    for (const fn of this.listeners) fn(view);
  }
}

/** Zapping targets the noisy displayed pane, preferring the right one. */
function zapVariant(state: {
  right: { type: string; variant: string };
  left: { type: string; variant: string };
}): string {
  if (state.right.type === "density") return state.right.variant;
  if (state.left.type === "density") return state.left.variant;
  return "full";
}

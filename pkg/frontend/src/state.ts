/** View state shared by both panes and the control strip. */

export type Variant = "full" | "coreset" | "rs";

export type PaneKind =
  | { type: "density"; variant: Variant }
  | { type: "error"; variant: "coreset" | "rs"; kind: "abs" | "rel" };

export interface DenoiseSettings {
  percentage: number;
  radius: number;
}

export interface ViewState {
  datasetId: string | null;
  datasetCount: number;
  k: number;
  sigma: number;
  seed: number;
  colormap: string;
  floorFraction: number;
  denoise: DenoiseSettings | null;
  left: PaneKind;
  right: PaneKind;
}

export const initialState: ViewState = {
  datasetId: null,
  datasetCount: 0,
  k: 1000,
  sigma: 0.02,
  seed: 0,
  colormap: "ylorrd",
  floorFraction: 0.05,
  denoise: null,
  left: { type: "density", variant: "full" },
  right: { type: "density", variant: "coreset" },
};

export class Store {
  private state: ViewState;
  private listeners = new Set<(state: ViewState) => void>();

  constructor(state: ViewState = initialState) {
    this.state = { ...state };
  }

  get(): ViewState {
    return { ...this.state };
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.get());
  }

  subscribe(fn: (state: ViewState) => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }
}

export function paneLabel(pane: PaneKind): string {
  if (pane.type === "density") return pane.variant;
  const rel = pane.kind === "rel" ? " relative" : "";
  return `${pane.variant}${rel} error`;
}

export const PANE_CHOICES: { id: string; pane: PaneKind }[] = [
  { id: "full", pane: { type: "density", variant: "full" } },
  { id: "coreset", pane: { type: "density", variant: "coreset" } },
  { id: "rs", pane: { type: "density", variant: "rs" } },
  { id: "err-coreset", pane: { type: "error", variant: "coreset", kind: "abs" } },
  { id: "err-coreset-rel", pane: { type: "error", variant: "coreset", kind: "rel" } },
  { id: "err-rs", pane: { type: "error", variant: "rs", kind: "abs" } },
  { id: "err-rs-rel", pane: { type: "error", variant: "rs", kind: "rel" } },
];

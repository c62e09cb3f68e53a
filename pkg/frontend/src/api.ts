/** Typed client for the engine's HTTP API, with latest-wins cancellation. */

export interface DatasetMeta {
  id: string;
  count: number;
  bbox: [number, number, number, number];
  seed: number;
  mask: number | null;
  method: string;
  norm_scale: number;
  norm_center: [number, number];
}

export interface RasterMeta {
  width: number;
  height: number;
  extent: [number, number, number, number];
  sigma: number;
  variant: string;
  k: number | null;
  seed: number;
  reference_max: number;
  source_size?: number;
  linf?: number;
  rel_floor?: number;
  masked_pixels?: number;
  kind?: string;
  denoise?: { percentage: number; radius: number; kept_pixels: number };
}

export interface RasterResult {
  values: Float32Array;
  meta: RasterMeta;
}

export interface DensityRequest {
  dataset: string;
  sigma: number;
  w: number;
  h: number;
  variant: "full" | "coreset" | "rs";
  k?: number;
  seed?: number;
  extent?: string;
  denoisePercentage?: number;
  denoiseRadius?: number;
}

export interface ErrorRequest {
  dataset: string;
  sigma: number;
  w: number;
  h: number;
  variant: "coreset" | "rs";
  kind: "abs" | "rel";
  k?: number;
  seed?: number;
  extent?: string;
}

export interface Region {
  kind: "rect";
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface SuggestRequest {
  dataset: string;
  sigma: number;
  width: number;
  height: number;
  region: Region;
  variant?: string;
  k?: number;
  seed?: number;
}

export interface DenoiseSuggestion {
  percentage: number;
  radius: number;
}

export class CannotSuppressError extends Error {}

type FetchFn = typeof fetch;

export class EngineClient {
  constructor(
    readonly base: string,
    private readonly fetchFn: FetchFn = fetch,
  ) {}

  async listDatasets(): Promise<DatasetMeta[]> {
    const res = await this.fetchFn(`${this.base}/datasets`);
    if (!res.ok) throw new Error(`listDatasets failed: ${res.status}`);
    return (await res.json()) as DatasetMeta[];
  }

  async registerPath(path: string): Promise<DatasetMeta> {
    const res = await this.fetchFn(`${this.base}/datasets`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ path }),
    });
    if (!res.ok) throw new Error(`register failed: ${await res.text()}`);
    return (await res.json()) as DatasetMeta;
  }

  async fetchRaster(
    req: DensityRequest,
    signal?: AbortSignal,
  ): Promise<RasterResult> {
    const params = new URLSearchParams({
      dataset: req.dataset,
      sigma: String(req.sigma),
      w: String(req.w),
      h: String(req.h),
      variant: req.variant,
    });
    if (req.k !== undefined) params.set("k", String(req.k));
    if (req.seed !== undefined) params.set("seed", String(req.seed));
    if (req.extent) params.set("extent", req.extent);
    if (req.denoisePercentage !== undefined) {
      params.set("denoise_percentage", String(req.denoisePercentage));
      params.set("denoise_radius", String(req.denoiseRadius ?? 0));
    }
    return this.grid(`/raster?${params}`, signal);
  }

  async fetchError(
    req: ErrorRequest,
    signal?: AbortSignal,
  ): Promise<RasterResult> {
    const params = new URLSearchParams({
      dataset: req.dataset,
      sigma: String(req.sigma),
      w: String(req.w),
      h: String(req.h),
      variant: req.variant,
      kind: req.kind,
    });
    if (req.k !== undefined) params.set("k", String(req.k));
    if (req.seed !== undefined) params.set("seed", String(req.seed));
    if (req.extent) params.set("extent", req.extent);
    return this.grid(`/error?${params}`, signal);
  }

  async suggestDenoise(req: SuggestRequest): Promise<DenoiseSuggestion> {
    const res = await this.fetchFn(`${this.base}/denoise/suggest`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (res.status === 422) {
      throw new CannotSuppressError(await res.text());
    }
    if (!res.ok) throw new Error(`suggest failed: ${await res.text()}`);
    return (await res.json()) as DenoiseSuggestion;
  }

  private async grid(
    pathAndQuery: string,
    signal?: AbortSignal,
  ): Promise<RasterResult> {
    const res = await this.fetchFn(`${this.base}${pathAndQuery}`, { signal });
    if (!res.ok) throw new Error(`grid fetch failed: ${await res.text()}`);
    const header = res.headers.get("X-Raster-Meta");
    if (!header) throw new Error("missing X-Raster-Meta header");
    const meta = JSON.parse(header) as RasterMeta;
    const buffer = await res.arrayBuffer();
    const view = new DataView(buffer);
    const values = new Float32Array(buffer.byteLength / 4);
    for (let i = 0; i < values.length; i++) {
      values[i] = view.getFloat32(i * 4, true); // server sends little-endian
    }
    return { values, meta };
  }
}

/** Serializes async fetches per slot: starting a new one aborts the old,
 *  and a superseded result resolves to null instead of racing the UI. */
export class LatestWins {
  private controller: AbortController | null = null;
  private generation = 0;

  async run<T>(fn: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const generation = ++this.generation;
    try {
      const result = await fn(controller.signal);
      return generation === this.generation ? result : null;
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    }
  }
}

/** Scripted end-to-end zap: start the real engine service, load the
 *  planted-anomaly dataset, select the singleton region through the zap
 *  controller, apply the suggested parameters, and assert the de-noised
 *  pane's raster is zero over the region.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EngineClient } from "../src/api.js";
import { GRID_SIZE, planRequest } from "../src/panes.js";
import { Store, initialState } from "../src/state.js";
import { ZapController } from "../src/zap.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const PORT = 8750 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;
const SIGMA = 0.02;

let server: ChildProcess | null = null;
let workdir = "";

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const res = await fetch(`${BASE}/datasets`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "zap-e2e-"));
  const build = spawnSync(
    "python3",
    [join(REPO_ROOT, "scripts", "build_demo.py"), "--out-dir", workdir],
    { stdio: "pipe", encoding: "utf-8" },
  );
  if (build.status !== 0) {
    throw new Error(`build_demo failed: ${build.stderr}`);
  }
  server = spawn(
    "python3",
    ["-m", "kdecoreset.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("end-to-end zap against the live service", () => {
  it("suppresses the zapped singleton in the de-noised pane", async () => {
    const client = new EngineClient(BASE);
    const ds = await client.registerPath(join(workdir, "planted.kdcs"));
    expect(ds.count).toBe(500);

    const store = new Store({
      ...initialState,
      datasetId: ds.id,
      datasetCount: ds.count,
      k: ds.count,
      sigma: SIGMA,
      left: { type: "density", variant: "full" },
      right: { type: "density", variant: "full" },
    });

    // The ring singleton at angle 0 normalizes to (1.0, 0.5); the analyst
    // drags a small box around its blob.
    const zap = new ZapController(client, store);
    zap.begin(0.94, 0.44);
    zap.drag(1.0, 0.56);
    await zap.finish(GRID_SIZE, GRID_SIZE);
    const view = zap.view();
    expect(view.phase).toBe("suggested");
    expect(view.suggestion!.percentage).toBeGreaterThan(0);
    expect(view.suggestion!.percentage).toBeLessThan(1);

    const applied = zap.apply();
    expect(applied).not.toBeNull();
    expect(store.get().denoise).toEqual(applied);

    // Re-render the right pane exactly as the UI would after applying.
    const plan = planRequest(store.get().right, store.get(), undefined);
    expect(plan.params).toMatchObject({
      denoisePercentage: applied!.percentage,
      denoiseRadius: applied!.radius,
    });
    const denoised = await client.fetchRaster(plan.params as never);
    expect(denoised.meta.denoise?.kept_pixels).toBeGreaterThan(0);

    // Every pixel whose center falls in the zapped region reads zero.
    const { values, meta } = denoised;
    let inspected = 0;
    for (let row = 0; row < meta.height; row++) {
      const cy = (row + 0.5) / meta.height;
      if (cy < 0.44 || cy > 0.56) continue;
      for (let col = 0; col < meta.width; col++) {
        const cx = (col + 0.5) / meta.width;
        if (cx < 0.94) continue;
        inspected++;
        expect(values[row * meta.width + col]).toBe(0);
      }
    }
    expect(inspected).toBeGreaterThan(50);

    // The cluster itself survives de-noising.
    let clusterMass = 0;
    for (let i = 0; i < values.length; i++) clusterMass += values[i];
    expect(clusterMass).toBeGreaterThan(0);
  });

  it("keeps both panes byte-identical for identical requests", async () => {
    const client = new EngineClient(BASE);
    const ds = await client.registerPath(join(workdir, "planted.kdcs"));
    const req = {
      dataset: ds.id, sigma: SIGMA, w: 64, h: 64, variant: "full" as const,
    };
    const a = await client.fetchRaster(req);
    const b = await client.fetchRaster(req);
    expect([...a.values]).toEqual([...b.values]);
  });
});

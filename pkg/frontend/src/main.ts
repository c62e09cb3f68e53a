/** Wires the explorer: dataset picker, dual synchronized panes, colormap
 *  and threshold controls, coreset-size slider, and the zap workflow.
 */

import { EngineClient } from "./api.js";
import { Camera } from "./camera.js";
import { DENSITY_MAP_NAMES } from "./colormap.js";
import { GRID_SIZE, PaneRenderer } from "./panes.js";
import { PANE_CHOICES, Store, initialState, paneLabel } from "./state.js";
import { ZapController } from "./zap.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const client = new EngineClient("");
const store = new Store(initialState);
const camera = new Camera();
const zap = new ZapController(client, store);

const leftCanvas = $<HTMLCanvasElement>("pane-left");
const rightCanvas = $<HTMLCanvasElement>("pane-right");
const panes = [
  new PaneRenderer(leftCanvas, $("label-left"), client, store, camera, "left"),
  new PaneRenderer(rightCanvas, $("label-right"), client, store, camera, "right"),
];

const refresh = () => void Promise.all(panes.map((p) => p.refresh()));

function populateControls(): void {
  for (const side of ["left", "right"] as const) {
    const select = $<HTMLSelectElement>(`variant-${side}`);
    for (const choice of PANE_CHOICES) {
      const option = document.createElement("option");
      option.value = choice.id;
      option.textContent = paneLabel(choice.pane);
      select.append(option);
    }
    select.value = side === "left" ? "full" : "coreset";
    select.onchange = () => {
      const pane = PANE_CHOICES.find((c) => c.id === select.value)!.pane;
      store.update(side === "left" ? { left: pane } : { right: pane });
      refresh();
    };
  }
  const cmap = $<HTMLSelectElement>("colormap");
  for (const name of DENSITY_MAP_NAMES) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    cmap.append(option);
  }
  cmap.onchange = () => {
    store.update({ colormap: cmap.value });
    panes.forEach((p) => p.repaint()); // no server round trip
  };

  const floor = $<HTMLInputElement>("floor");
  floor.oninput = () => {
    store.update({ floorFraction: Number(floor.value) / 100 });
    $("floor-value").textContent = `${floor.value}%`;
    panes.forEach((p) => p.repaint());
  };
  $<HTMLButtonElement>("floor-reset").onclick = () => {
    floor.value = "5";
    floor.dispatchEvent(new Event("input"));
  };

  const slider = $<HTMLInputElement>("k-slider");
  slider.oninput = () => {
    store.update({ k: Number(slider.value) });
    $("k-value").textContent = slider.value;
    refresh();
  };

  const sigma = $<HTMLInputElement>("sigma");
  sigma.onchange = () => {
    store.update({ sigma: Number(sigma.value) });
    refresh();
  };

  const pct = $<HTMLInputElement>("denoise-pct");
  const radius = $<HTMLInputElement>("denoise-radius");
  const applyManual = () => {
    const p = Number(pct.value);
    const r = Number(radius.value);
    store.update({
      denoise: p > 0 ? { percentage: p, radius: r >= 0 ? r : 0 } : null,
    });
    refresh();
  };
  pct.onchange = applyManual;
  radius.onchange = applyManual;
  $<HTMLButtonElement>("denoise-clear").onclick = () => {
    pct.value = "";
    radius.value = "";
    store.update({ denoise: null });
    refresh();
  };

  $<HTMLButtonElement>("reset-view").onclick = () => camera.reset();
}

async function populateDatasets(): Promise<void> {
  const select = $<HTMLSelectElement>("dataset");
  const datasets = await client.listDatasets();
  select.innerHTML = "";
  for (const ds of datasets) {
    const option = document.createElement("option");
    option.value = ds.id;
    option.textContent = `${ds.id} (${ds.count} pts)`;
    select.append(option);
  }
  const pick = (id: string, count: number) => {
    const k = Math.max(1, Math.min(1000, count));
    store.update({ datasetId: id, datasetCount: count, k });
    const slider = $<HTMLInputElement>("k-slider");
    slider.max = String(count);
    slider.value = String(k);
    $("k-value").textContent = String(k);
    refresh();
  };
  select.onchange = () => {
    const ds = datasets.find((d) => d.id === select.value);
    if (ds) pick(ds.id, ds.count);
  };
  if (datasets.length) pick(datasets[0].id, datasets[0].count);

  $<HTMLButtonElement>("register").onclick = async () => {
    const path = $<HTMLInputElement>("register-path").value.trim();
    if (!path) return;
    await client.registerPath(path);
    await populateDatasets();
  };
}

/** Convert a pointer event to normalized domain coordinates via the camera. */
function domainPoint(canvas: HTMLCanvasElement, ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const fx = (ev.clientX - rect.left) / rect.width;
  const fy = 1 - (ev.clientY - rect.top) / rect.height; // canvas y is down
  const e = camera.extent;
  return [e.x0 + fx * (e.x1 - e.x0), e.y0 + fy * (e.y1 - e.y0)];
}

function wireGestures(canvas: HTMLCanvasElement): void {
  let panning = false;
  let last: [number, number] | null = null;

  canvas.addEventListener("pointerdown", (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    const [x, y] = domainPoint(canvas, ev);
    if ($<HTMLInputElement>("zap-mode").checked) {
      zap.begin(x, y);
    } else {
      panning = true;
      last = [ev.clientX, ev.clientY];
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (panning && last) {
      const rect = canvas.getBoundingClientRect();
      camera.pan(-(ev.clientX - last[0]) / rect.width, (ev.clientY - last[1]) / rect.height);
      last = [ev.clientX, ev.clientY];
    } else {
      const [x, y] = domainPoint(canvas, ev);
      zap.drag(x, y);
    }
  });
  canvas.addEventListener("pointerup", () => {
    if (panning) {
      panning = false;
      last = null;
    } else {
      void zap.finish(GRID_SIZE, GRID_SIZE);
    }
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    const fx = (ev.clientX - rect.left) / rect.width;
    const fy = 1 - (ev.clientY - rect.top) / rect.height;
    camera.zoomAt(fx, fy, ev.deltaY > 0 ? 1.25 : 0.8);
  });
}

function wireZapTooltip(): void {
  const tip = $("zap-tip");
  const text = $("zap-text");
  zap.subscribe((view) => {
    if (view.phase === "suggested" || view.phase === "failed") {
      tip.style.display = "block";
      text.textContent = view.message;
      $<HTMLButtonElement>("zap-apply").disabled = view.phase !== "suggested";
    } else if (view.phase === "idle") {
      tip.style.display = "none";
    }
  });
  $<HTMLButtonElement>("zap-apply").onclick = () => {
    const applied = zap.apply();
    if (applied) {
      $<HTMLInputElement>("denoise-pct").value = String(applied.percentage);
      $<HTMLInputElement>("denoise-radius").value = String(applied.radius);
      refresh();
    }
  };
  $<HTMLButtonElement>("zap-cancel").onclick = () => zap.cancel();
}

let refreshQueued = false;
camera.subscribe(() => {
  // coalesce rapid pan/zoom events into one fetch per frame
  if (refreshQueued) return;
  refreshQueued = true;
  requestAnimationFrame(() => {
    refreshQueued = false;
    refresh();
  });
});

populateControls();
wireGestures(leftCanvas);
wireGestures(rightCanvas);
wireZapTooltip();
void populateDatasets();

/** DOM wiring: two synchronized-or-independent panes over one study. */

import { ApiClient, type HistogramResponse } from "./api.js";
import { drawHistogram } from "./histogram.js";
import { decodePgm, toRgba } from "./pgm.js";
import { RenderScheduler } from "./scheduler.js";
import {
  PANES,
  initialState,
  loadStudy,
  paneLabels,
  recordRequest,
  setLinked,
  setStrategy,
  setSuppress,
  setWindow,
  valueRange,
  type PaneId,
  type ViewerState,
} from "./state.js";
import { mapDragToWindow, type WindowSettings } from "./window-settings.js";

const api = new ApiClient("");
let state: ViewerState = initialState();
const histograms: Partial<Record<PaneId, HistogramResponse>> = {};

const banner = document.getElementById("banner") as HTMLDivElement;

function showBanner(message: string): void {
  banner.textContent = message;
  banner.classList.add("visible");
  setTimeout(() => banner.classList.remove("visible"), 4000);
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

interface PaneDom {
  canvas: HTMLCanvasElement;
  histogram: HTMLCanvasElement;
  wwSlider: HTMLInputElement;
  wlSlider: HTMLInputElement;
  wwLabel: HTMLSpanElement;
  wlLabel: HTMLSpanElement;
  suppress: HTMLInputElement;
  strategy: HTMLSelectElement;
  auto: HTMLButtonElement;
  warning: HTMLDivElement;
}

function paneDom(pane: PaneId): PaneDom {
  return {
    canvas: el<HTMLCanvasElement>(`${pane}-canvas`),
    histogram: el<HTMLCanvasElement>(`${pane}-histogram`),
    wwSlider: el<HTMLInputElement>(`${pane}-ww`),
    wlSlider: el<HTMLInputElement>(`${pane}-wl`),
    wwLabel: el<HTMLSpanElement>(`${pane}-ww-label`),
    wlLabel: el<HTMLSpanElement>(`${pane}-wl-label`),
    suppress: el<HTMLInputElement>(`${pane}-suppress`),
    strategy: el<HTMLSelectElement>(`${pane}-strategy`),
    auto: el<HTMLButtonElement>(`${pane}-auto`),
    warning: el<HTMLDivElement>(`${pane}-warning`),
  };
}

const dom: Record<PaneId, PaneDom> = {
  original: paneDom("original"),
  suppressed: paneDom("suppressed"),
};

const schedulers: Record<PaneId, RenderScheduler<{ url: string; pane: PaneId }>> = {
  original: makeScheduler("original"),
  suppressed: makeScheduler("suppressed"),
};

function makeScheduler(pane: PaneId): RenderScheduler<{ url: string; pane: PaneId }> {
  return new RenderScheduler(
    async ({ url }) => {
      const buffer = await api.fetchRender(url);
      paintRender(pane, buffer);
    },
    33,
    (error) => showBanner(String(error)),
  );
}

function paintRender(pane: PaneId, buffer: ArrayBuffer): void {
  const pgm = decodePgm(buffer);
  const canvas = dom[pane].canvas;
  canvas.width = pgm.width;
  canvas.height = pgm.height;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const imageData = ctx.createImageData(pgm.width, pgm.height);
  imageData.data.set(toRgba(pgm));
  ctx.putImageData(imageData, 0, 0);
}

function syncControls(): void {
  for (const pane of PANES) {
    const s = state.panes[pane];
    const d = dom[pane];
    const labels = paneLabels(state, pane);
    d.wwLabel.textContent = labels.ww;
    d.wlLabel.textContent = labels.wl;
    d.suppress.checked = s.suppress;
    d.strategy.value = s.strategy;
    if (s.window) {
      d.wwSlider.value = String(s.window.ww);
      d.wlSlider.value = String(s.window.wl);
    }
    const histogram = histograms[pane];
    const ctx = d.histogram.getContext("2d");
    if (histogram && ctx) drawHistogram(ctx, histogram, s.window);
  }
}

function requestRender(pane: PaneId): void {
  const s = state.panes[pane];
  if (!state.studyId || !s.window) return;
  const url = api.renderUrl(state.studyId, {
    ww: s.window.ww,
    wl: s.window.wl,
    suppress: s.suppress,
  });
  state = recordRequest(state, pane, { url, ww: s.window.ww, wl: s.window.wl });
  schedulers[pane].request({ url, pane });
  syncControls();
}

function applyWindow(pane: PaneId, window: WindowSettings): void {
  state = setWindow(state, pane, window);
  if (state.linkPanes) {
    for (const p of PANES) requestRender(p);
  } else {
    requestRender(pane);
  }
}

async function refreshHistogram(pane: PaneId): Promise<void> {
  if (!state.studyId) return;
  try {
    histograms[pane] = await api.histogram(state.studyId, state.panes[pane].suppress, 96);
    syncControls();
  } catch (error) {
    showBanner(String(error));
  }
}

async function autoWindow(pane: PaneId): Promise<void> {
  if (!state.studyId) return;
  const s = state.panes[pane];
  try {
    const result = await api.autoWindow(state.studyId, s.suppress, s.strategy);
    if (result.warnings.length) dom[pane].warning.textContent = result.warnings.join("; ");
    applyWindow(pane, { ww: result.ww, wl: result.wl });
  } catch (error) {
    showBanner(String(error));
  }
}

function configureSliders(): void {
  const range = valueRange(state);
  if (!state.imageRange) return;
  const [lo, hi] = state.imageRange;
  for (const pane of PANES) {
    const d = dom[pane];
    d.wlSlider.min = String(Math.floor(lo - range / 2));
    d.wlSlider.max = String(Math.ceil(hi + range / 2));
    d.wlSlider.step = "any";
    d.wwSlider.min = "1";
    d.wwSlider.max = String(Math.ceil(2 * range) || 1);
    d.wwSlider.step = "any";
  }
}

function wirePane(pane: PaneId): void {
  const d = dom[pane];

  d.wwSlider.addEventListener("input", () => {
    applyWindow(pane, { wl: Number(d.wlSlider.value), ww: Number(d.wwSlider.value) });
  });
  d.wlSlider.addEventListener("input", () => {
    applyWindow(pane, { wl: Number(d.wlSlider.value), ww: Number(d.wwSlider.value) });
  });

  d.suppress.addEventListener("change", () => {
    state = setSuppress(state, pane, d.suppress.checked);
    void refreshHistogram(pane);
    requestRender(pane);
  });

  d.strategy.addEventListener("change", () => {
    state = setStrategy(state, pane, d.strategy.value);
  });

  d.auto.addEventListener("click", () => void autoWindow(pane));

  // Drag-to-window: horizontal = level, vertical = width.
  let dragStart: { x: number; y: number; window: WindowSettings } | null = null;
  d.canvas.addEventListener("pointerdown", (event) => {
    const s = state.panes[pane];
    if (!s.window) return;
    dragStart = { x: event.clientX, y: event.clientY, window: s.window };
    d.canvas.setPointerCapture(event.pointerId);
  });
  d.canvas.addEventListener("pointermove", (event) => {
    if (!dragStart) return;
    const next = mapDragToWindow(
      event.clientX - dragStart.x,
      event.clientY - dragStart.y,
      dragStart.window,
      valueRange(state) || 1,
    );
    applyWindow(pane, next);
  });
  const endDrag = () => {
    dragStart = null;
  };
  d.canvas.addEventListener("pointerup", endDrag);
  d.canvas.addEventListener("pointercancel", endDrag);
}

async function handleUpload(file: File): Promise<void> {
  const format = file.name.toLowerCase().endsWith(".pgm") ? "pgm" : "dicom";
  try {
    const summary = await api.uploadStudy(await file.arrayBuffer(), format);
    state = loadStudy(state, summary);
    configureSliders();
    if (summary.warnings.length) showBanner(summary.warnings.join("; "));
    for (const pane of PANES) {
      await refreshHistogram(pane);
      await autoWindow(pane);
    }
  } catch (error) {
    showBanner(String(error));
  }
}

function wireGlobal(): void {
  const upload = el<HTMLInputElement>("upload");
  upload.addEventListener("change", () => {
    const file = upload.files?.[0];
    if (file) void handleUpload(file);
  });

  const link = el<HTMLInputElement>("link-panes");
  link.addEventListener("change", () => {
    state = setLinked(state, link.checked);
    if (state.linkPanes) for (const pane of PANES) requestRender(pane);
  });
}

for (const pane of PANES) wirePane(pane);
wireGlobal();
syncControls();

/**
 * Viewer state and its pure transitions. Two panes view one study: by default
 * the left pane renders the full image and the right one the suppressed image.
 * Panes are independent unless linked; linked panes share window settings and
 * differ only in the suppress flag.
 */

import type { StudySummary } from "./api.js";
import { clampWidth, type WindowSettings } from "./window-settings.js";

export type PaneId = "original" | "suppressed";
export const PANES: PaneId[] = ["original", "suppressed"];

export interface LastRequest {
  url: string;
  ww: number;
  wl: number;
}

export interface PaneState {
  suppress: boolean;
  window: WindowSettings | null;
  strategy: string;
  /** The last render actually requested; WW/WL labels read from here. */
  lastRequest: LastRequest | null;
}

export interface ViewerState {
  studyId: string | null;
  imageRange: [number, number] | null;
  linkPanes: boolean;
  panes: Record<PaneId, PaneState>;
}

export const DEFAULT_STRATEGY = "percentile:1,99";

function freshPane(suppress: boolean): PaneState {
  return { suppress, window: null, strategy: DEFAULT_STRATEGY, lastRequest: null };
}

export function initialState(): ViewerState {
  return {
    studyId: null,
    imageRange: null,
    linkPanes: false,
    panes: { original: freshPane(false), suppressed: freshPane(true) },
  };
}

export function loadStudy(state: ViewerState, summary: StudySummary): ViewerState {
  return {
    ...state,
    studyId: summary.id,
    imageRange: [summary.value_min, summary.value_max],
    panes: { original: freshPane(false), suppressed: freshPane(true) },
  };
}

export function valueRange(state: ViewerState): number {
  if (!state.imageRange) return 0;
  return state.imageRange[1] - state.imageRange[0];
}

function withPane(state: ViewerState, pane: PaneId, next: Partial<PaneState>): ViewerState {
  return {
    ...state,
    panes: { ...state.panes, [pane]: { ...state.panes[pane], ...next } },
  };
}

/** Set a pane's window; mirrors to the other pane when linked. */
export function setWindow(state: ViewerState, pane: PaneId, window: WindowSettings): ViewerState {
  const clamped = { wl: window.wl, ww: clampWidth(window.ww) };
  if (!state.linkPanes) return withPane(state, pane, { window: clamped });
  return {
    ...state,
    panes: {
      original: { ...state.panes.original, window: clamped },
      suppressed: { ...state.panes.suppressed, window: clamped },
    },
  };
}

export function setSuppress(state: ViewerState, pane: PaneId, suppress: boolean): ViewerState {
  return withPane(state, pane, { suppress });
}

export function setStrategy(state: ViewerState, pane: PaneId, strategy: string): ViewerState {
  return withPane(state, pane, { strategy });
}

/** Linking unifies windows immediately, copying from the given source pane. */
export function setLinked(state: ViewerState, linked: boolean, source: PaneId = "original"): ViewerState {
  if (!linked) return { ...state, linkPanes: false };
  const window = state.panes[source].window;
  return {
    ...state,
    linkPanes: true,
    panes: {
      original: { ...state.panes.original, window },
      suppressed: { ...state.panes.suppressed, window },
    },
  };
}

/** Record the render that was actually requested for a pane. */
export function recordRequest(state: ViewerState, pane: PaneId, request: LastRequest): ViewerState {
  return withPane(state, pane, { lastRequest: request });
}

/** WW/WL labels a pane must display: always from the last requested URL. */
export function paneLabels(state: ViewerState, pane: PaneId): { ww: string; wl: string } {
  const last = state.panes[pane].lastRequest;
  if (!last) return { ww: "--", wl: "--" };
  return { ww: last.ww.toFixed(1), wl: last.wl.toFixed(1) };
}

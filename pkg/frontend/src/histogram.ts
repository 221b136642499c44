/** Geometry for the histogram overlay: bars plus the active window band. */

import type { HistogramResponse } from "./api.js";

export interface Band {
  x0: number;
  x1: number;
}

/**
 * Horizontal extent (in canvas pixels) of the window band
 * [wl - ww/2, wl + ww/2], mapped linearly from the histogram range and
 * clamped to the canvas.
 */
export function windowBand(
  wl: number,
  ww: number,
  rangeMin: number,
  rangeMax: number,
  widthPx: number,
): Band {
  const span = rangeMax - rangeMin;
  if (span <= 0) return { x0: 0, x1: widthPx };
  const toPx = (v: number) => ((v - rangeMin) / span) * widthPx;
  const x0 = Math.max(0, Math.min(widthPx, toPx(wl - ww / 2)));
  const x1 = Math.max(0, Math.min(widthPx, toPx(wl + ww / 2)));
  return { x0, x1 };
}

/** Bar heights in pixels, scaled so the fullest bin touches the top. */
export function barHeights(counts: number[], heightPx: number): number[] {
  const peak = Math.max(...counts, 1);
  return counts.map((c) => (c / peak) * heightPx);
}

export function drawHistogram(
  ctx: CanvasRenderingContext2D,
  histogram: HistogramResponse,
  window: { wl: number; ww: number } | null,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "rgba(20, 24, 28, 0.9)";
  ctx.fillRect(0, 0, width, height);

  if (window) {
    const band = windowBand(window.wl, window.ww, histogram.range_min, histogram.range_max, width);
    ctx.fillStyle = "rgba(90, 160, 255, 0.25)";
    ctx.fillRect(band.x0, 0, Math.max(1, band.x1 - band.x0), height);
  }

  const heights = barHeights(histogram.counts, height - 2);
  const barWidth = width / histogram.counts.length;
  ctx.fillStyle = "rgba(230, 234, 240, 0.85)";
  heights.forEach((h, i) => {
    ctx.fillRect(i * barWidth, height - h, Math.max(1, barWidth - 1), h);
  });
}

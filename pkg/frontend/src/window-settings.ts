/** Window settings math shared by sliders and drag interaction. */

export interface WindowSettings {
  /** Window level: input intensity centered in the display grayscale. */
  wl: number;
  /** Window width: intensity span mapped across the grayscale; >= 1. */
  ww: number;
}

/**
 * Drag gain: one full image-range traversal per 512 px of mouse travel,
 * the usual radiology convention. Exposed so it can be tuned in one place.
 */
export const DRAG_GAIN_DIVISOR = 512;

export function clampWidth(ww: number): number {
  return Math.max(1, ww);
}

/**
 * Map a drag delta onto new window settings: right = brighter level,
 * down = wider window. `range` is value_max - value_min of the study.
 */
export function mapDragToWindow(
  dx: number,
  dy: number,
  current: WindowSettings,
  range: number,
): WindowSettings {
  const gain = range / DRAG_GAIN_DIVISOR;
  return {
    wl: current.wl + dx * gain,
    ww: clampWidth(current.ww + dy * gain),
  };
}

/** Pure geometry for drawing candidate boxes over the image.
 *
 * Rectangles are placed in CSS pixels: a box coordinate maps to
 * coordinate * zoom, where zoom = displayedWidth / nativeWidth. Colors are
 * assigned by display position only, never by anything tied to where a
 * candidate came from, and the palette order is reshuffled per task.
 */

import type { BoxArray } from "./types.js";

export type DisplayRect = {
  left: number;
  top: number;
  width: number;
  height: number;
};

export function toDisplayRect(box: BoxArray, zoom: number): DisplayRect {
  return {
    left: box[0] * zoom,
    top: box[1] * zoom,
    width: box[2] * zoom,
    height: box[3] * zoom,
  };
}

export function zoomFor(nativeWidth: number, displayedWidth: number): number {
  return displayedWidth / nativeWidth;
}

/** Distinct, color-blind-friendly stroke colors. */
export const PALETTE = ["#e69f00", "#56b4e9", "#009e73", "#cc79a7", "#0072b2"];

/** Color per display position, rotated by a per-task offset so that no
 * fixed color is associated with position 0 across tasks either. */
export function colorForPosition(position: number, taskSeed: number): string {
  const idx = (position + taskSeed) % PALETTE.length;
  return PALETTE[idx] ?? PALETTE[0]!;
}

/** Cheap deterministic hash of the task id, used only for color rotation. */
export function taskColorSeed(taskId: string): number {
  let h = 0;
  for (let i = 0; i < taskId.length; i++) {
    h = (h * 31 + taskId.charCodeAt(i)) >>> 0;
  }
  return h % PALETTE.length;
}

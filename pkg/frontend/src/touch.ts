/** Pointer capture math: browser pointer events on the touchpad pane
 * become normalized touch messages. Pure functions plus a small tracker,
 * so the mapping is testable without a DOM. Whether the pane is drawn
 * blank has no input here: hiding it cannot change the traffic. */

import type { TouchMessage } from "./protocol.js";
import { touchMessage } from "./protocol.js";

export interface PaneRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Normalized pane coordinates, or null when the point lies outside. */
export function normalizePoint(
  rect: PaneRect,
  clientX: number,
  clientY: number,
): { x: number; y: number } | null {
  if (rect.width <= 0 || rect.height <= 0) return null;
  const x = (clientX - rect.left) / rect.width;
  const y = (clientY - rect.top) / rect.height;
  if (x < 0 || x > 1 || y < 0 || y > 1) return null;
  return { x, y };
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** Tracks which pointers are down so moves and lifts of a captured
 * contact keep flowing even when the pointer drags past the pane edge
 * (coordinates clamp to the rim, matching what a finger sliding off a
 * physical pad would report). Contacts that start outside are ignored. */
export class ContactTracker {
  private active = new Set<number>();

  down(
    pointerId: number,
    rect: PaneRect,
    clientX: number,
    clientY: number,
    t: number,
  ): TouchMessage | null {
    if (this.active.has(pointerId)) return null;
    const p = normalizePoint(rect, clientX, clientY);
    if (!p) return null;
    this.active.add(pointerId);
    return touchMessage("touch_down", pointerId, p.x, p.y, t);
  }

  move(
    pointerId: number,
    rect: PaneRect,
    clientX: number,
    clientY: number,
    t: number,
  ): TouchMessage | null {
    if (!this.active.has(pointerId) || rect.width <= 0 || rect.height <= 0) {
      return null;
    }
    const x = clamp01((clientX - rect.left) / rect.width);
    const y = clamp01((clientY - rect.top) / rect.height);
    return touchMessage("touch_move", pointerId, x, y, t);
  }

  up(
    pointerId: number,
    rect: PaneRect,
    clientX: number,
    clientY: number,
    t: number,
  ): TouchMessage | null {
    if (!this.active.has(pointerId) || rect.width <= 0 || rect.height <= 0) {
      return null;
    }
    this.active.delete(pointerId);
    const x = clamp01((clientX - rect.left) / rect.width);
    const y = clamp01((clientY - rect.top) / rect.height);
    return touchMessage("touch_up", pointerId, x, y, t);
  }

  isDown(pointerId: number): boolean {
    return this.active.has(pointerId);
  }

  /** Lift everything (pane unmounted, connection dropped). */
  reset(): void {
    this.active.clear();
  }
}

/** Geometry helpers for drawing the keyboard mirror: key centers in key
 * units (x = row offset + column, y = row index) exactly as the server
 * reports cursor positions, so markers and keys share one coordinate
 * space. */

import type { LayoutInfo, Thumb } from "./protocol.js";

export interface KeyPlacement {
  key: string;
  x: number;
  y: number;
  thumb: Thumb;
  isStart: boolean;
}

export interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

export function keyPlacements(layout: LayoutInfo): KeyPlacement[] {
  const out: KeyPlacement[] = [];
  layout.rows.forEach((row, rowIdx) => {
    const offset = layout.offsets[rowIdx] ?? 0;
    for (let col = 0; col < row.length; col++) {
      const key = row[col] as string;
      out.push({
        key,
        x: offset + col,
        y: rowIdx,
        thumb: layout.thumb_map[key] ?? "left",
        isStart: key === layout.start_left || key === layout.start_right,
      });
    }
  });
  return out;
}

export function keyPosition(
  layout: LayoutInfo,
  key: string,
): { x: number; y: number } | null {
  for (let rowIdx = 0; rowIdx < layout.rows.length; rowIdx++) {
    const col = (layout.rows[rowIdx] as string).indexOf(key);
    if (col >= 0) return { x: (layout.offsets[rowIdx] ?? 0) + col, y: rowIdx };
  }
  return null;
}

export function layoutBounds(placements: KeyPlacement[]): Bounds {
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const p of placements) {
    minX = Math.min(minX, p.x);
    maxX = Math.max(maxX, p.x);
    minY = Math.min(minY, p.y);
    maxY = Math.max(maxY, p.y);
  }
  return { minX, maxX, minY, maxY };
}

/** "row,col" -> [row, col], or null if malformed. */
export function parseCellId(id: string): [number, number] | null {
  const m = /^([0-2]),([0-2])$/.exec(id);
  if (!m) return null;
  return [Number(m[1]), Number(m[2])];
}

/** Center of a 3x3 tap cell in normalized pad coordinates. */
export function tapCellCenter(row: number, col: number): { x: number; y: number } {
  return { x: (col + 0.5) / 3, y: (row + 0.5) / 3 };
}

/** Normalized tap point for a named function key, from the announced
 * tap map; null if the layout does not assign it. */
export function functionTapPoint(
  layout: LayoutInfo,
  name: string,
): { x: number; y: number } | null {
  for (const [id, fn] of Object.entries(layout.tap_map)) {
    if (fn !== name) continue;
    const cell = parseCellId(id);
    if (cell) return tapCellCenter(cell[0], cell[1]);
  }
  return null;
}

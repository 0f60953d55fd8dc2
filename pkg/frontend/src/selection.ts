/** Hit testing for scatter selections, in data coordinates. */

export interface Point {
  x: number;
  y: number;
}

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function normalized(rect: Rect): Rect {
  return {
    x0: Math.min(rect.x0, rect.x1),
    x1: Math.max(rect.x0, rect.x1),
    y0: Math.min(rect.y0, rect.y1),
    y1: Math.max(rect.y0, rect.y1),
  };
}

/** Row ids of the points inside a (possibly inverted) rectangle. */
export function rectangleSelect(
  coords: readonly [number, number][],
  rowIds: readonly number[],
  rect: Rect
): number[] {
  const r = normalized(rect);
  const out: number[] = [];
  coords.forEach(([x, y], i) => {
    if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1) out.push(rowIds[i]);
  });
  return out;
}

/** Even-odd ray casting; vertices on an edge count as inside enough
 * for gesture purposes. */
export function pointInPolygon(p: Point, polygon: readonly Point[]): boolean {
  let inside = false;
  const n = polygon.length;
  for (let i = 0, j = n - 1; i < n; j = i++) {
    const a = polygon[i];
    const b = polygon[j];
    const crosses =
      a.y > p.y !== b.y > p.y &&
      p.x < ((b.x - a.x) * (p.y - a.y)) / (b.y - a.y) + a.x;
    if (crosses) inside = !inside;
  }
  return inside;
}

/** Row ids of the points inside a lasso polygon; degenerate lassos
 * (fewer than 3 vertices) select nothing. */
export function lassoSelect(
  coords: readonly [number, number][],
  rowIds: readonly number[],
  polygon: readonly Point[]
): number[] {
  if (polygon.length < 3) return [];
  const out: number[] = [];
  coords.forEach(([x, y], i) => {
    if (pointInPolygon({ x, y }, polygon)) out.push(rowIds[i]);
  });
  return out;
}

import { BrushSelection, FilterState, Rect, ResultBundle } from "./types";

export function emptyFilterState(): FilterState {
  return { ranges: {}, categories: {}, brushes: {} };
}

function cloneState(state: FilterState): FilterState {
  return {
    ranges: { ...state.ranges },
    categories: { ...state.categories },
    brushes: { ...state.brushes },
  };
}

export function withRange(
  state: FilterState, column: string, min?: number, max?: number
): FilterState {
  const next = cloneState(state);
  if (min === undefined && max === undefined) {
    delete next.ranges[column];
  } else {
    next.ranges[column] = { min, max };
  }
  return next;
}

export function withCategories(
  state: FilterState, column: string, include: string[] | null
): FilterState {
  const next = cloneState(state);
  if (include === null) {
    delete next.categories[column];
  } else {
    next.categories[column] = [...include];
  }
  return next;
}

/** Add or replace one plot's brush; null clears it. */
export function withBrush(
  state: FilterState, plotId: string, brush: BrushSelection | null
): FilterState {
  const next = cloneState(state);
  if (brush === null) {
    delete next.brushes[plotId];
  } else {
    next.brushes[plotId] = brush;
  }
  return next;
}

function insideRect(x: number, y: number, rect: Rect): boolean {
  if (Number.isNaN(x) || Number.isNaN(y)) return false;
  return x >= rect.x0 && x <= rect.x1 && y >= rect.y0 && y <= rect.y1;
}

/** Indices of rows passing every active filter and brush (conjunction).
 * Absent numeric values fail any active range on their column, matching the
 * CLI filter's comparison semantics; +Infinity passes any lower bound. */
export function visibleIndices(bundle: ResultBundle, state: FilterState): number[] {
  const rangeChecks: Array<(row: number) => boolean> = [];
  for (const [column, range] of Object.entries(state.ranges)) {
    const values = bundle.numeric.get(column);
    if (!values) continue;
    const min = range.min;
    const max = range.max;
    rangeChecks.push((row) => {
      const value = values[row] ?? NaN;
      if (Number.isNaN(value)) return false;
      if (min !== undefined && value < min) return false;
      if (max !== undefined && value > max) return false;
      return true;
    });
  }
  for (const [column, include] of Object.entries(state.categories)) {
    if (include === null) continue;
    const values = bundle.text.get(column);
    if (!values) continue;
    const allowed = new Set(include);
    rangeChecks.push((row) => allowed.has(values[row] ?? ""));
  }
  for (const brush of Object.values(state.brushes)) {
    if (!brush) continue;
    const xs = bundle.numeric.get(brush.x);
    const ys = bundle.numeric.get(brush.y);
    if (!xs || !ys) continue;
    const rect = brush.rect;
    rangeChecks.push((row) => insideRect(xs[row] ?? NaN, ys[row] ?? NaN, rect));
  }

  const visible: number[] = [];
  for (let row = 0; row < bundle.rowCount; row++) {
    let keep = true;
    for (const check of rangeChecks) {
      if (!check(row)) {
        keep = false;
        break;
      }
    }
    if (keep) visible.push(row);
  }
  return visible;
}

export function countVisible(bundle: ResultBundle, state: FilterState): number {
  return visibleIndices(bundle, state).length;
}

/**
 * Integer percent widths for a 100%-stacked contribution bar.
 *
 * Contribution vectors arrive normalized to sum 1; widths use the
 * largest-remainder rounding so the rendered segments always total
 * exactly 100 percentage points.
 */

export function barWidths(contributions: number[]): number[] {
  const total = contributions.reduce((acc, c) => acc + c, 0);
  if (total <= 0) {
    return contributions.map(() => 0);
  }
  const exact = contributions.map((c) => (100 * c) / total);
  const floors = exact.map(Math.floor);
  let remaining = 100 - floors.reduce((acc, w) => acc + w, 0);
  const order = exact
    .map((value, index) => ({ index, fraction: value - Math.floor(value) }))
    .sort((a, b) => b.fraction - a.fraction || a.index - b.index);
  const widths = [...floors];
  for (const { index } of order) {
    if (remaining <= 0) {
      break;
    }
    widths[index] = (widths[index] ?? 0) + 1;
    remaining -= 1;
  }
  return widths;
}

export function widthsTotal(widths: number[]): number {
  return widths.reduce((acc, w) => acc + w, 0);
}

/** Client-side rating validation; out-of-range input never reaches the API. */

export function parseRating(raw: string | number): number | null {
  let value: number;
  if (typeof raw === 'number') {
    value = raw;
  } else {
    const text = raw.trim();
    if (text === '') {
      return null; // Number('') would coerce to 0
    }
    value = Number(text);
  }
  if (!Number.isFinite(value)) {
    return null;
  }
  if (value < 0 || value > 1) {
    return null;
  }
  return value;
}

import type { DocIndicator, SessionResponse } from "./types";

/** Compact numeric text: 6 significant digits, no trailing zeros. */
export function fmtNumber(value: number): string {
  return String(Number(value.toPrecision(6)));
}

export function fmtValue(value: number | null | undefined): string {
  return value == null ? "" : fmtNumber(value);
}

export const TREND = { up: "▲", flat: "▬", down: "▼" } as const;

/** Trend glyph for an indicator. Declared development wins; `derived`
 *  compares the current value against the declared comparative. The UI
 *  does no arithmetic beyond this comparison of two API-provided numbers. */
export function trendGlyph(
  indicator: DocIndicator,
  value: number | null | undefined,
): string {
  const dev = indicator.development;
  if (!dev) return "";
  if (dev === "up") return TREND.up;
  if (dev === "down") return TREND.down;
  if (dev === "constant") return TREND.flat;
  if (dev === "derived" && indicator.comparative && value != null) {
    const base = indicator.comparative.value;
    const band = 1e-9 * Math.max(1, Math.abs(base));
    if (Math.abs(value - base) <= band) return TREND.flat;
    return value > base ? TREND.up : TREND.down;
  }
  return "";
}

/** "n/a (reason)" text for a node the engine could not compute. */
export function naText(session: SessionResponse, id: string): string | null {
  const nc = session.valuation.not_computed[id];
  return nc ? `n/a (${nc.reason})` : null;
}

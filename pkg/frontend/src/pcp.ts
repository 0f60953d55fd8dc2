import type { PcpPayload } from "./types";

/** One parallel-coordinates axis, already ordered by the service. */
export interface PcpAxis {
  column: number;
  name: string;
  ratio: number | null;
  /** Display string, "name (0.42)" style; dash when undefined. */
  annotation: string;
  /** Part of the proposed tile (service's included set). */
  marked: boolean;
}

export function formatRatio(ratio: number | null): string {
  return ratio === null ? "(-)" : `(${ratio.toFixed(2)})`;
}

/**
 * Axis models straight from the payload: the service ordered the
 * attributes by sigma-ratio and decided the marked set; the client
 * only formats.
 */
export function pcpAxes(payload: PcpPayload): PcpAxis[] {
  const included = new Set(payload.included);
  return payload.order.map((column, k) => ({
    column,
    name: payload.names[k],
    ratio: payload.ratios[k],
    annotation: `${payload.names[k]} ${formatRatio(payload.ratios[k])}`,
    marked: included.has(column),
  }));
}

/** Polyline for one displayed row, in axis order. */
export function polyline(payload: PcpPayload, rowIndex: number): number[] {
  return payload.values[rowIndex];
}

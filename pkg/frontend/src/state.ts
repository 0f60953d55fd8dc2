import type { SuggestPayload, PcpPayload, ViewPayload } from "./types";

export type DisplayMode = "data" | "sample1" | "sample2";

export interface TileLedgerEntry {
  label: string;
  nRows: number;
  nCols: number;
}

export interface HypothesisEditorState {
  /** Row filter: everything, one factor level, or an explicit id list. */
  predicate:
    | { kind: "all" }
    | { kind: "factor"; factor: string; level: string }
    | { kind: "manual"; rows: number[] };
  /** Column partition blocks; empty means the unguided singleton partition. */
  partition: number[][];
}

/** Everything the client holds between renders. Coordinates, labels,
 * gains, ratios, and markers all come verbatim from service payloads. */
export interface ClientViewState {
  sessionId: string | null;
  datasetId: string | null;
  version: number;
  coords: [number, number][];
  rowIds: number[];
  axisLabels: string[][];
  gains: number[];
  directions: number[][];
  displayMode: DisplayMode;
  selection: number[];
  tau: number;
  suggestion: SuggestPayload | null;
  pcp: PcpPayload | null;
  ledger: TileLedgerEntry[];
  hypothesis: HypothesisEditorState;
  conflict: boolean;
}

export function initialState(): ClientViewState {
  return {
    sessionId: null,
    datasetId: null,
    version: -1,
    coords: [],
    rowIds: [],
    axisLabels: [],
    gains: [],
    directions: [],
    displayMode: "data",
    selection: [],
    tau: 0.5,
    suggestion: null,
    pcp: null,
    ledger: [],
    hypothesis: { predicate: { kind: "all" }, partition: [] },
    conflict: false,
  };
}

export function applyView(state: ClientViewState, view: ViewPayload): void {
  state.version = view.version;
  state.coords = view.coords;
  state.rowIds = view.row_ids;
  state.axisLabels = view.axis_labels;
  state.gains = view.gains;
  state.directions = view.directions;
  state.displayMode = "data";
  // the selection only survives if every selected row is still displayed
  const visible = new Set(state.rowIds);
  if (!state.selection.every((r) => visible.has(r))) {
    state.selection = [];
    state.suggestion = null;
    state.pcp = null;
  }
}

export function setSelection(state: ClientViewState, rows: number[]): void {
  const visible = new Set(state.rowIds);
  state.selection = rows.filter((r) => visible.has(r));
  if (state.selection.length === 0) {
    state.suggestion = null;
    state.pcp = null;
  }
}

/** The tile proposed by the current suggestion: selected rows plus the
 * service's included attributes. Null when either side is empty. */
export function proposedTile(
  state: ClientViewState
): { rows: number[]; cols: number[] } | null {
  if (!state.suggestion || state.selection.length === 0) return null;
  if (state.suggestion.included.length === 0) return null;
  return { rows: state.selection, cols: state.suggestion.included };
}

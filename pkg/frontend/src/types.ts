/** Wire types for the analysis service. Every number shown in the UI
 * originates from one of these payloads. */

export interface DatasetSummary {
  id: string;
  n: number;
  m: number;
  column_names: string[];
  column_groups: Record<string, number[]>;
  scaling_state: string;
  factors: Record<string, string[]>;
}

export interface ViewPayload {
  version: number;
  directions: number[][];
  gains: number[];
  coords: [number, number][];
  row_ids: number[];
  axis_labels: string[][];
}

export interface SuggestPayload {
  tau: number;
  ratios: (number | null)[];
  included: number[];
  included_names: string[];
  order: number[];
}

export interface PcpPayload {
  order: number[];
  names: string[];
  ratios: (number | null)[];
  included: number[];
  tau: number;
  values: number[][];
}

export interface SamplePayload {
  which: number;
  seed: number;
  coords: [number, number][];
  row_ids: number[];
  version: number;
}

export interface SessionInfo {
  id: string;
  version: number;
  dataset_id: string;
  tiles: { label: string; n_rows: number; n_cols: number }[];
  hypothesis: { rows: number[]; partition: number[][] };
}

export interface SessionSnapshot {
  dataset_ref: string;
  seed: number;
  version: number;
  tiles: { rows: number[]; cols: number[]; label: string }[];
  hypothesis: { rows: number[]; partition: number[][] };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

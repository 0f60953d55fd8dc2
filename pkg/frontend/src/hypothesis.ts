import type { DatasetSummary } from "./types";
import type { HypothesisEditorState } from "./state";

/** Resolve the editor's row predicate to row ids. Factor predicates
 * need the dataset's factor columns (label per row). */
export function resolveRows(
  state: HypothesisEditorState,
  n: number,
  factorLabels?: string[]
): number[] {
  const p = state.predicate;
  if (p.kind === "all") return Array.from({ length: n }, (_, i) => i);
  if (p.kind === "manual") return [...p.rows].sort((a, b) => a - b);
  if (!factorLabels) throw new Error(`factor column ${p.factor} not loaded`);
  const rows: number[] = [];
  factorLabels.forEach((label, i) => {
    if (label === p.level) rows.push(i);
  });
  return rows;
}

/** Partition blocks for the request body. An empty editor partition
 * means the unguided singleton partition over all columns. */
export function resolvePartition(
  state: HypothesisEditorState,
  m: number
): number[][] {
  if (state.partition.length === 0) {
    return Array.from({ length: m }, (_, j) => [j]);
  }
  return state.partition.map((block) => [...block].sort((a, b) => a - b));
}

/** Named column groups of the dataset as preset partition blocks, so a
 * grouped-attributes hypothesis is one click. */
export function groupPartition(summary: DatasetSummary, groups: string[]): number[][] {
  return groups.map((g) => {
    const block = summary.column_groups[g];
    if (!block) throw new Error(`no column group named ${g}`);
    return [...block];
  });
}

import { describe, expect, it } from "vitest";

import { applyView, initialState, proposedTile, setSelection } from "../src/state";
import { pcpAxes, formatRatio } from "../src/pcp";
import { resolvePartition, resolveRows } from "../src/hypothesis";
import type { PcpPayload, ViewPayload } from "../src/types";

const view: ViewPayload = {
  version: 3,
  directions: [
    [1, 0, 0],
    [0, 1, 0],
  ],
  gains: [2.5, 1.1],
  coords: [
    [0, 0],
    [1, 1],
    [2, 2],
  ],
  row_ids: [0, 1, 2],
  axis_labels: [
    ["a", "b", "c"],
    ["b", "a", "c"],
  ],
};

describe("view state", () => {
  it("applyView keeps a still-visible selection", () => {
    const s = initialState();
    applyView(s, view);
    setSelection(s, [1, 2]);
    applyView(s, { ...view, version: 4 });
    expect(s.selection).toEqual([1, 2]);
    expect(s.version).toBe(4);
  });

  it("applyView drops a selection that left the display", () => {
    const s = initialState();
    applyView(s, view);
    setSelection(s, [1, 2]);
    applyView(s, { ...view, version: 5, row_ids: [0, 1, 7] });
    expect(s.selection).toEqual([]);
    expect(s.suggestion).toBeNull();
  });

  it("selection is clamped to displayed rows", () => {
    const s = initialState();
    applyView(s, view);
    setSelection(s, [2, 99]);
    expect(s.selection).toEqual([2]);
  });

  it("empty selection clears the suggestion panel", () => {
    const s = initialState();
    applyView(s, view);
    s.suggestion = {
      tau: 0.5,
      ratios: [0.1, 0.9, null],
      included: [0],
      included_names: ["a"],
      order: [0, 1, 2],
    };
    setSelection(s, []);
    expect(s.suggestion).toBeNull();
  });

  it("proposedTile combines selection rows with suggested columns", () => {
    const s = initialState();
    applyView(s, view);
    setSelection(s, [0, 1]);
    s.suggestion = {
      tau: 0.5,
      ratios: [0.1, 0.2, 0.9],
      included: [0, 1],
      included_names: ["a", "b"],
      order: [0, 1, 2],
    };
    expect(proposedTile(s)).toEqual({ rows: [0, 1], cols: [0, 1] });
    s.suggestion.included = [];
    expect(proposedTile(s)).toBeNull();
  });
});

describe("pcp axes", () => {
  const payload: PcpPayload = {
    order: [2, 0, 1],
    names: ["c", "a", "b"],
    ratios: [0.12, 0.55, null],
    included: [2],
    tau: 0.5,
    values: [
      [1, 2, 3],
      [4, 5, 6],
    ],
  };

  it("keeps the service ordering and marks the service's included set", () => {
    const axes = pcpAxes(payload);
    expect(axes.map((a) => a.column)).toEqual([2, 0, 1]);
    expect(axes.map((a) => a.marked)).toEqual([true, false, false]);
    expect(axes[0].annotation).toBe("c (0.12)");
    expect(axes[2].annotation).toBe("b (-)");
  });

  it("formats undefined ratios with a dash", () => {
    expect(formatRatio(null)).toBe("(-)");
    expect(formatRatio(0.425)).toBe("(0.42)");
  });

  it("marked set grows monotonically with tau (service decides)", () => {
    // simulate the service answering a rising tau sweep
    const ratios = [0.1, 0.4, 0.7, 1.0];
    let prev = new Set<number>();
    for (const tau of [0.2, 0.5, 0.8, 1.2]) {
      const included = ratios
        .map((r, j) => [r, j] as const)
        .filter(([r]) => r < tau)
        .map(([, j]) => j);
      const axes = pcpAxes({
        order: [0, 1, 2, 3],
        names: ["a", "b", "c", "d"],
        ratios,
        included,
        tau,
        values: [[0, 0, 0, 0]],
      });
      const marked = new Set(axes.filter((a) => a.marked).map((a) => a.column));
      for (const j of prev) expect(marked.has(j)).toBe(true);
      prev = marked;
    }
  });
});

describe("hypothesis editor", () => {
  it("resolves the all-rows predicate", () => {
    expect(resolveRows({ predicate: { kind: "all" }, partition: [] }, 4)).toEqual([
      0, 1, 2, 3,
    ]);
  });

  it("resolves factor predicates against the label column", () => {
    const labels = ["rural", "urban", "rural", "urban"];
    expect(
      resolveRows(
        { predicate: { kind: "factor", factor: "Type", level: "rural" }, partition: [] },
        4,
        labels
      )
    ).toEqual([0, 2]);
  });

  it("sorts manual row lists", () => {
    expect(
      resolveRows({ predicate: { kind: "manual", rows: [5, 1, 3] }, partition: [] }, 10)
    ).toEqual([1, 3, 5]);
  });

  it("empty partition expands to singleton blocks", () => {
    expect(resolvePartition({ predicate: { kind: "all" }, partition: [] }, 3)).toEqual([
      [0],
      [1],
      [2],
    ]);
    expect(
      resolvePartition({ predicate: { kind: "all" }, partition: [[2, 0], [1]] }, 3)
    ).toEqual([[0, 2], [1]]);
  });
});

import * as d3 from "d3";
import { pcpAxes } from "../pcp";
import type { ClientViewState } from "../state";
import { SELECTED_COLOR } from "./scatter";

const MARK_COLOR = "#7b3294";

export interface PcpHandle {
  update(state: ClientViewState): void;
}

/** Parallel coordinates of the selection's context: axes ordered by
 * the service's sigma-ratios, ratio shown after each name, proposed
 * tile attributes marked. */
export function mountPcp(
  svgEl: SVGSVGElement,
  width: number,
  height: number
): PcpHandle {
  const margin = { top: 64, right: 20, bottom: 12, left: 20 };
  const svg = d3.select(svgEl).attr("width", width).attr("height", height);
  const plot = svg.append("g").attr("transform", `translate(${margin.left},${margin.top})`);
  const lineLayer = plot.append("g").attr("class", "lines");
  const axisLayer = plot.append("g").attr("class", "axes");

  return {
    update(state: ClientViewState): void {
      if (!state.pcp) {
        lineLayer.selectAll("*").remove();
        axisLayer.selectAll("*").remove();
        return;
      }
      const payload = state.pcp;
      const axes = pcpAxes(payload);
      const innerW = width - margin.left - margin.right;
      const innerH = height - margin.top - margin.bottom;
      const x = d3.scalePoint<number>()
        .domain(d3.range(axes.length))
        .range([0, innerW]);
      const flat = payload.values.flat();
      const y = d3.scaleLinear()
        .domain([d3.min(flat) ?? -1, d3.max(flat) ?? 1])
        .range([innerH, 0]);

      const selected = new Set(state.selection);
      lineLayer
        .selectAll<SVGPathElement, number[]>("path")
        .data(payload.values)
        .join("path")
        .attr("fill", "none")
        .attr("stroke", (_row, i) => (selected.has(i) ? SELECTED_COLOR : "#999"))
        .attr("stroke-opacity", (_row, i) => (selected.has(i) ? 0.85 : 0.15))
        .attr("d", (row) =>
          row.map((v, k) => `${k === 0 ? "M" : "L"}${x(k)},${y(v)}`).join("")
        );

      const axisSel = axisLayer
        .selectAll<SVGGElement, unknown>("g.axis")
        .data(axes, (a: unknown) => String((a as { column: number }).column));
      const entered = axisSel.join((enter) => {
        const g = enter.append("g").attr("class", "axis");
        g.append("line");
        g.append("text");
        return g;
      });
      entered
        .attr("transform", (_a, k) => `translate(${x(k)},0)`)
        .select("line")
        .attr("y1", 0)
        .attr("y2", innerH)
        .attr("stroke", (a) => (a.marked ? MARK_COLOR : "#bbb"))
        .attr("stroke-width", (a) => (a.marked ? 2.5 : 1));
      entered
        .select("text")
        .attr("class", "axis-label")
        .attr("transform", "rotate(-55)")
        .attr("y", -6)
        .attr("text-anchor", "start")
        .attr("font-size", 10)
        .attr("fill", (a) => (a.marked ? MARK_COLOR : "#444"))
        .text((a) => a.annotation);
    },
  };
}

import * as d3 from "d3";
import type { ClientViewState } from "../state";
import type { Point, Rect } from "../selection";

// selection highlight colors: committed knowledge in purple, the
// current selection in orange
export const SELECTED_COLOR = "#e08214";
export const BASE_COLOR = "#2d2d2d";

export interface ScatterCallbacks {
  onRectangle(rect: Rect): void;
  onLasso(polygon: Point[]): void;
}

export interface ScatterHandle {
  update(state: ClientViewState): void;
}

function axisCaption(labels: string[][], axis: 0 | 1, gains: number[]): string {
  if (!labels[axis]) return "";
  const g = gains[axis] !== undefined ? ` [gain ${gains[axis].toFixed(2)}]` : "";
  return labels[axis].join(", ") + g;
}

/** Scatterplot with a drag rectangle; Shift-drag draws a lasso. */
export function mountScatter(
  svgEl: SVGSVGElement,
  width: number,
  height: number,
  callbacks: ScatterCallbacks
): ScatterHandle {
  const margin = { top: 12, right: 12, bottom: 42, left: 48 };
  const svg = d3.select(svgEl).attr("width", width).attr("height", height);
  const plot = svg.append("g").attr("transform", `translate(${margin.left},${margin.top})`);
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;

  const xScale = d3.scaleLinear().range([0, innerW]);
  const yScale = d3.scaleLinear().range([innerH, 0]);
  const pointLayer = plot.append("g").attr("class", "points");
  const overlay = plot.append("rect")
    .attr("class", "overlay")
    .attr("width", innerW)
    .attr("height", innerH)
    .attr("fill", "transparent");
  const rubber = plot.append("rect")
    .attr("class", "rubber")
    .attr("fill", "rgba(224,130,20,0.15)")
    .attr("stroke", SELECTED_COLOR)
    .attr("visibility", "hidden");
  const lassoPath = plot.append("path")
    .attr("class", "lasso")
    .attr("fill", "rgba(224,130,20,0.1)")
    .attr("stroke", SELECTED_COLOR)
    .attr("visibility", "hidden");
  const xCaption = svg.append("text")
    .attr("class", "x-caption")
    .attr("x", margin.left + innerW / 2)
    .attr("y", height - 8)
    .attr("text-anchor", "middle")
    .attr("font-size", 11);
  const yCaption = svg.append("text")
    .attr("class", "y-caption")
    .attr("transform", `translate(12,${margin.top + innerH / 2}) rotate(-90)`)
    .attr("text-anchor", "middle")
    .attr("font-size", 11);

  let dragStart: Point | null = null;
  let lasso: Point[] = [];
  let lassoMode = false;

  function toData(ev: MouseEvent): Point {
    const [px, py] = d3.pointer(ev, plot.node());
    return { x: xScale.invert(px), y: yScale.invert(py) };
  }

  overlay
    .on("mousedown", (ev: MouseEvent) => {
      lassoMode = ev.shiftKey;
      dragStart = toData(ev);
      lasso = [dragStart];
    })
    .on("mousemove", (ev: MouseEvent) => {
      if (!dragStart) return;
      const p = toData(ev);
      if (lassoMode) {
        lasso.push(p);
        lassoPath
          .attr("visibility", "visible")
          .attr("d", "M" + lasso.map((q) => `${xScale(q.x)},${yScale(q.y)}`).join("L"));
      } else {
        rubber
          .attr("visibility", "visible")
          .attr("x", Math.min(xScale(dragStart.x), xScale(p.x)))
          .attr("y", Math.min(yScale(dragStart.y), yScale(p.y)))
          .attr("width", Math.abs(xScale(p.x) - xScale(dragStart.x)))
          .attr("height", Math.abs(yScale(p.y) - yScale(dragStart.y)));
      }
    })
    .on("mouseup", (ev: MouseEvent) => {
      if (!dragStart) return;
      const end = toData(ev);
      rubber.attr("visibility", "hidden");
      lassoPath.attr("visibility", "hidden");
      if (lassoMode) {
        callbacks.onLasso(lasso);
      } else {
        callbacks.onRectangle({ x0: dragStart.x, y0: dragStart.y, x1: end.x, y1: end.y });
      }
      dragStart = null;
      lasso = [];
    });

  return {
    update(state: ClientViewState): void {
      const coords = state.coords;
      xScale.domain(d3.extent(coords, (c) => c[0]) as [number, number]).nice();
      yScale.domain(d3.extent(coords, (c) => c[1]) as [number, number]).nice();
      const selected = new Set(state.selection);
      pointLayer
        .selectAll<SVGCircleElement, [number, number]>("circle")
        .data(coords)
        .join("circle")
        .attr("r", 2.5)
        .attr("cx", (c) => xScale(c[0]))
        .attr("cy", (c) => yScale(c[1]))
        .attr("fill", (_c, i) =>
          selected.has(state.rowIds[i]) ? SELECTED_COLOR : BASE_COLOR
        )
        .attr("fill-opacity", 0.65);
      xCaption.text(axisCaption(state.axisLabels, 0, state.gains));
      yCaption.text(axisCaption(state.axisLabels, 1, state.gains));
    },
  };
}

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { AppController } from "../src/controller";
import type { FetchLike } from "../src/api";

/**
 * Intercepts the whole API layer with canned payloads and checks that
 * every statistic the client would display (ratios, gains, markers,
 * coordinates) is byte-identical to what the service answered: the UI
 * computes nothing beyond display ordering.
 */

const cannedView = {
  version: 0,
  directions: [
    [0.6, 0.8],
    [0.8, -0.6],
  ],
  gains: [3.14159265358979, 1.2345678901234567],
  coords: [
    [0.123456789012345, -4],
    [1, 2],
    [3, 1],
    [2.5, 2.5],
  ],
  row_ids: [0, 1, 2, 3],
  axis_labels: [
    ["a", "b"],
    ["b", "a"],
  ],
};

const cannedSuggest = {
  tau: 0.5,
  ratios: [0.4211111111111111, 0.97],
  included: [0],
  included_names: ["a"],
  order: [0, 1],
};

const cannedPcp = {
  order: [0, 1],
  names: ["a", "b"],
  ratios: [0.4211111111111111, 0.97],
  included: [0],
  tau: 0.5,
  values: [
    [0.1, 0.2],
    [0.3, 0.4],
    [0.5, 0.6],
    [0.7, 0.8],
  ],
};

function fakeService(): { fetchFn: FetchLike; calls: string[] } {
  const calls: string[] = [];
  const respond = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  const fetchFn: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    calls.push(`${method} ${input}`);
    if (input.endsWith("/datasets") && method === "POST")
      return respond({ id: "d1", n: 4, m: 2, column_names: ["a", "b"], column_groups: {}, scaling_state: "zscored", factors: {} }, 201);
    if (input.endsWith("/sessions") && method === "POST")
      return respond({ id: "s1", version: 0, n: 4, m: 2 }, 201);
    if (input.endsWith("/sessions/s1")) {
      return respond({ id: "s1", version: 0, dataset_id: "d1", tiles: [], hypothesis: { rows: [], partition: [] } });
    }
    if (input.endsWith("/sessions/s1/view")) return respond(cannedView);
    if (input.endsWith("/sessions/s1/suggest")) return respond(cannedSuggest);
    if (input.includes("/sessions/s1/pcp")) return respond(cannedPcp);
    throw new Error(`unexpected request: ${method} ${input}`);
  };
  return { fetchFn, calls };
}

describe("single source of truth", () => {
  it("shows exactly the service's numbers, nothing recomputed", async () => {
    const { fetchFn, calls } = fakeService();
    const controller = new AppController(new ApiClient("http://svc", fetchFn));
    await controller.startFromCsv("a,b\n1,2\n3,4\n", 7);

    expect(controller.state.gains).toEqual(cannedView.gains);
    expect(controller.state.coords).toEqual(cannedView.coords);
    expect(controller.state.axisLabels).toEqual(cannedView.axis_labels);

    await controller.selectRectangle({ x0: -10, y0: -10, x1: 10, y1: 10 });
    expect(controller.state.selection).toEqual([0, 1, 2, 3]);
    expect(controller.state.suggestion).toEqual(cannedSuggest);
    expect(controller.state.pcp).toEqual(cannedPcp);

    // client-side marking is a lookup into the service's included set
    const { pcpAxes } = await import("../src/pcp");
    const axes = pcpAxes(controller.state.pcp!);
    expect(axes.map((a) => a.marked)).toEqual(
      cannedPcp.order.map((c) => cannedPcp.included.includes(c))
    );
    expect(axes[0].annotation).toBe("a (0.42)");

    // the only requests made were to the service; no other source of numbers
    expect(calls.some((c) => c.includes("/view"))).toBe(true);
    expect(calls.some((c) => c.includes("/suggest"))).toBe(true);
  });

  it("clears the suggestion panel on an empty gesture", async () => {
    const { fetchFn } = fakeService();
    const controller = new AppController(new ApiClient("http://svc", fetchFn));
    await controller.startFromCsv("a,b\n1,2\n3,4\n", 7);
    await controller.selectRectangle({ x0: -10, y0: -10, x1: 10, y1: 10 });
    expect(controller.state.suggestion).not.toBeNull();
    await controller.selectLasso([]);
    expect(controller.state.selection).toEqual([]);
    expect(controller.state.suggestion).toBeNull();
    expect(controller.state.pcp).toBeNull();
  });
});

import { ApiClient } from "./api";
import { AppController } from "./controller";
import { mountPcp } from "./render/pcp";
import { mountScatter } from "./render/scatter";
import { groupPartition } from "./hypothesis";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const api = new ApiClient("");
const controller = new AppController(api);

const scatter = mountScatter(
  el<HTMLElement>("scatter").querySelector("svg") as unknown as SVGSVGElement,
  640,
  480,
  {
    onRectangle: (rect) => void controller.selectRectangle(rect),
    onLasso: (polygon) => void controller.selectLasso(polygon),
  }
);
const pcp = mountPcp(
  el<HTMLElement>("pcp").querySelector("svg") as unknown as SVGSVGElement,
  900,
  360
);

controller.onChange((state) => {
  scatter.update(state);
  pcp.update(state);
  el("version").textContent = `v${state.version}`;
  el("selection-size").textContent = String(state.selection.length);
  el("conflict").style.display = state.conflict ? "block" : "none";
  const ledger = el("ledger");
  ledger.innerHTML = "";
  state.ledger.forEach((entry) => {
    const li = document.createElement("li");
    li.textContent = `${entry.label || "(unnamed)"} - ${entry.nRows} rows x ${entry.nCols} cols`;
    ledger.appendChild(li);
  });
  const commit = el<HTMLButtonElement>("commit");
  commit.disabled = !state.suggestion || state.suggestion.included.length === 0;
});

el<HTMLInputElement>("csv-file").addEventListener("change", async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  await controller.startFromCsv(await file.text(), 7);
});

const tauSlider = el<HTMLInputElement>("tau");
tauSlider.addEventListener("input", () => {
  el("tau-value").textContent = tauSlider.value;
  void controller.setTau(Number(tauSlider.value));
});

el<HTMLButtonElement>("commit").addEventListener("click", () => {
  const label = el<HTMLInputElement>("tile-label").value;
  void controller.commitAndRefresh(label);
});
el<HTMLButtonElement>("rollback").addEventListener("click", () => {
  void controller.rollbackLastTile();
});
el("conflict-reload").addEventListener("click", () => void controller.refreshView());

for (const mode of ["data", "sample1", "sample2"] as const) {
  el<HTMLButtonElement>(`show-${mode}`).addEventListener("click", () => {
    void controller.setDisplayMode(mode);
  });
}

el<HTMLButtonElement>("apply-hypothesis").addEventListener("click", async () => {
  const factor = el<HTMLInputElement>("hyp-factor").value.trim();
  const level = el<HTMLInputElement>("hyp-level").value.trim();
  const groupsRaw = el<HTMLInputElement>("hyp-groups").value.trim();
  const predicate = factor && level
    ? ({ kind: "factor", factor, level } as const)
    : ({ kind: "all" } as const);
  let partition: number[][] = [];
  if (groupsRaw && controller.state.datasetId) {
    const summary = await api.getDataset(controller.state.datasetId);
    partition = groupPartition(summary, groupsRaw.split(",").map((g) => g.trim()));
  }
  void controller.applyHypothesis({ predicate, partition });
});

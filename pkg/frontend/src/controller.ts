import { ApiClient, VersionConflictError } from "./api";
import {
  applyView,
  ClientViewState,
  DisplayMode,
  initialState,
  proposedTile,
  setSelection,
} from "./state";
import { lassoSelect, Point, Rect, rectangleSelect } from "./selection";
import type { HypothesisEditorState } from "./state";
import { resolvePartition, resolveRows } from "./hypothesis";

/**
 * The exploration loop: look at the view, select a pattern, inspect
 * the suggested attributes, commit what you now know, repeat. All
 * state transitions run through here; renderers subscribe.
 */
export class AppController {
  readonly state: ClientViewState = initialState();
  private listeners: ((s: ClientViewState) => void)[] = [];
  private n = 0;
  private m = 0;
  private factorCache: Record<string, string[]> = {};

  constructor(private readonly api: ApiClient, private readonly sampleSeed = 11) {}

  onChange(fn: (s: ClientViewState) => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  /** Upload a CSV, open a session on it, fetch the first view. */
  async startFromCsv(csv: string, seed: number): Promise<void> {
    const summary = await this.api.uploadDataset(csv);
    await this.startFromDataset(summary.id, seed);
  }

  async startFromDataset(datasetId: string, seed: number): Promise<void> {
    const created = await this.api.createSession(datasetId, seed);
    this.state.datasetId = datasetId;
    this.state.sessionId = created.id;
    this.n = created.n;
    this.m = created.m;
    await this.refreshView();
  }

  private sessionId(): string {
    if (!this.state.sessionId) throw new Error("no active session");
    return this.state.sessionId;
  }

  async refreshView(): Promise<void> {
    const view = await this.api.getView(this.sessionId());
    applyView(this.state, view);
    await this.syncLedger();
    this.state.conflict = false;
    this.notify();
  }

  /** Mirror the server-side tile ledger at the version we hold. */
  private async syncLedger(): Promise<void> {
    const info = await this.api.getSession(this.sessionId());
    this.state.ledger = info.tiles.map((t) => ({
      label: t.label,
      nRows: t.n_rows,
      nCols: t.n_cols,
    }));
  }

  /** Rectangle gesture -> selection -> suggestion + pcp refresh. */
  async selectRectangle(rect: Rect): Promise<void> {
    const rows = rectangleSelect(this.state.coords, this.state.rowIds, rect);
    await this.applySelection(rows);
  }

  /** Lasso gesture -> selection -> suggestion + pcp refresh. */
  async selectLasso(polygon: Point[]): Promise<void> {
    const rows = lassoSelect(this.state.coords, this.state.rowIds, polygon);
    await this.applySelection(rows);
  }

  private async applySelection(rows: number[]): Promise<void> {
    setSelection(this.state, rows);
    if (this.state.selection.length >= 2) {
      const id = this.sessionId();
      this.state.suggestion = await this.api.suggest(
        id,
        this.state.selection,
        this.state.tau
      );
      this.state.pcp = await this.api.getPcp(id, this.state.selection, this.state.tau);
    }
    this.notify();
  }

  /** Re-query the suggestion at a new threshold (the marked set is
   * always the service's, never recomputed locally). */
  async setTau(tau: number): Promise<void> {
    this.state.tau = tau;
    if (this.state.selection.length >= 2) {
      const id = this.sessionId();
      this.state.suggestion = await this.api.suggest(id, this.state.selection, tau);
      this.state.pcp = await this.api.getPcp(id, this.state.selection, tau);
    }
    this.notify();
  }

  /**
   * Commit the proposed tile at the held version, then fetch the next
   * view. A stale version surfaces as a conflict flag and a reload;
   * the tile is not retried automatically.
   */
  async commitAndRefresh(label: string): Promise<boolean> {
    const tile = proposedTile(this.state);
    if (!tile) throw new Error("nothing to commit: empty selection or suggestion");
    try {
      await this.api.commitTile(
        this.sessionId(),
        tile.rows,
        tile.cols,
        label,
        this.state.version
      );
    } catch (err) {
      if (err instanceof VersionConflictError) {
        this.state.conflict = true;
        this.notify();
        await this.refreshView();
        return false;
      }
      throw err;
    }
    await this.refreshView();
    return true;
  }

  async rollbackLastTile(): Promise<void> {
    await this.api.deleteLastTile(this.sessionId(), this.state.version);
    await this.refreshView();
  }

  /** Swap the displayed points between the data and one sample from
   * either constrained distribution; directions stay fixed. */
  async setDisplayMode(mode: DisplayMode): Promise<void> {
    if (mode === "data") {
      await this.refreshView();
      return;
    }
    const which = mode === "sample1" ? 1 : 2;
    const sample = await this.api.getSample(this.sessionId(), which, this.sampleSeed);
    this.state.coords = sample.coords;
    this.state.rowIds = sample.row_ids;
    this.state.displayMode = mode;
    this.notify();
  }

  async applyHypothesis(editor: HypothesisEditorState): Promise<void> {
    const id = this.sessionId();
    let factorLabels: string[] | undefined;
    if (editor.predicate.kind === "factor") {
      factorLabels = await this.factorColumn(editor.predicate.factor);
    }
    const rows = resolveRows(editor, this.n, factorLabels);
    const partition = resolvePartition(editor, this.m);
    await this.api.putHypothesis(id, rows, partition, this.state.version);
    this.state.hypothesis = editor;
    await this.refreshView();
  }

  private async factorColumn(name: string): Promise<string[]> {
    if (!(name in this.factorCache)) {
      if (!this.state.datasetId) throw new Error("no dataset");
      const resp = await this.api.getFactor(this.state.datasetId, name);
      this.factorCache[name] = resp.labels;
    }
    return this.factorCache[name];
  }
}

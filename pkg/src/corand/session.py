"""Exploration sessions: dataset + accumulated background tiles +
current hypothesis, with cached views.

A session is the engine-side state of the interactive loop: the client
looks at a view, selects points, commits a tile (what it now knows),
possibly narrows the hypothesis, and asks for the next view. Any
mutation invalidates the cached view and bumps the state version so a
stale client cannot commit against a view it is no longer seeing.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass

import numpy as np

from corand.covariance import analytical_covariance
from corand.dataset import Dataset, center
from corand.hypothesis import HypothesisPair, HypothesisSpec, assemble
from corand.projection import ViewResult, optimal_directions, project
from corand.sampler import SeededRng, apply_to_matrix, sample_permutation
from corand.selection import AttributeSuggestion, suggest_attributes
from corand.tiling import Tile


@dataclass(frozen=True, eq=False)
class LabeledTile:
    tile: Tile
    label: str


@dataclass(eq=False)
class CachedView:
    view: ViewResult
    pair: HypothesisPair
    version: int


class Session:
    def __init__(self, dataset: Dataset, seed: int, session_id: str | None = None):
        if dataset.n_cols < 2:
            raise ValueError(
                "a session needs at least 2 columns; a contrastive 2-D view "
                "of a single attribute is meaningless"
            )
        self.id = session_id or uuid.uuid4().hex
        self.dataset = dataset
        self.rng_seed = int(seed)
        self.user_tiles: list[LabeledTile] = []
        self.current_spec = HypothesisSpec.unguided(dataset.n_rows, dataset.n_cols)
        self.version = 0
        self.view_computations = 0
        self._cache: CachedView | None = None

    # -- mutations (single writer; each bumps the version) ------------------

    def commit_tile(self, rows, cols, label: str = "") -> None:
        tile = Tile(rows, cols)
        tile.check_bounds(self.dataset.n_rows, self.dataset.n_cols)
        self.user_tiles.append(LabeledTile(tile=tile, label=label))
        self._invalidate()

    def rollback_last_tile(self) -> LabeledTile:
        if not self.user_tiles:
            raise ValueError("no tile to roll back")
        dropped = self.user_tiles.pop()
        self._invalidate()
        return dropped

    def set_hypothesis(self, spec: HypothesisSpec) -> None:
        spec.columns  # validates blocks
        if spec.rows.max() >= self.dataset.n_rows:
            raise ValueError("hypothesis rows out of range")
        if spec.columns.max() >= self.dataset.n_cols:
            raise ValueError("hypothesis columns out of range")
        self.current_spec = spec
        self._invalidate()

    def _invalidate(self) -> None:
        self.version += 1
        self._cache = None

    # -- reads ---------------------------------------------------------------

    def compute_view(self) -> ViewResult:
        if self._cache is not None and self._cache.version == self.version:
            return self._cache.view
        pair = assemble(
            [lt.tile for lt in self.user_tiles],
            self.current_spec,
            self.dataset.n_rows,
            self.dataset.n_cols,
        )
        y = center(self.dataset)
        s1 = analytical_covariance(y, pair.resolved_1)
        s2 = analytical_covariance(y, pair.resolved_2)
        basis = optimal_directions(s1.values, s2.values)
        view = project(self.dataset, basis)
        self._cache = CachedView(view=view, pair=pair, version=self.version)
        self.view_computations += 1
        return view

    def current_pair(self) -> HypothesisPair:
        self.compute_view()
        assert self._cache is not None
        return self._cache.pair

    def sample_view(self, which: int, rng: SeededRng) -> np.ndarray:
        """Project one sampled dataset from the preserving (1) or
        breaking (2) distribution onto the cached directions."""
        if self._cache is None or self._cache.version != self.version:
            raise ValueError("no cached view; compute a view first")
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        pair = self._cache.pair
        tiling = pair.resolved_1 if which == 1 else pair.resolved_2
        pv = sample_permutation(tiling, rng)
        shuffled = apply_to_matrix(self.dataset.values, pv)
        return shuffled @ self._cache.view.directions.T

    def suggest(self, rows, tau: float) -> AttributeSuggestion:
        return suggest_attributes(self.dataset, rows, tau)

    def pcp_payload(self, rows, tau: float) -> dict:
        """Axis order, ratios, and polyline values for parallel coordinates.

        Values are shown z-scored per attribute so all axes share one
        scale; constant columns flatten to zero.
        """
        suggestion = self.suggest(rows, tau)
        v = self.dataset.values
        sd = v.std(axis=0)
        mu = v.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sd > 0, (v - mu) / sd, 0.0)
        order = suggestion.order
        return {
            "order": list(order),
            "names": [self.dataset.column_names[j] for j in order],
            "ratios": [
                None if not np.isfinite(suggestion.ratios[j]) else float(suggestion.ratios[j])
                for j in order
            ],
            "included": [j for j in order if j in set(suggestion.included)],
            "tau": tau,
            "values": z[:, order].tolist(),
        }

    # -- snapshot / restore ----------------------------------------------------

    def snapshot(self, dataset_ref: str = "") -> dict:
        """State as JSON-able dict; the raw data travels by reference only."""
        return {
            "dataset_ref": dataset_ref,
            "seed": self.rng_seed,
            "version": self.version,
            "tiles": [
                {
                    "rows": lt.tile.rows.tolist(),
                    "cols": lt.tile.cols.tolist(),
                    "label": lt.label,
                }
                for lt in self.user_tiles
            ],
            "hypothesis": {
                "rows": self.current_spec.rows.tolist(),
                "partition": [b.tolist() for b in self.current_spec.partition],
            },
        }

    def snapshot_json(self, dataset_ref: str = "") -> str:
        return json.dumps(self.snapshot(dataset_ref))


def create_session(dataset: Dataset, seed: int) -> Session:
    return Session(dataset, seed)


def restore_session(snapshot: dict | str, dataset: Dataset) -> Session:
    obj = json.loads(snapshot) if isinstance(snapshot, str) else snapshot
    s = Session(dataset, obj["seed"])
    for t in obj.get("tiles", []):
        s.commit_tile(t["rows"], t["cols"], t.get("label", ""))
    hyp = obj.get("hypothesis")
    if hyp is not None:
        s.set_hypothesis(
            HypothesisSpec(rows=hyp["rows"], partition=tuple(hyp["partition"]))
        )
    return s

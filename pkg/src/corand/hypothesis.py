"""Hypothesis construction: the pair of tilings whose distributions a
view contrasts.

The user picks a row set R, a column set C, and a partition of C. One
side of the pair keeps all relations inside (R, C) intact (a single
tile); the other keeps only the relations inside each partition block
(one tile per block), breaking the relations between blocks. Both sides
also carry the user's accumulated background tiles, so already-known
structure never shows up as new.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from corand.tiling import Tile, Tiling, merge_all, merge_tile, new_tiling


@dataclass(frozen=True, eq=False)
class HypothesisSpec:
    """Rows of interest plus an ordered partition of the columns of interest."""

    rows: np.ndarray
    partition: tuple[np.ndarray, ...]

    def __post_init__(self):
        rows = np.unique(np.asarray(self.rows, dtype=np.int64))
        if rows.size == 0:
            raise ValueError("hypothesis rows must be nonempty")
        blocks = tuple(np.unique(np.asarray(b, dtype=np.int64)) for b in self.partition)
        if not blocks:
            raise ValueError("partition must have at least one block")
        seen: set[int] = set()
        for b in blocks:
            if b.size == 0:
                raise ValueError("partition blocks must be nonempty")
            cols = set(b.tolist())
            if cols & seen:
                raise ValueError("partition blocks must be disjoint")
            seen |= cols
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "partition", blocks)

    @property
    def columns(self) -> np.ndarray:
        return np.unique(np.concatenate(self.partition))

    @staticmethod
    def unguided(n: int, m: int) -> "HypothesisSpec":
        """All rows, every column its own block: the generic objective
        whose first view is plain correlation PCA."""
        return HypothesisSpec(
            rows=np.arange(n), partition=tuple(np.array([j]) for j in range(m))
        )


def hypothesis_tilings(spec: HypothesisSpec) -> tuple[list[Tile], list[Tile]]:
    """The relation-preserving side (one tile over all blocks) and the
    relation-breaking side (one tile per block)."""
    h1 = [Tile(spec.rows, spec.columns)]
    h2 = [Tile(spec.rows, block) for block in spec.partition]
    return h1, h2


@dataclass(frozen=True, eq=False)
class HypothesisPair:
    user_tiles: tuple[Tile, ...]
    spec: HypothesisSpec
    resolved_1: Tiling  # background + preserving side
    resolved_2: Tiling  # background + breaking side


def assemble(user_tiles, spec: HypothesisSpec, n: int, m: int) -> HypothesisPair:
    """Merge background tiles and each hypothesis side into two tilings.

    Merging order is background first, hypothesis tiles after; merging
    is order-insensitive in semantics, so this is presentation only.
    """
    user_tiles = tuple(user_tiles)
    base = merge_all(user_tiles, n, m)
    h1, h2 = hypothesis_tilings(spec)
    r1 = base
    for t in h1:
        r1 = merge_tile(r1, t)
    r2 = base
    for t in h2:
        r2 = merge_tile(r2, t)
    return HypothesisPair(user_tiles=user_tiles, spec=spec, resolved_1=r1, resolved_2=r2)


# ---------------------------------------------------------------------------
# JSON wire format: {rows, partition, user_tiles}
# ---------------------------------------------------------------------------


def pair_spec_to_json(user_tiles, spec: HypothesisSpec) -> str:
    return json.dumps(
        {
            "rows": spec.rows.tolist(),
            "partition": [b.tolist() for b in spec.partition],
            "user_tiles": [
                {"rows": t.rows.tolist(), "cols": t.cols.tolist()} for t in user_tiles
            ],
        }
    )


def pair_spec_from_json(text: str) -> tuple[list[Tile], HypothesisSpec]:
    obj = json.loads(text)
    spec = HypothesisSpec(rows=obj["rows"], partition=tuple(obj["partition"]))
    tiles = [Tile(t["rows"], t["cols"]) for t in obj.get("user_tiles", [])]
    return tiles, spec

"""Tiles, tilings, and the column-permutation constraints they induce.

A tile is a (row set, column set) pair. Inside a tile all columns are
permuted by one shared row bijection that maps the tile's rows onto
themselves, so the relations between the tile's columns are preserved.
A tiling is a set of non-overlapping tiles, stored as an n x m matrix of
tile IDs (0 = uncovered) plus a registry mapping IDs to tiles.

Overlapping tiles are resolved by :func:`merge_tile`, which rewrites the
overlap into an equivalent set of non-overlapping rectangles in O(n*m).
For small instances the module also provides an exhaustive enumeration
oracle (:func:`allowed_mask`, :func:`equivalent_bruteforce`) used to
validate merging against the definition directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np


class EnumerationBudgetError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its budget."""


def _index_array(ix, what: str) -> np.ndarray:
    a = np.unique(np.asarray(ix, dtype=np.int64).ravel())
    if a.size == 0:
        raise ValueError(f"{what} must be nonempty")
    if a.min() < 0:
        raise ValueError(f"{what} contains negative indices")
    return a


@dataclass(frozen=True, eq=False)
class Tile:
    """A combinatorial rectangle: a set of rows and a set of columns.

    Rows and columns are kept as sorted, duplicate-free index arrays.
    Indices are 0-based.
    """

    rows: np.ndarray
    cols: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _index_array(self.rows, "tile rows"))
        object.__setattr__(self, "cols", _index_array(self.cols, "tile cols"))

    def check_bounds(self, n: int, m: int) -> None:
        if self.rows.max() >= n:
            raise ValueError(f"tile row {self.rows.max()} out of range for n={n}")
        if self.cols.max() >= m:
            raise ValueError(f"tile col {self.cols.max()} out of range for m={m}")

    def same_as(self, other: "Tile") -> bool:
        return np.array_equal(self.rows, other.rows) and np.array_equal(
            self.cols, other.cols
        )

    def __repr__(self):
        return f"Tile(rows={self.rows.tolist()}, cols={self.cols.tolist()})"


@dataclass(frozen=True, eq=False)
class PermutationVector:
    """One row bijection per column; ``perms[j, i]`` is where row i of
    column j reads its value from."""

    perms: np.ndarray  # (m, n) int array, each row a bijection of [n]

    def __post_init__(self):
        p = np.asarray(self.perms, dtype=np.int64)
        if p.ndim != 2:
            raise ValueError("perms must be an (m, n) array")
        n = p.shape[1]
        ident = np.arange(n)
        for j in range(p.shape[0]):
            if not np.array_equal(np.sort(p[j]), ident):
                raise ValueError(f"column {j} permutation is not a bijection")
        object.__setattr__(self, "perms", p)

    @property
    def n(self) -> int:
        return self.perms.shape[1]

    @property
    def m(self) -> int:
        return self.perms.shape[0]

    @staticmethod
    def identity(n: int, m: int) -> "PermutationVector":
        return PermutationVector(np.tile(np.arange(n, dtype=np.int64), (m, 1)))


class Tiling:
    """Non-overlapping tiles over an n x m grid.

    The ID matrix and the registry are kept consistent at all times:
    the cells holding a nonzero ID p are exactly rows(p) x cols(p).
    Merging returns a new tiling (copy-on-merge); reads are safe to
    share across threads.
    """

    def __init__(self, n: int, m: int):
        if n < 1 or m < 1:
            raise ValueError("tiling needs n >= 1 and m >= 1")
        self.n = int(n)
        self.m = int(m)
        self.id_matrix = np.zeros((n, m), dtype=np.int32)
        self.registry: dict[int, Tile] = {}
        self.next_id = 1

    def copy(self) -> "Tiling":
        out = Tiling.__new__(Tiling)
        out.n, out.m = self.n, self.m
        out.id_matrix = self.id_matrix.copy()
        out.registry = dict(self.registry)
        out.next_id = self.next_id
        return out

    def tiles(self) -> list[Tile]:
        return [self.registry[k] for k in sorted(self.registry)]

    def covered_mask(self) -> np.ndarray:
        return self.id_matrix != 0

    def validate(self) -> None:
        """Structural audit: registry and ID matrix must agree exactly."""
        seen = np.zeros((self.n, self.m), dtype=bool)
        for tid, tile in self.registry.items():
            if tid <= 0 or tid >= self.next_id:
                raise AssertionError(f"tile id {tid} out of counter range")
            block = self.id_matrix[np.ix_(tile.rows, tile.cols)]
            if not (block == tid).all():
                raise AssertionError(f"tile {tid} rectangle does not match matrix")
            if seen[np.ix_(tile.rows, tile.cols)].any():
                raise AssertionError(f"tile {tid} overlaps another tile")
            seen[np.ix_(tile.rows, tile.cols)] = True
        extra = (self.id_matrix != 0) & ~seen
        if extra.any():
            raise AssertionError("matrix has covered cells unknown to the registry")


def new_tiling(n: int, m: int) -> Tiling:
    """Empty tiling: every permutation vector is allowed."""
    return Tiling(n, m)


def is_allowed(tiling: Tiling, pv: PermutationVector) -> bool:
    """True iff every tile's rows map onto themselves under one shared
    permutation across the tile's columns."""
    if pv.n != tiling.n or pv.m != tiling.m:
        raise ValueError("permutation vector dimensions do not match tiling")
    for tile in tiling.registry.values():
        sub = pv.perms[np.ix_(tile.cols, tile.rows)]
        if not (sub == sub[0]).all():
            return False
        member = np.zeros(tiling.n, dtype=bool)
        member[tile.rows] = True
        if not member[sub[0]].all():
            return False
    return True


def merge_tile(tiling: Tiling, new: Tile) -> Tiling:
    """Merge a tile into a tiling, resolving any overlap.

    Rows of the new tile are grouped by their per-column coverage
    pattern over the new tile's columns; each group becomes one merged
    rectangle spanning the new columns plus the columns of every
    overlapped tile. Uncovered cells (ID 0) never widen the column set.
    Runs in time proportional to n*m; the input tiling is not modified.
    """
    new.check_bounds(tiling.n, tiling.m)
    out = tiling.copy()
    rows, cols = new.rows, new.cols
    sub = out.id_matrix[np.ix_(rows, cols)]

    uniq = np.unique(sub)
    if uniq.size == 1 and uniq[0] != 0:
        # Contained in one tile. A true no-op only when the row sets are
        # equal; a strict row subset genuinely splits the host tile.
        host = out.registry[int(uniq[0])]
        if host.rows.size == rows.size:
            return out

    keys, inverse = np.unique(sub, axis=0, return_inverse=True)
    for g in range(keys.shape[0]):
        grp_rows = rows[inverse == g]
        overlapped = np.unique(keys[g][keys[g] != 0]).astype(int)

        colmask = np.zeros(out.m, dtype=bool)
        colmask[cols] = True
        for tid in overlapped:
            colmask[out.registry[tid].cols] = True
        cprime = np.flatnonzero(colmask)

        nid = out.next_id
        out.next_id += 1
        out.id_matrix[np.ix_(grp_rows, cprime)] = nid
        out.registry[nid] = Tile(grp_rows, cprime)

        for tid in overlapped:
            old = out.registry[tid]
            remaining = np.setdiff1d(old.rows, grp_rows, assume_unique=True)
            if remaining.size:
                out.registry[tid] = Tile(remaining, old.cols)
            else:
                del out.registry[tid]
    return out


def merge_all(tiles, n: int, m: int) -> Tiling:
    """Fold :func:`merge_tile` over a tile sequence, starting empty."""
    t = new_tiling(n, m)
    for tile in tiles:
        t = merge_tile(t, tile)
    return t


# ---------------------------------------------------------------------------
# Brute-force enumeration oracle (small instances only)
# ---------------------------------------------------------------------------

_HARD_GUARD_N = 5
_HARD_GUARD_M = 4
DEFAULT_ENUM_BUDGET = 2_000_000


def permutation_table(n: int) -> np.ndarray:
    """All n! permutations of [n], one per row, in lexicographic order."""
    return np.array(list(permutations(range(n))), dtype=np.int64)


def vector_index_grid(n: int, m: int, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All (n!)^m permutation vectors as an index grid into
    :func:`permutation_table`; shape ((n!)^m, m)."""
    fact = math.factorial(n)
    total = fact**m
    if n > _HARD_GUARD_N or m > _HARD_GUARD_M or total > budget:
        raise EnumerationBudgetError(
            f"(n!)^m = {total} exceeds the enumeration budget ({budget})"
        )
    axes = [np.arange(fact)] * m
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(total, m)


def allowed_mask(
    tiles, n: int, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> np.ndarray:
    """Boolean mask over :func:`vector_index_grid` marking the vectors
    allowed by every tile in ``tiles``."""
    ptab = permutation_table(n)
    grid = vector_index_grid(n, m, budget)
    mask = np.ones(grid.shape[0], dtype=bool)
    for tile in tiles:
        tile.check_bounds(n, m)
        member = np.zeros(n, dtype=bool)
        member[tile.rows] = True
        restricted = ptab[:, tile.rows]  # (n!, |R|)
        maps_in = member[restricted].all(axis=1)
        _, sig = np.unique(restricted, axis=0, return_inverse=True)
        cols = grid[:, tile.cols]
        ok = maps_in[cols].all(axis=1)
        ok &= (sig[cols] == sig[cols][:, :1]).all(axis=1)
        mask &= ok
    return mask


def equivalent_bruteforce(
    tiles_a, tiles_b, n: int, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> bool:
    """True iff the two tile sets allow exactly the same permutation
    vectors, checked by full enumeration."""
    ma = allowed_mask(tiles_a, n, m, budget)
    mb = allowed_mask(tiles_b, n, m, budget)
    return bool(np.array_equal(ma, mb))


# ---------------------------------------------------------------------------
# Serialization: {n, m, tiles: [{id, rows, cols}]}
# ---------------------------------------------------------------------------


def tiling_to_json(tiling: Tiling) -> str:
    obj = {
        "n": tiling.n,
        "m": tiling.m,
        "tiles": [
            {"id": tid, "rows": tile.rows.tolist(), "cols": tile.cols.tolist()}
            for tid, tile in sorted(tiling.registry.items())
        ],
    }
    return json.dumps(obj)


def tiling_from_json(text: str) -> Tiling:
    obj = json.loads(text)
    t = Tiling(int(obj["n"]), int(obj["m"]))
    for entry in obj["tiles"]:
        tid = int(entry["id"])
        tile = Tile(entry["rows"], entry["cols"])
        tile.check_bounds(t.n, t.m)
        if (t.id_matrix[np.ix_(tile.rows, tile.cols)] != 0).any():
            raise ValueError(f"tile {tid} overlaps an earlier tile")
        t.id_matrix[np.ix_(tile.rows, tile.cols)] = tid
        t.registry[tid] = tile
        t.next_id = max(t.next_id, tid + 1)
    return t

"""Uniform sampling of permutation vectors allowed by a tiling.

Each tile contributes one shared random bijection of its row set; the
uncovered rows of each column form a free group permuted independently
per column. Because every allowed vector decomposes uniquely into these
pieces, independent uniform draws per piece give the uniform
distribution over the allowed set.
"""

from __future__ import annotations

import numpy as np

from corand.dataset import Dataset
from corand.tiling import PermutationVector, Tiling


class SeededRng:
    """Reproducible random source with derivable substreams.

    Substreams are keyed by (draw index, kind, index) on top of the base
    seed, so draws for different tiles/columns/replicates are mutually
    independent and a parallel evaluation order cannot change results.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._draw = 0

    def next_draw(self) -> int:
        d = self._draw
        self._draw += 1
        return d

    def substream(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))


_TILE_STREAM = 0
_FREE_STREAM = 1


def sample_permutation(tiling: Tiling, rng: SeededRng) -> PermutationVector:
    """Draw one permutation vector uniformly from those the tiling allows."""
    n, m = tiling.n, tiling.m
    draw = rng.next_draw()
    perms = np.tile(np.arange(n, dtype=np.int64), (m, 1))

    for tid in sorted(tiling.registry):
        tile = tiling.registry[tid]
        g = rng.substream(draw, _TILE_STREAM, tid)
        shared = g.permutation(tile.rows)
        perms[np.ix_(tile.cols, tile.rows)] = shared[None, :]

    covered = tiling.covered_mask()
    for j in range(m):
        free = np.flatnonzero(~covered[:, j])
        if free.size > 1:
            g = rng.substream(draw, _FREE_STREAM, j)
            perms[j, free] = g.permutation(free)
    return PermutationVector(perms)


def apply_to_matrix(values: np.ndarray, pv: PermutationVector) -> np.ndarray:
    """Permute a matrix column-wise: out[i, j] = values[perms[j, i], j]."""
    if values.shape != (pv.n, pv.m):
        raise ValueError(
            f"data shape {values.shape} does not match permutation "
            f"vector ({pv.n}, {pv.m})"
        )
    return np.take_along_axis(values, pv.perms.T, axis=0)


def apply(d: Dataset, pv: PermutationVector) -> Dataset:
    """Apply a permutation vector to a dataset's numeric matrix."""
    permuted = apply_to_matrix(d.values, pv)
    return d.replace_values(permuted)

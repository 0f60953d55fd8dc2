"""Covariance of the uniform distribution over tiling-allowed permutations.

The closed form exploits two facts: rows that some tile permutes jointly
for a column pair contribute their exact products, and every other row
contributes the product of its permutation-group means (tile rows, or
the column's free group when uncovered). Diagonal entries are the plain
column variances, which every column-wise permutation preserves.

A Monte-Carlo estimator over sampled permutations is provided as an
independent check of the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corand.dataset import CenteredData
from corand.sampler import SeededRng, apply_to_matrix, sample_permutation
from corand.tiling import Tiling


@dataclass(frozen=True, eq=False)
class CovMatrix:
    values: np.ndarray  # (m, m), symmetric PSD

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("covariance matrix must be square")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def validate(self, sym_tol: float = 1e-12, psd_tol: float = -1e-8) -> None:
        if np.abs(self.values - self.values.T).max() > sym_tol:
            raise AssertionError("covariance matrix is not symmetric")
        w = np.linalg.eigvalsh(self.values)
        if w.min() < psd_tol:
            raise AssertionError(f"covariance matrix has eigenvalue {w.min()}")


def group_mean_matrix(y: np.ndarray, tiling: Tiling) -> np.ndarray:
    """g[i, l] = mean of column l over row i's permutation group in that
    column (its tile's rows, or the column's free group)."""
    g = np.empty_like(y)
    for tile in tiling.registry.values():
        block_means = y[np.ix_(tile.rows, tile.cols)].mean(axis=0)
        g[np.ix_(tile.rows, tile.cols)] = block_means[None, :]
    covered = tiling.covered_mask()
    for j in range(tiling.m):
        free = np.flatnonzero(~covered[:, j])
        if free.size:
            g[free, j] = y[free, j].mean()
    return g


def analytical_covariance(y: CenteredData, tiling: Tiling) -> CovMatrix:
    """Closed-form covariance for the permutation distribution of a tiling.

    Computed as (GᵀG + per-tile exact-product corrections)/n with the
    diagonal overwritten by the exact column variances; O(n·m²) overall.
    """
    yv = y.values
    n, m = yv.shape
    if (n, m) != (tiling.n, tiling.m):
        raise ValueError("data shape does not match tiling")
    g = group_mean_matrix(yv, tiling)
    cov = g.T @ g
    for tile in tiling.registry.values():
        if tile.cols.size < 2:
            continue
        by = yv[np.ix_(tile.rows, tile.cols)]
        bg = g[np.ix_(tile.rows, tile.cols)]
        cov[np.ix_(tile.cols, tile.cols)] += by.T @ by - bg.T @ bg
    cov /= n
    cov = (cov + cov.T) / 2.0
    np.fill_diagonal(cov, (yv * yv).sum(axis=0) / n)
    return CovMatrix(cov)


def montecarlo_covariance(
    y: CenteredData, tiling: Tiling, k: int, rng: SeededRng
) -> CovMatrix:
    """Empirical covariance averaged over k sampled permutations.

    Columns are not re-centered per draw: permutations preserve the
    marginals, so the column means stay exactly zero.
    """
    if k < 1:
        raise ValueError("draw count must be >= 1")
    yv = y.values
    n = yv.shape[0]
    acc = np.zeros((tiling.m, tiling.m))
    for _ in range(k):
        pv = sample_permutation(tiling, rng)
        shuffled = apply_to_matrix(yv, pv)
        acc += shuffled.T @ shuffled
    cov = acc / (k * n)
    return CovMatrix((cov + cov.T) / 2.0)

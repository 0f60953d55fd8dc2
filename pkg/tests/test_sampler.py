import numpy as np
import pytest
from scipy import stats

from corand.sampler import SeededRng, apply, apply_to_matrix, sample_permutation
from corand.tiling import (
    PermutationVector,
    Tile,
    allowed_mask,
    is_allowed,
    merge_all,
    permutation_table,
    vector_index_grid,
)
from tests.conftest import make_dataset


def draw_index(pv: PermutationVector, ptab: np.ndarray) -> int:
    """Map a sampled vector to its row index in the enumeration grid."""
    lookup = {row.tobytes(): i for i, row in enumerate(ptab)}
    fact = ptab.shape[0]
    idx = 0
    for j in range(pv.m):
        idx = idx * fact + lookup[pv.perms[j].tobytes()]
    return idx


def grid_index_order(n, m):
    """Row index of each grid entry when digits are mixed-radix n!."""
    grid = vector_index_grid(n, m)
    fact = permutation_table(n).shape[0]
    weights = fact ** np.arange(m - 1, -1, -1)
    return grid @ weights


def test_every_draw_is_allowed(rng):
    total = 0
    for trial in range(50):
        n = int(rng.integers(4, 20))
        m = int(rng.integers(2, 6))
        tiles = [
            Tile(rng.choice(n, size=rng.integers(1, n + 1), replace=False),
                 rng.choice(m, size=rng.integers(1, m + 1), replace=False))
            for _ in range(int(rng.integers(1, 4)))
        ]
        tiling = merge_all(tiles, n, m)
        sampler_rng = SeededRng(1000 + trial)
        for _ in range(200):
            pv = sample_permutation(tiling, sampler_rng)
            assert is_allowed(tiling, pv)
            total += 1
    assert total == 10_000


def test_determinism_same_seed_same_vectors():
    tiling = merge_all([Tile([0, 1, 2], [0, 1])], 6, 3)
    r1, r2 = SeededRng(7), SeededRng(7)
    seq1 = [sample_permutation(tiling, r1).perms for _ in range(5)]
    seq2 = [sample_permutation(tiling, r2).perms for _ in range(5)]
    for p1, p2 in zip(seq1, seq2):
        assert np.array_equal(p1, p2)
    # successive draws differ (the draw index enters the substream key)
    assert not all(np.array_equal(seq1[0], p) for p in seq1[1:])


def uniformity_pvalue(tiling, tiles, n, m, draws, seed):
    mask = allowed_mask(tiles, n, m)
    allowed_ids = np.flatnonzero(mask)
    pos = {int(g): k for k, g in enumerate(allowed_ids)}
    ptab = permutation_table(n)
    counts = np.zeros(len(allowed_ids))
    rng = SeededRng(seed)
    for _ in range(draws):
        pv = sample_permutation(tiling, rng)
        counts[pos[draw_index(pv, ptab)]] += 1
    expected = draws / len(allowed_ids)
    chi2 = ((counts - expected) ** 2 / expected).sum()
    return stats.chi2.sf(chi2, df=len(allowed_ids) - 1), counts


def test_uniform_over_two_outcomes():
    tiling = merge_all([], 2, 1)
    counts = np.zeros(2)
    rng = SeededRng(3)
    for _ in range(10_000):
        pv = sample_permutation(tiling, rng)
        counts[int(pv.perms[0, 0])] += 1
    # frequency 0.5 within 3 sigma
    sigma = np.sqrt(10_000 * 0.25)
    assert abs(counts[0] - 5_000) <= 3 * sigma


def test_full_tile_uniform_over_shared_permutations():
    n, m = 3, 2
    tiles = [Tile(range(n), range(m))]
    tiling = merge_all(tiles, n, m)
    pval, counts = uniformity_pvalue(tiling, tiles, n, m, draws=60_000, seed=11)
    assert len(counts) == 6  # shared permutation only: 6 of 36 vectors
    assert (counts > 0).all()
    assert pval > 0.001


def test_uniform_on_merged_tiling():
    n, m = 4, 3
    tiles = [Tile([0, 1, 2], [0, 1]), Tile([1, 2, 3], [1, 2])]
    tiling = merge_all(tiles, n, m)
    pval, _ = uniformity_pvalue(tiling, tiles, n, m, draws=50_000, seed=5)
    assert pval > 0.001


def test_apply_identity_and_reverse():
    d = make_dataset([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]])
    ident = PermutationVector.identity(3, 2)
    assert np.array_equal(apply(d, ident).values, d.values)
    reverse = PermutationVector(np.array([[2, 1, 0], [0, 1, 2]]))
    out = apply(d, reverse)
    assert out.values[:, 0].tolist() == [3.0, 2.0, 1.0]
    assert out.values[:, 1].tolist() == [10.0, 20.0, 30.0]


def test_apply_preserves_marginals(rng):
    d = make_dataset(rng.standard_normal((8, 3)))
    tiling = merge_all([Tile([0, 1, 2, 3], [0, 2])], 8, 3)
    pv = sample_permutation(tiling, SeededRng(2))
    out = apply(d, pv)
    for j in range(3):
        assert np.array_equal(np.sort(out.values[:, j]), np.sort(d.values[:, j]))


def test_apply_dimension_mismatch():
    d = make_dataset([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        apply_to_matrix(d.values, PermutationVector.identity(3, 2))

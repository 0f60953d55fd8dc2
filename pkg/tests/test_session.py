import numpy as np
import pytest

from corand.dataset import center
from corand.generators import gaussian_dataset, german_layout_synthetic
from corand.hypothesis import HypothesisSpec
from corand.sampler import SeededRng
from corand.session import Session, create_session, restore_session
from tests.conftest import make_dataset


@pytest.fixture
def small_session():
    return create_session(gaussian_dataset(60, 5, seed=1), seed=0)


def test_fresh_session_view_is_correlation_pca(small_session):
    view = small_session.compute_view()
    data = small_session.dataset
    y = center(data).values
    corr = y.T @ y / data.n_rows
    lam, vecs = np.linalg.eigh(corr)
    pc1 = vecs[:, -1]
    assert abs(float(view.directions[0] @ pc1)) >= 1 - 1e-6


def test_two_sessions_same_seed_identical_views():
    d = gaussian_dataset(50, 4, seed=3)
    v1 = create_session(d, seed=5).compute_view()
    v2 = create_session(d, seed=5).compute_view()
    assert np.array_equal(v1.directions, v2.directions)
    assert np.array_equal(v1.coords, v2.coords)


def test_single_column_dataset_rejected():
    d = make_dataset(np.random.default_rng(0).standard_normal((10, 1)))
    with pytest.raises(ValueError):
        create_session(d, seed=0)


def test_view_cache_hit_and_invalidation(small_session):
    s = small_session
    v1 = s.compute_view()
    v2 = s.compute_view()
    assert v1 is v2
    assert s.view_computations == 1
    s.commit_tile([0, 1, 2], [0, 1], "first")
    assert s.view_computations == 1
    v3 = s.compute_view()
    assert s.view_computations == 2
    assert v3 is not v1


def test_commit_includes_tile_on_both_sides(small_session):
    s = small_session
    s.commit_tile([0, 1, 2, 3], [0, 1], "known block")
    s.compute_view()
    pair = s.current_pair()
    for tiling in (pair.resolved_1, pair.resolved_2):
        covered = tiling.covered_mask()
        assert covered[np.ix_([0, 1, 2, 3], [0, 1])].all()


def test_commit_out_of_range_errors(small_session):
    with pytest.raises(ValueError):
        small_session.commit_tile([0, 999], [0], "bad")
    with pytest.raises(ValueError):
        small_session.commit_tile([0], [99], "bad")


def test_rollback_restores_exact_view(small_session):
    s = small_session
    before = s.compute_view()
    s.commit_tile([0, 1, 2, 3, 4], [0, 1, 2], "temp")
    s.compute_view()
    s.rollback_last_tile()
    after = s.compute_view()
    assert np.array_equal(before.directions, after.directions)
    assert np.array_equal(before.coords, after.coords)
    with pytest.raises(ValueError):
        create_session(gaussian_dataset(10, 2, seed=0), 0).rollback_last_tile()


def test_version_counter_tracks_mutations(small_session):
    s = small_session
    assert s.version == 0
    s.commit_tile([0, 1], [0], "a")
    assert s.version == 1
    s.set_hypothesis(HypothesisSpec(rows=np.arange(10), partition=(np.array([0, 1]),)))
    assert s.version == 2
    s.rollback_last_tile()
    assert s.version == 3


def test_committing_dominant_pattern_rotates_view():
    table = german_layout_synthetic(seed=11)
    s = create_session(table.dataset, seed=0)
    v_before = s.compute_view().directions[0]
    s.commit_tile(table.planted_rows, table.planted_cols, "planted cluster")
    v_after = s.compute_view().directions[0]
    assert abs(float(v_before @ v_after)) < 0.99


def test_sample_view_requires_cached_view(small_session):
    with pytest.raises(ValueError):
        small_session.sample_view(1, SeededRng(0))
    small_session.compute_view()
    with pytest.raises(ValueError):
        small_session.sample_view(3, SeededRng(0))


def test_sample_view_full_tile_reorders_rows(small_session):
    s = small_session
    n, m = s.dataset.n_rows, s.dataset.n_cols
    s.commit_tile(range(n), range(m), "everything")
    s.compute_view()
    coords = s.sample_view(1, SeededRng(4))
    data_coords = s.compute_view().coords
    # a full tile only permits shared row shuffles: the same point set
    order = np.lexsort(coords.T)
    order_data = np.lexsort(data_coords.T)
    assert np.allclose(coords[order], data_coords[order_data], atol=1e-9)


def test_sample_view_deterministic(small_session):
    small_session.compute_view()
    a = small_session.sample_view(2, SeededRng(21))
    b = small_session.sample_view(2, SeededRng(21))
    assert np.array_equal(a, b)


def test_sample_view_breaking_side_shuffles_columns(small_session):
    s = small_session
    s.compute_view()
    coords = s.sample_view(2, SeededRng(9))
    assert coords.shape == s.compute_view().coords.shape
    assert not np.allclose(coords, s.compute_view().coords)


def test_pcp_payload_ordering_and_values():
    table = german_layout_synthetic(seed=2)
    s = create_session(table.dataset, seed=0)
    payload = s.pcp_payload(table.planted_rows, tau=0.5)
    k = table.planted_cols.size
    assert set(payload["order"][:k]) == set(table.planted_cols.tolist())
    assert sorted(payload["ratios"][:k]) == payload["ratios"][:k]
    assert len(payload["values"]) == table.dataset.n_rows
    assert len(payload["values"][0]) == table.dataset.n_cols
    with pytest.raises(ValueError):
        s.pcp_payload([], tau=0.5)


def test_pcp_all_rows_ratios_one(small_session):
    payload = small_session.pcp_payload(range(small_session.dataset.n_rows), tau=0.5)
    assert payload["ratios"] == pytest.approx([1.0] * small_session.dataset.n_cols)
    assert payload["included"] == []


def test_snapshot_restore_replays_to_identical_views():
    d = gaussian_dataset(40, 4, seed=6)
    s = create_session(d, seed=9)
    s.commit_tile([0, 1, 2], [0, 1], "one")
    s.set_hypothesis(
        HypothesisSpec(rows=np.arange(20), partition=(np.array([0]), np.array([2, 3])))
    )
    s.commit_tile([5, 6], [2, 3], "two")
    view = s.compute_view()

    replica = restore_session(s.snapshot(), d)
    view2 = replica.compute_view()
    assert np.array_equal(view.directions, view2.directions)
    assert np.array_equal(view.coords, view2.coords)
    assert np.array_equal(view.gains, view2.gains)


def test_scripted_replay_bit_identical():
    d = gaussian_dataset(30, 4, seed=8)

    def run_script():
        s = create_session(d, seed=13)
        s.compute_view()
        s.commit_tile([0, 1, 2, 3], [0, 1], "block")
        s.compute_view()
        s.set_hypothesis(
            HypothesisSpec(rows=np.arange(15), partition=(np.array([1]), np.array([2])))
        )
        view = s.compute_view()
        sample = s.sample_view(1, SeededRng(2))
        return view, sample

    (v1, m1), (v2, m2) = run_script(), run_script()
    assert np.array_equal(v1.directions, v2.directions)
    assert np.array_equal(v1.coords, v2.coords)
    assert np.array_equal(m1, m2)

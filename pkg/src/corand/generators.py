"""Synthetic data generators for experiments and tests.

Three families:

* plain Gaussian tables (scaling studies),
* a socioeconomic-style layout: 32 numeric attributes plus three
  categorical factors (2/16/4 levels) that drive both planted structure
  and random-tile construction,
* a 4-attribute toy where two nearly identical attributes each get a
  noisy copy, used to show how background knowledge redirects views.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corand.dataset import Dataset, zscore

FACTOR_LEVELS = {"Type": 2, "State": 16, "Region": 4}
TYPE_LABELS = ["rural", "urban"]
REGION_LABELS = ["North", "South", "West", "East"]

# Named column blocks mirroring a voting/demographics/workforce/education
# grouping: 5 + 5 + 8 + 5 = 23 of the 32 numeric attributes.
FOCUS_GROUP_SIZES = {"voting": 5, "demographics": 5, "workforce": 8, "education": 5}


def _singleton_groups(names):
    return {name: [i] for i, name in enumerate(names)}


def gaussian_dataset(n: int, m: int, seed: int) -> Dataset:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    values = rng.standard_normal((n, m))
    names = [f"x{j:03d}" for j in range(m)]
    d = Dataset(values=values, column_names=names, column_groups=_singleton_groups(names))
    return zscore(d)


@dataclass(frozen=True, eq=False)
class SyntheticTable:
    dataset: Dataset  # zscored numeric matrix; factors carried as categorical
    factors: dict[str, np.ndarray]  # label arrays, length n
    planted_rows: np.ndarray  # the dominant cluster (East & rural)
    planted_cols: np.ndarray  # attributes the cluster is tight on
    focus_rows: np.ndarray  # rural rows
    focus_partition: list[np.ndarray]  # the four named column blocks
    focus_group_names: list[str]


def german_layout_synthetic(
    seed: int, n: int = 412, n_numeric: int = 32
) -> SyntheticTable:
    """Factor-structured table with one dominant planted cluster.

    Rows that are both East and rural form a tight, strongly offset
    cluster on a known attribute subset; a shared latent factor gives
    the rest of the table correlated structure for views to find after
    the cluster has been tiled away.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))

    type_lab = np.array(
        [TYPE_LABELS[0] if r < 298 / 412 else TYPE_LABELS[1] for r in rng.random(n)],
        dtype=object,
    )
    state_lab = np.array([f"S{k:02d}" for k in rng.integers(0, 16, size=n)], dtype=object)
    region_lab = np.array(
        [REGION_LABELS[k] for k in rng.integers(0, 4, size=n)], dtype=object
    )
    factors = {"Type": type_lab, "State": state_lab, "Region": region_lab}

    values = rng.standard_normal((n, n_numeric))

    # Shared latent factor: broad correlation across half the attributes.
    latent = rng.standard_normal(n)
    corr_cols = np.arange(0, n_numeric, 2)
    values[:, corr_cols] += 0.6 * latent[:, None]

    # Dominant cluster: East & rural districts, tight and far out on a
    # fixed attribute subset. Sized so its separation carries more
    # variance than the latent factor and the first view points at it.
    cluster = np.flatnonzero((region_lab == "East") & (type_lab == "rural"))
    planted_cols = np.arange(1, 16, 2)  # odd columns: independent of the latent
    values[np.ix_(cluster, planted_cols)] = (
        4.0 + 0.3 * rng.standard_normal((cluster.size, planted_cols.size))
    )

    names = []
    blocks = []
    j = 0
    for gname, size in FOCUS_GROUP_SIZES.items():
        blocks.append(np.arange(j, j + size))
        names.extend(f"{gname}.{k}" for k in range(size))
        j += size
    names.extend(f"misc.{k}" for k in range(n_numeric - j))

    d = Dataset(
        values=values,
        column_names=names,
        column_groups=_singleton_groups(names),
        categorical=factors,
    )
    return SyntheticTable(
        dataset=zscore(d),
        factors=factors,
        planted_rows=cluster,
        planted_cols=planted_cols,
        focus_rows=np.flatnonzero(type_lab == "rural"),
        focus_partition=blocks,
        focus_group_names=list(FOCUS_GROUP_SIZES),
    )


def toy_subsetting(seed: int, n: int = 500) -> Dataset:
    """Four attributes: B tracks A closely; C and D are noisy copies of
    A and B respectively. The A-B link is only visible through the data
    as a whole."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2,)))
    a = rng.standard_normal(n)
    b = a + 0.1 * rng.standard_normal(n)
    c = a + 0.5 * rng.standard_normal(n)
    d = b + 0.5 * rng.standard_normal(n)
    names = ["A", "B", "C", "D"]
    data = Dataset(
        values=np.column_stack([a, b, c, d]),
        column_names=names,
        column_groups=_singleton_groups(names),
    )
    return zscore(data)


def perturb_table(
    table: SyntheticTable, sigma: float, delta_n: int, seed: int
) -> tuple[Dataset, dict[str, np.ndarray], np.ndarray]:
    """Remove delta_n random rows, add Gaussian noise, rescale.

    Returns (perturbed dataset, surviving factor labels, surviving row
    indices). With sigma == 0 and delta_n == 0 the dataset is returned
    unchanged, bit for bit.
    """
    n = table.dataset.n_rows
    if delta_n >= n:
        raise ValueError(f"cannot remove {delta_n} of {n} rows")
    if sigma == 0 and delta_n == 0:
        return table.dataset, table.factors, np.arange(n)

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(3,)))
    keep = np.sort(rng.choice(n, size=n - delta_n, replace=False))
    values = table.dataset.values[keep].copy()
    if sigma > 0:
        values += sigma * rng.standard_normal(values.shape)
    d = Dataset(
        values=values,
        column_names=list(table.dataset.column_names),
        column_groups={k: list(v) for k, v in table.dataset.column_groups.items()},
    )
    factors = {k: v[keep] for k, v in table.factors.items()}
    return zscore(d, constant_policy="zero"), factors, keep

import numpy as np
import pytest

from corand.dataset import Dataset


def make_dataset(values, names=None) -> Dataset:
    values = np.asarray(values, dtype=np.float64)
    names = names or [f"c{j}" for j in range(values.shape[1])]
    return Dataset(
        values=values,
        column_names=list(names),
        column_groups={name: [j] for j, name in enumerate(names)},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

"""Attribute suggestion for a selected point set.

An attribute characterizes a selection when the selected points are
more alike on it than the data overall: its within-selection standard
deviation divided by the overall standard deviation falls below a
threshold. The ratios double as a display ordering for parallel
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corand.dataset import Dataset

DEFAULT_TAU = 0.5
# Walkthrough preset used in the exploration write-ups.
FOCUS_TAU = 2.0 / 3.0


@dataclass(frozen=True, eq=False)
class AttributeSuggestion:
    ratios: np.ndarray  # per column; NaN marks undefined (constant overall)
    included: list[int]  # columns with ratio < tau
    tau: float
    order: list[int]  # columns sorted ascending by ratio, NaN last


def suggest_attributes(d: Dataset, rows, tau: float = DEFAULT_TAU) -> AttributeSuggestion:
    rows = np.unique(np.asarray(list(rows), dtype=np.int64))
    if rows.size < 2:
        raise ValueError("selection must contain at least 2 rows")
    if rows.min() < 0 or rows.max() >= d.n_rows:
        raise ValueError("selection rows out of range")
    if not tau > 0:
        raise ValueError("tau must be positive")

    sd_all = d.values.std(axis=0)  # population
    sd_sel = d.values[rows].std(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(sd_all > 0, sd_sel / sd_all, np.nan)

    included = [j for j in range(d.n_cols) if np.isfinite(ratios[j]) and ratios[j] < tau]
    finite = np.nan_to_num(ratios, nan=np.inf)
    order = [int(j) for j in np.argsort(finite, kind="stable")]
    return AttributeSuggestion(ratios=ratios, included=included, tau=tau, order=order)

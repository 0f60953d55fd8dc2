"""Tabular ingestion, encoding, and scaling.

CSV goes in, an immutable numeric matrix comes out. Categorical columns
are carried alongside the matrix until `onehot_encode` turns each one
into a group of indicator columns whose total variance is 1, so that a
many-label variable is not implicitly weighted more than a binary one.
All variances are population (1/n) variances.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

DEFAULT_NA_TOKENS = ("", "NA")


class ParseError(ValueError):
    """CSV input that cannot be turned into a dataset."""


@dataclass
class LoadOptions:
    delimiter: str = ","
    header: bool = True
    na_policy: str = "drop-row"  # or "error"
    na_tokens: tuple[str, ...] = DEFAULT_NA_TOKENS
    categorical: tuple[str, ...] = ()  # columns forced categorical
    retain: tuple[str, ...] | None = None  # column-selection list; None = all


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x m numeric table plus any not-yet-encoded label columns.

    column_groups partitions the m numeric columns into named groups:
    singleton groups for plain numeric columns, one multi-column group
    per encoded categorical variable.
    """

    values: np.ndarray
    column_names: list[str]
    column_groups: dict[str, list[int]]
    scaling_state: str = "raw"
    categorical: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        n, m = v.shape
        # m == 0 is tolerated only as a staging state with encoding pending.
        if n < 2 or (m < 1 and not self.categorical):
            raise ValueError(f"dataset needs n >= 2 and m >= 1, got {n} x {m}")
        if not np.isfinite(v).all():
            raise ValueError("dataset contains non-finite entries")
        if len(self.column_names) != m:
            raise ValueError("column_names length does not match matrix width")
        covered = sorted(i for cols in self.column_groups.values() for i in cols)
        if covered != list(range(m)):
            raise ValueError("column_groups is not a partition of the columns")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]

    def replace_values(self, values: np.ndarray) -> "Dataset":
        if values.shape != self.values.shape:
            raise ValueError("replacement values must keep the same shape")
        return Dataset(
            values=values,
            column_names=list(self.column_names),
            column_groups={k: list(v) for k, v in self.column_groups.items()},
            scaling_state=self.scaling_state,
            categorical=dict(self.categorical),
        )


@dataclass(frozen=True, eq=False)
class CenteredData:
    """Column-centered matrix together with the removed column means."""

    values: np.ndarray
    column_means: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        n = v.shape[0]
        colsum = np.abs(v.sum(axis=0))
        if (colsum > 1e-9 * max(n, 1)).any():
            raise ValueError("centered data has a column that does not sum to ~0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _singleton_groups(names) -> dict[str, list[int]]:
    return {name: [i] for i, name in enumerate(names)}


def load_csv(source, options: LoadOptions | None = None) -> Dataset:
    """Parse delimited text into a Dataset.

    A retained column is numeric if every non-NA token parses as a
    float; anything else (or any column named in options.categorical)
    is flagged for one-hot encoding. Under the drop-row policy, rows
    with an NA in any retained column are removed.
    """
    opt = options or LoadOptions()
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError("source must be bytes, str, or a readable stream")

    reader = csv.reader(io.StringIO(text), delimiter=opt.delimiter)
    rows = []
    header: list[str] | None = None
    width = None
    for lineno, record in enumerate(reader, start=1):
        if not record:
            continue
        if header is None and opt.header:
            header = [h.strip() for h in record]
            width = len(header)
            continue
        if width is None:
            width = len(record)
        if len(record) != width:
            raise ParseError(
                f"line {lineno}: expected {width} fields, got {len(record)}"
            )
        rows.append([f.strip() for f in record])

    if header is None:
        header = [f"col{i}" for i in range(width or 0)]
    if not rows:
        raise ParseError("empty table")

    if opt.retain is not None:
        missing = [c for c in opt.retain if c not in header]
        if missing:
            raise ParseError(f"retained columns not present: {missing}")
        keep = [header.index(c) for c in opt.retain]
    else:
        keep = list(range(len(header)))
    names = [header[i] for i in keep]

    cells = [[r[i] for i in keep] for r in rows]
    na = set(opt.na_tokens)

    # NA policy first, so typing decisions see only surviving rows.
    filtered = []
    for lineno, r in enumerate(cells, start=1):
        if any(f in na for f in r):
            if opt.na_policy == "drop-row":
                continue
            raise ParseError(f"row {lineno}: NA value under na_policy={opt.na_policy}")
        filtered.append(r)
    if len(filtered) < 2:
        raise ParseError("fewer than 2 usable rows after NA handling")

    columns = list(zip(*filtered))
    numeric_names, numeric_cols = [], []
    categorical: dict[str, np.ndarray] = {}
    for name, col in zip(names, columns):
        forced = name in opt.categorical
        parsed = None
        if not forced:
            try:
                parsed = np.array([float(f) for f in col], dtype=np.float64)
            except ValueError:
                parsed = None
        if parsed is None:
            categorical[name] = np.array(col, dtype=object)
        else:
            numeric_names.append(name)
            numeric_cols.append(parsed)

    if not numeric_cols and not categorical:
        raise ParseError("no usable columns")
    if numeric_cols:
        values = np.column_stack(numeric_cols)
    else:
        # All-categorical table: an empty matrix until encoding fills it in.
        values = np.zeros((len(filtered), 0))

    return Dataset(
        values=values,
        column_names=numeric_names,
        column_groups=_singleton_groups(numeric_names),
        scaling_state="raw",
        categorical=categorical,
    )


def zscore(d: Dataset, constant_policy: str = "error") -> Dataset:
    """Scale every numeric column to mean 0, population variance 1.

    constant_policy: "error" rejects zero-variance columns naming the
    offender; "zero" maps them to all zeros.
    """
    mu = d.values.mean(axis=0)
    var = d.values.var(axis=0)  # population (1/n)
    out = np.empty_like(d.values)
    for j in range(d.n_cols):
        if var[j] <= 0.0:
            if constant_policy == "zero":
                out[:, j] = 0.0
                continue
            raise ValueError(
                f"column '{d.column_names[j]}' is constant; pass "
                f"constant_policy='zero' to keep it as zeros"
            )
        out[:, j] = (d.values[:, j] - mu[j]) / np.sqrt(var[j])
    return Dataset(
        values=out,
        column_names=list(d.column_names),
        column_groups={k: list(v) for k, v in d.column_groups.items()},
        scaling_state="zscored",
        categorical=dict(d.categorical),
    )


def onehot_encode(d: Dataset) -> Dataset:
    """Expand each flagged categorical column into indicator columns.

    The indicators of one source variable form one column group and are
    rescaled uniformly so the group's total population variance is 1.
    """
    if not d.categorical:
        return d

    names = list(d.column_names)
    groups = {k: list(v) for k, v in d.column_groups.items()}
    blocks = [d.values]
    col = d.n_cols
    for var, labels in d.categorical.items():
        uniq = sorted(set(labels.tolist()))
        if len(uniq) < 2:
            raise ValueError(
                f"categorical column '{var}' has a single label; "
                f"its encoded group would have zero variance"
            )
        ind = np.zeros((d.n_rows, len(uniq)))
        for k, lab in enumerate(uniq):
            ind[:, k] = labels == lab
        total_var = ind.var(axis=0).sum()
        ind /= np.sqrt(total_var)
        blocks.append(ind)
        groups[var] = list(range(col, col + len(uniq)))
        names.extend(f"{var}.{lab}" for lab in uniq)
        col += len(uniq)

    return Dataset(
        values=np.hstack(blocks),
        column_names=names,
        column_groups=groups,
        scaling_state="group-scaled",
        categorical={},
    )


def center(d: Dataset) -> CenteredData:
    """Subtract each column's mean."""
    mu = d.values.mean(axis=0)
    return CenteredData(values=d.values - mu, column_means=mu)


def save_csv(d: Dataset, stream, delimiter: str = ",") -> None:
    """Write the numeric matrix back out in the ingestion dialect."""
    close = False
    if isinstance(stream, (str, bytes)):
        stream = open(stream, "w", newline="")
        close = True
    try:
        w = csv.writer(stream, delimiter=delimiter)
        w.writerow(d.column_names)
        for row in d.values:
            w.writerow([repr(float(x)) for x in row])
    finally:
        if close:
            stream.close()

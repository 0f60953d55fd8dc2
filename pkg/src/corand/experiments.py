"""Batch studies: robustness to perturbation, wall-clock scaling, the
gain cross-table over hypothesis pairs, and the 4-attribute toy.

Every run is a pure function of (config, seed): replicate substreams
are derived, never shared, so results are reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from corand.covariance import analytical_covariance
from corand.dataset import Dataset, center
from corand.generators import (
    SyntheticTable,
    gaussian_dataset,
    german_layout_synthetic,
    perturb_table,
    toy_subsetting,
)
from corand.hypothesis import HypothesisSpec, assemble
from corand.projection import gain, optimal_directions
from corand.selection import FOCUS_TAU, suggest_attributes
from corand.tiling import Tile


@dataclass
class ExperimentConfig:
    generator: str = "german-layout-synthetic"
    n: int = 412
    m: int = 32
    noise_sigmas: tuple[float, ...] = (0.0, 1.0, 2.0, 5.0, 10.0)
    row_removals: tuple[int, ...] = (0, 100, 200)
    seed: int = 0
    replicates: int = 10
    # timing grid
    timing_ns: tuple[int, ...] = (500, 1000, 5000, 10000)
    timing_ms: tuple[int, ...] = (10, 50, 100, 150, 200)

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(asdict(self), sort_keys=True).encode()
        ).hexdigest()[:16]


@dataclass
class TableResult:
    name: str
    header: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(str(x) for x in row) + "\n")
        return buf.getvalue()

    def render_text(self) -> str:
        """Aligned columns for reading; numbers shortened to 3 decimals."""

        def fmt(x) -> str:
            return f"{x:.3f}" if isinstance(x, float) else str(x)

        cells = [self.header] + [[fmt(x) for x in row] for row in self.rows]
        widths = [max(len(r[j]) for r in cells) for j in range(len(self.header))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random factor tiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorTile:
    """A tile whose rows are one level of a categorical factor, so it
    can be re-anchored after rows are removed."""

    factor: str
    level: str
    cols: tuple[int, ...]

    def rows_in(self, factors: dict[str, np.ndarray]) -> np.ndarray:
        return np.flatnonzero(factors[self.factor] == self.level)

    def tile_in(self, factors: dict[str, np.ndarray]) -> Tile | None:
        rows = self.rows_in(factors)
        if rows.size == 0:
            return None
        return Tile(rows, np.array(self.cols))


def _random_factor_tile(
    factors: dict[str, np.ndarray], m: int, rng: np.random.Generator
) -> FactorTile:
    names = sorted(factors)
    while True:
        fname = names[rng.integers(len(names))]
        levels = sorted(set(factors[fname].tolist()))
        level = levels[rng.integers(len(levels))]
        if (factors[fname] == level).sum() >= 2:
            break
    width = int(rng.integers(2, min(32, m) + 1))
    cols = tuple(sorted(rng.choice(m, size=width, replace=False).tolist()))
    return FactorTile(factor=fname, level=level, cols=cols)


def _solve_pair(dataset: Dataset, user_tiles, spec: HypothesisSpec):
    pair = assemble(user_tiles, spec, dataset.n_rows, dataset.n_cols)
    y = center(dataset)
    s1 = analytical_covariance(y, pair.resolved_1)
    s2 = analytical_covariance(y, pair.resolved_2)
    basis = optimal_directions(s1.values, s2.values)
    return basis, s1.values, s2.values


# ---------------------------------------------------------------------------
# Stability under perturbation
# ---------------------------------------------------------------------------


def stability_experiment(cfg: ExperimentConfig) -> TableResult:
    """Mean relative gain loss of the direction refit on perturbed data.

    Per cell: remove Δn rows, add noise of scale σ, rescale, refit the
    direction, then evaluate it against the clean-data pair. The loss is
    (G_opt - G(v_perturbed)) / G_opt, averaged over replicates.
    """
    grid = [(s, dn) for s in cfg.noise_sigmas for dn in cfg.row_removals]
    sums = {cell: 0.0 for cell in grid}
    counts = {cell: 0 for cell in grid}

    for r in range(cfg.replicates):
        rep_seed = cfg.seed * 10_000 + r
        table = german_layout_synthetic(rep_seed, n=cfg.n, n_numeric=cfg.m)
        rng = np.random.default_rng(np.random.SeedSequence(rep_seed, spawn_key=(10,)))
        user_spec = [
            _random_factor_tile(table.factors, cfg.m, rng) for _ in range(3)
        ]
        basis_tile = _random_factor_tile(table.factors, cfg.m, rng)

        def resolve(factors):
            tiles = [
                t for ft in user_spec if (t := ft.tile_in(factors)) is not None
            ]
            anchor = basis_tile.tile_in(factors)
            if anchor is None or anchor.rows.size < 2:
                return None, None
            spec = HypothesisSpec(
                rows=anchor.rows,
                partition=tuple(np.array([c]) for c in basis_tile.cols),
            )
            return tiles, spec

        tiles_clean, spec_clean = resolve(table.factors)
        if spec_clean is None:
            continue
        basis, s1, s2 = _solve_pair(table.dataset, tiles_clean, spec_clean)
        v_opt = basis.directions[0]
        g_opt = gain(v_opt, s1, s2)

        for sigma, dn in grid:
            perturbed, factors_p, _ = perturb_table(table, sigma, dn, rep_seed)
            tiles_p, spec_p = resolve(factors_p)
            if spec_p is None:
                continue
            basis_p, _, _ = _solve_pair(perturbed, tiles_p, spec_p)
            v_star = basis_p.directions[0]
            err = (g_opt - gain(v_star, s1, s2)) / g_opt
            sums[(sigma, dn)] += err
            counts[(sigma, dn)] += 1

    header = ["sigma"] + [f"dn={dn}" for dn in cfg.row_removals]
    rows = []
    for sigma in cfg.noise_sigmas:
        row = [sigma]
        for dn in cfg.row_removals:
            c = counts[(sigma, dn)]
            row.append(sums[(sigma, dn)] / c if c else float("nan"))
        rows.append(row)
    return TableResult(
        name="stability",
        header=header,
        rows=rows,
        metadata={"config": cfg.digest(), "seed": cfg.seed},
    )


# ---------------------------------------------------------------------------
# Wall-clock scaling
# ---------------------------------------------------------------------------


def _synthetic_factors(n: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    return {
        "Type": np.array(
            ["rural" if x < 0.72 else "urban" for x in rng.random(n)], dtype=object
        ),
        "State": np.array([f"S{k:02d}" for k in rng.integers(0, 16, n)], dtype=object),
        "Region": np.array(
            [["North", "South", "West", "East"][k] for k in rng.integers(0, 4, n)],
            dtype=object,
        ),
    }


def timing_experiment(cfg: ExperimentConfig) -> TableResult:
    """Median wall-clock seconds to build the constraint model (merges)
    and to solve for the view (covariances + whitened eigenproblem)."""
    rows = []
    for n in cfg.timing_ns:
        for m in cfg.timing_ms:
            t_models, t_views = [], []
            for r in range(cfg.replicates):
                rep_seed = cfg.seed * 10_000 + r
                data = gaussian_dataset(n, m, rep_seed)
                rng = np.random.default_rng(
                    np.random.SeedSequence(rep_seed, spawn_key=(11, n, m))
                )
                factors = _synthetic_factors(n, rng)
                user_spec = [_random_factor_tile(factors, m, rng) for _ in range(3)]
                anchor = _random_factor_tile(factors, m, rng)
                tiles = [
                    t for ft in user_spec if (t := ft.tile_in(factors)) is not None
                ]
                spec = HypothesisSpec(
                    rows=anchor.tile_in(factors).rows,
                    partition=tuple(np.array([c]) for c in anchor.cols),
                )

                t0 = time.perf_counter()
                pair = assemble(tiles, spec, n, m)
                t1 = time.perf_counter()
                y = center(data)
                s1 = analytical_covariance(y, pair.resolved_1)
                s2 = analytical_covariance(y, pair.resolved_2)
                optimal_directions(s1.values, s2.values)
                t2 = time.perf_counter()
                t_models.append(t1 - t0)
                t_views.append(t2 - t1)
            rows.append(
                [n, m, float(np.median(t_models)), float(np.median(t_views))]
            )
    return TableResult(
        name="timing",
        header=["n", "m", "t_model_s", "t_view_s"],
        rows=rows,
        metadata={"config": cfg.digest(), "seed": cfg.seed},
    )


def loglog_slope(volumes, times, floor: float = 1e-5) -> float:
    """Least-squares slope of log(time) against log(n*m)."""
    x = np.log(np.asarray(volumes, dtype=float))
    y = np.log(np.maximum(np.asarray(times, dtype=float), floor))
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# Gain cross-table
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class GainMatrixResult:
    pair_names: list[str]
    direction_names: list[str]
    matrix: np.ndarray  # (len(direction_names), len(pair_names))
    table: TableResult


def gain_matrix(cfg: ExperimentConfig, which_pairs=None) -> GainMatrixResult:
    """Gains of each pair's optimal direction under every other pair,
    plus a correlation-PCA row for reference.

    Pairs: generic objective with and without the planted-cluster tile
    as background, and a focus pair (rural rows, four column groups)
    with and without that tile. `which_pairs` restricts to a subset
    (a single pair degenerates to a 1x1 table).
    """
    table = german_layout_synthetic(cfg.seed, n=cfg.n, n_numeric=cfg.m)
    data = table.dataset
    n, m = data.n_rows, data.n_cols

    suggestion = suggest_attributes(data, table.planted_rows, FOCUS_TAU)
    cluster_tile = Tile(table.planted_rows, np.array(suggestion.included))

    unguided = HypothesisSpec.unguided(n, m)
    focus = HypothesisSpec(
        rows=table.focus_rows, partition=tuple(table.focus_partition)
    )
    pairs = {
        "generic": ([], unguided),
        "generic+tile": ([cluster_tile], unguided),
        "focus": ([], focus),
        "focus+tile": ([cluster_tile], focus),
    }
    if which_pairs is not None:
        unknown = set(which_pairs) - set(pairs)
        if unknown:
            raise ValueError(f"unknown hypothesis pairs: {sorted(unknown)}")
        pairs = {name: pairs[name] for name in which_pairs}

    solved = {}
    for name, (tiles, spec) in pairs.items():
        basis, s1, s2 = _solve_pair(data, tiles, spec)
        solved[name] = (basis.directions[0], s1, s2)

    # Correlation-matrix first principal direction, computed on the same
    # population covariance path the engine uses.
    y = center(data).values
    corr = (y.T @ y) / n
    lam, vecs = np.linalg.eigh(corr)
    v_pca = vecs[:, -1]
    k = int(np.argmax(np.abs(v_pca)))
    if v_pca[k] < 0:
        v_pca = -v_pca

    pair_names = list(pairs)
    direction_names = [f"v[{p}]" for p in pair_names] + ["v[pca]"]
    directions = [solved[p][0] for p in pair_names] + [v_pca]
    matrix = np.zeros((len(directions), len(pair_names)))
    for i, v in enumerate(directions):
        for j, p in enumerate(pair_names):
            _, s1, s2 = solved[p]
            matrix[i, j] = gain(v, s1, s2)

    rows = [
        [direction_names[i]] + [float(matrix[i, j]) for j in range(len(pair_names))]
        for i in range(len(directions))
    ]
    result_table = TableResult(
        name="gains",
        header=["direction"] + pair_names,
        rows=rows,
        metadata={"config": cfg.digest(), "seed": cfg.seed},
    )
    return GainMatrixResult(
        pair_names=pair_names,
        direction_names=direction_names,
        matrix=matrix,
        table=result_table,
    )


# ---------------------------------------------------------------------------
# Toy example
# ---------------------------------------------------------------------------


def toy_example(seed: int = 7, n: int = 500) -> dict:
    """Two scenarios on the A/B/C/D toy.

    Without background knowledge, asking about the C-D relation points
    the view at C+D. Once the A-C and B-D links are known, the same
    question points the view at A and B instead: the C-D relation is
    carried through them.
    """
    data = toy_subsetting(seed, n)
    n_rows = data.n_rows
    all_rows = np.arange(n_rows)
    spec = HypothesisSpec(rows=all_rows, partition=(np.array([2]), np.array([3])))

    basis1, s1a, s2a = _solve_pair(data, [], spec)
    v1 = basis1.directions[0]
    target = np.array([0.0, 0.0, 1.0, 1.0]) / np.sqrt(2)
    cos1 = abs(float(v1 @ target))

    knowledge = [Tile(all_rows, np.array([0, 2])), Tile(all_rows, np.array([1, 3]))]
    basis2, s1b, s2b = _solve_pair(data, knowledge, spec)
    v2 = basis2.directions[0]
    mass_ab = float(v2[0] ** 2 + v2[1] ** 2)

    return {
        "scenario1_direction": v1.tolist(),
        "scenario1_gain": float(gain(v1, s1a, s2a)),
        "scenario1_cos_to_cd": cos1,
        "scenario2_direction": v2.tolist(),
        "scenario2_gain": float(gain(v2, s1b, s2b)),
        "scenario2_mass_on_ab": mass_ab,
        "scenario2_abs_weights": {
            name: abs(float(w)) for name, w in zip(data.column_names, v2)
        },
    }

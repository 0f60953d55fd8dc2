"""Command-line entry point.

Subcommands cover sampling, covariance export, view computation, the
four batch studies, synthetic fixture generation, scripted session
replay, and the HTTP service.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from corand.covariance import analytical_covariance
from corand.dataset import LoadOptions, center, load_csv, save_csv, zscore
from corand.experiments import (
    ExperimentConfig,
    gain_matrix,
    stability_experiment,
    timing_experiment,
    toy_example,
)
from corand.generators import german_layout_synthetic, toy_subsetting
from corand.hypothesis import assemble, pair_spec_from_json
from corand.projection import optimal_directions, project
from corand.sampler import SeededRng, apply, sample_permutation
from corand.session import Session
from corand.tiling import Tile, merge_all, tiling_from_json


def _load_dataset(path: str, do_zscore: bool = False):
    with open(path, "rb") as fh:
        d = load_csv(fh, LoadOptions())
    if do_zscore and d.scaling_state == "raw":
        d = zscore(d, constant_policy="zero")
    return d


def _load_tiling(path: str | None, n: int, m: int):
    if path is None:
        return merge_all([], n, m)
    with open(path) as fh:
        return tiling_from_json(fh.read())


def cmd_sample(args) -> int:
    data = _load_dataset(args.data)
    tiling = _load_tiling(args.tiling, data.n_rows, data.n_cols)
    rng = SeededRng(args.seed)
    for k in range(args.count):
        pv = sample_permutation(tiling, rng)
        out = apply(data, pv)
        save_csv(out, f"{args.out_prefix}{k:04d}.csv")
    print(f"wrote {args.count} permuted datasets to {args.out_prefix}*.csv")
    return 0


def cmd_cov(args) -> int:
    data = _load_dataset(args.data, do_zscore=args.zscore)
    tiling = _load_tiling(args.tiling, data.n_rows, data.n_cols)
    cov = analytical_covariance(center(data), tiling)
    np.savetxt(args.out, cov.values, delimiter=",")
    print(f"wrote {cov.values.shape[0]}x{cov.values.shape[1]} matrix to {args.out}")
    return 0


def cmd_view(args) -> int:
    data = _load_dataset(args.data, do_zscore=args.zscore)
    with open(args.hypothesis) as fh:
        user_tiles, spec = pair_spec_from_json(fh.read())
    if args.tiles:
        with open(args.tiles) as fh:
            extra = tiling_from_json(fh.read())
        user_tiles = user_tiles + extra.tiles()
    pair = assemble(user_tiles, spec, data.n_rows, data.n_cols)
    y = center(data)
    s1 = analytical_covariance(y, pair.resolved_1)
    s2 = analytical_covariance(y, pair.resolved_2)
    basis = optimal_directions(s1.values, s2.values)
    view = project(data, basis)
    np.savetxt(args.out_coords, view.coords, delimiter=",")
    sidecar = {
        "directions": view.directions.tolist(),
        "gains": view.gains.tolist(),
        "axis_labels": view.axis_labels,
    }
    with open(args.out_meta, "w") as fh:
        json.dump(sidecar, fh, indent=2)
    print(f"wrote coords to {args.out_coords} and metadata to {args.out_meta}")
    return 0


def _experiment_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig(seed=args.seed)
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
        cfg = ExperimentConfig(**{**cfg.__dict__, **overrides, "seed": args.seed})
        for name in ("noise_sigmas", "row_removals", "timing_ns", "timing_ms"):
            setattr(cfg, name, tuple(getattr(cfg, name)))
    return cfg


def _write_experiment(args, table, started: float) -> int:
    os.makedirs(args.out, exist_ok=True)
    csv_path = f"{args.out}/{table.name}.csv"
    with open(csv_path, "w") as fh:
        fh.write(table.to_csv_text())
    meta = dict(table.metadata)
    meta["wall_time_s"] = time.perf_counter() - started
    with open(f"{args.out}/{table.name}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
    print(table.render_text())
    print(f"wrote {csv_path}")
    return 0


def cmd_stability(args) -> int:
    t0 = time.perf_counter()
    return _write_experiment(args, stability_experiment(_experiment_config(args)), t0)


def cmd_timing(args) -> int:
    t0 = time.perf_counter()
    return _write_experiment(args, timing_experiment(_experiment_config(args)), t0)


def cmd_gains(args) -> int:
    t0 = time.perf_counter()
    return _write_experiment(args, gain_matrix(_experiment_config(args)).table, t0)


def cmd_toy(args) -> int:
    report = toy_example(seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    with open(f"{args.out}/toy.json", "w") as fh:
        json.dump(report, fh, indent=2)
    print(json.dumps(report, indent=2))
    return 0


def cmd_synth(args) -> int:
    """Write a synthetic fixture CSV plus a JSON sidecar describing the
    planted structure (used by client-side end-to-end tests)."""
    if args.generator == "german-layout":
        table = german_layout_synthetic(args.seed, n=args.n)
        save_csv(table.dataset, args.out)
        meta = {
            "planted_rows": table.planted_rows.tolist(),
            "planted_cols": table.planted_cols.tolist(),
            "planted_names": [
                table.dataset.column_names[j] for j in table.planted_cols
            ],
            "focus_rows": table.focus_rows.tolist(),
            "focus_partition": [b.tolist() for b in table.focus_partition],
            "column_names": table.dataset.column_names,
        }
    elif args.generator == "toy":
        data = toy_subsetting(args.seed, n=args.n)
        save_csv(data, args.out)
        meta = {"column_names": data.column_names}
    else:
        print(f"unknown generator {args.generator}", file=sys.stderr)
        return 2
    if args.meta:
        with open(args.meta, "w") as fh:
            json.dump(meta, fh)
    print(f"wrote {args.out}")
    return 0


def cmd_replay(args) -> int:
    """Run a JSON op script against a fresh session and print the final
    snapshot; the reference path for client replay comparisons."""
    data = _load_dataset(args.data, do_zscore=not args.no_zscore)
    session = Session(data, args.seed)
    with open(args.script) as fh:
        ops = json.load(fh)
    for op in ops:
        kind = op["op"]
        if kind == "commit_tile":
            session.commit_tile(op["rows"], op["cols"], op.get("label", ""))
        elif kind == "set_hypothesis":
            from corand.hypothesis import HypothesisSpec

            session.set_hypothesis(
                HypothesisSpec(rows=op["rows"], partition=tuple(op["partition"]))
            )
        elif kind == "compute_view":
            session.compute_view()
        else:
            print(f"unknown op {kind}", file=sys.stderr)
            return 2
    out = session.snapshot_json(dataset_ref=args.data)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    print(out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from corand.service import ServiceConfig, create_app

    app = create_app(
        ServiceConfig(
            max_upload_bytes=args.max_upload_bytes, snapshot_dir=args.snapshot_dir
        )
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corand")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw permuted datasets allowed by a tiling")
    sp.add_argument("--tiling", default=None)
    sp.add_argument("--data", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--out-prefix", default="sample-")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("cov", help="analytical covariance under a tiling")
    sp.add_argument("--data", required=True)
    sp.add_argument("--tiling", default=None)
    sp.add_argument("--zscore", action="store_true")
    sp.add_argument("--out", default="cov.csv")
    sp.set_defaults(func=cmd_cov)

    sp = sub.add_parser("view", help="most contrastive 2-D projection")
    sp.add_argument("--data", required=True)
    sp.add_argument("--hypothesis", required=True)
    sp.add_argument("--tiles", default=None)
    sp.add_argument("--zscore", action="store_true")
    sp.add_argument("--out-coords", default="coords.csv")
    sp.add_argument("--out-meta", default="view.json")
    sp.set_defaults(func=cmd_view)

    for name, fn in (
        ("stability", cmd_stability),
        ("timing", cmd_timing),
        ("gains", cmd_gains),
    ):
        sp = sub.add_parser(name, help=f"{name} study")
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=f"out-{name}")
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("toy", help="4-attribute toy walkthrough")
    sp.add_argument("--out", default="out-toy")
    sp.add_argument("--seed", type=int, default=7)
    sp.set_defaults(func=cmd_toy)

    sp = sub.add_parser("synth", help="write a synthetic fixture CSV")
    sp.add_argument("--generator", default="german-layout", choices=["german-layout", "toy"])
    sp.add_argument("--n", type=int, default=412)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--meta", default=None)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("replay", help="replay a session op script, print snapshot")
    sp.add_argument("--data", required=True)
    sp.add_argument("--script", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-zscore", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_replay)

    sp = sub.add_parser("serve", help="run the HTTP service")
    env = os.environ
    sp.add_argument("--host", default=env.get("CORAND_HOST", "127.0.0.1"))
    sp.add_argument("--port", type=int, default=int(env.get("CORAND_PORT", "8800")))
    sp.add_argument(
        "--max-upload-bytes",
        type=int,
        default=int(env.get("CORAND_MAX_UPLOAD_BYTES", str(50 * 1024 * 1024))),
    )
    sp.add_argument("--snapshot-dir", default=env.get("CORAND_SNAPSHOT_DIR"))
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

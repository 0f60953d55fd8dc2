"""HTTP/JSON facade over datasets and sessions.

In-memory stores, one writer per session, optimistic versioning on
mutations: a commit must carry the version the client last saw, so a
slow client cannot append a tile against a view it is no longer
looking at. Every engine error maps to exactly one machine-readable
code inside a common error envelope.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from corand.dataset import Dataset, LoadOptions, ParseError, load_csv, save_csv, zscore
from corand.hypothesis import HypothesisSpec
from corand.sampler import SeededRng
from corand.selection import DEFAULT_TAU
from corand.session import Session, restore_session

MAX_COORD_POINTS = 20_000


@dataclass
class ServiceConfig:
    max_upload_bytes: int = 50 * 1024 * 1024
    snapshot_dir: str | None = None
    downsample_seed: int = 17


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message}
        if self.detail is not None:
            body["detail"] = self.detail
        return JSONResponse(status_code=self.status, content=body)


@dataclass
class SessionEntry:
    session: Session
    dataset_id: str
    zscored: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


class Store:
    def __init__(self):
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, SessionEntry] = {}

    def dataset(self, dataset_id: str) -> Dataset:
        if dataset_id not in self.datasets:
            raise ApiError(404, "dataset.not_found", f"no dataset {dataset_id}")
        return self.datasets[dataset_id]

    def entry(self, session_id: str) -> SessionEntry:
        if session_id not in self.sessions:
            raise ApiError(404, "session.not_found", f"no session {session_id}")
        return self.sessions[session_id]


# -- request/response models -------------------------------------------------


class CreateSessionBody(BaseModel):
    dataset_id: str
    seed: int = 0
    zscore: bool = True


class HypothesisBody(BaseModel):
    rows: list[int]
    partition: list[list[int]]
    version: int


class SuggestBody(BaseModel):
    rows: list[int]
    tau: float = DEFAULT_TAU


class TileBody(BaseModel):
    rows: list[int]
    cols: list[int]
    label: str = ""
    version: int


def _check_version(session: Session, version: int) -> None:
    if version != session.version:
        raise ApiError(
            409,
            "session.version_conflict",
            f"expected version {session.version}, got {version}",
            detail={"current_version": session.version},
        )


def _view_payload(session: Session, cfg: ServiceConfig) -> dict:
    view = session.compute_view()
    coords = view.coords
    row_ids = np.arange(coords.shape[0])
    if coords.shape[0] > MAX_COORD_POINTS:
        rng = np.random.default_rng(cfg.downsample_seed)
        row_ids = np.sort(
            rng.choice(coords.shape[0], size=MAX_COORD_POINTS, replace=False)
        )
        coords = coords[row_ids]
    return {
        "version": session.version,
        "directions": view.directions.tolist(),
        "gains": view.gains.tolist(),
        "coords": coords.tolist(),
        "row_ids": row_ids.tolist(),
        "axis_labels": view.axis_labels,
    }


def create_app(cfg: ServiceConfig | None = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    app = FastAPI(title="corand service")
    store = Store()
    app.state.store = store
    app.state.config = cfg

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "validation",
                "message": "request body failed validation",
                "detail": exc.errors(),
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    # -- datasets -------------------------------------------------------------

    @app.post("/datasets", status_code=201)
    async def upload_dataset(
        request: Request,
        delimiter: str = ",",
        header: bool = True,
        na_policy: str = "drop-row",
        categorical: str = "",
        retain: str = "",
    ):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise ApiError(400, "csv.missing_file", "multipart field 'file' required")
            raw = await upload.read()
        else:
            raw = await request.body()
        if len(raw) > cfg.max_upload_bytes:
            raise ApiError(
                413, "dataset.too_large", f"upload exceeds {cfg.max_upload_bytes} bytes"
            )
        options = LoadOptions(
            delimiter=delimiter,
            header=header,
            na_policy=na_policy,
            categorical=tuple(c for c in categorical.split(",") if c),
            retain=tuple(c for c in retain.split(",") if c) or None,
        )
        try:
            dataset = load_csv(raw, options)
        except ParseError as exc:
            raise ApiError(400, "csv.bad_row", str(exc)) from exc
        dataset_id = uuid.uuid4().hex
        store.datasets[dataset_id] = dataset
        return _dataset_summary(dataset_id, dataset)

    def _dataset_summary(dataset_id: str, dataset: Dataset) -> dict:
        return {
            "id": dataset_id,
            "n": dataset.n_rows,
            "m": dataset.n_cols,
            "column_names": dataset.column_names,
            "column_groups": dataset.column_groups,
            "scaling_state": dataset.scaling_state,
            "factors": {
                name: sorted(set(values.tolist()))
                for name, values in dataset.categorical.items()
            },
        }

    @app.get("/datasets/{dataset_id}")
    def dataset_info(dataset_id: str):
        return _dataset_summary(dataset_id, store.dataset(dataset_id))

    @app.get("/datasets/{dataset_id}/factors/{name}")
    def dataset_factor(dataset_id: str, name: str):
        dataset = store.dataset(dataset_id)
        if name not in dataset.categorical:
            raise ApiError(404, "dataset.no_such_factor", f"no factor {name}")
        return {"name": name, "labels": dataset.categorical[name].tolist()}

    # -- sessions -------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session_endpoint(body: CreateSessionBody):
        dataset = store.dataset(body.dataset_id)
        applied_zscore = body.zscore and dataset.scaling_state == "raw"
        if applied_zscore:
            dataset = zscore(dataset, constant_policy="zero")
        try:
            session = Session(dataset, body.seed)
        except ValueError as exc:
            raise ApiError(400, "session.bad_dataset", str(exc)) from exc
        store.sessions[session.id] = SessionEntry(
            session=session, dataset_id=body.dataset_id, zscored=applied_zscore
        )
        return {"id": session.id, "version": session.version, "n": dataset.n_rows, "m": dataset.n_cols}

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        entry = store.entry(session_id)
        s = entry.session
        return {
            "id": s.id,
            "version": s.version,
            "dataset_id": entry.dataset_id,
            "tiles": [
                {
                    "label": lt.label,
                    "n_rows": int(lt.tile.rows.size),
                    "n_cols": int(lt.tile.cols.size),
                }
                for lt in s.user_tiles
            ],
            "hypothesis": {
                "rows": s.current_spec.rows.tolist(),
                "partition": [b.tolist() for b in s.current_spec.partition],
            },
        }

    @app.get("/sessions/{session_id}/view")
    def get_view(session_id: str):
        entry = store.entry(session_id)
        return _view_payload(entry.session, cfg)

    @app.put("/sessions/{session_id}/hypothesis")
    def put_hypothesis(session_id: str, body: HypothesisBody):
        entry = store.entry(session_id)
        with entry.lock:
            _check_version(entry.session, body.version)
            try:
                spec = HypothesisSpec(
                    rows=body.rows, partition=tuple(body.partition)
                )
                entry.session.set_hypothesis(spec)
            except ValueError as exc:
                raise ApiError(400, "hypothesis.invalid", str(exc)) from exc
        return {"version": entry.session.version}

    @app.post("/sessions/{session_id}/suggest")
    def post_suggest(session_id: str, body: SuggestBody):
        entry = store.entry(session_id)
        try:
            suggestion = entry.session.suggest(body.rows, body.tau)
        except ValueError as exc:
            raise ApiError(400, "selection.invalid", str(exc)) from exc
        names = entry.session.dataset.column_names
        return {
            "tau": suggestion.tau,
            "ratios": [
                None if not np.isfinite(r) else float(r) for r in suggestion.ratios
            ],
            "included": suggestion.included,
            "included_names": [names[j] for j in suggestion.included],
            "order": suggestion.order,
        }

    @app.post("/sessions/{session_id}/tiles", status_code=201)
    def post_tile(session_id: str, body: TileBody):
        entry = store.entry(session_id)
        with entry.lock:
            _check_version(entry.session, body.version)
            try:
                entry.session.commit_tile(body.rows, body.cols, body.label)
            except ValueError as exc:
                raise ApiError(400, "tile.invalid", str(exc)) from exc
        return {"version": entry.session.version}

    @app.delete("/sessions/{session_id}/tiles/last")
    def delete_last_tile(session_id: str, version: int):
        entry = store.entry(session_id)
        with entry.lock:
            _check_version(entry.session, version)
            try:
                dropped = entry.session.rollback_last_tile()
            except ValueError as exc:
                raise ApiError(400, "tile.none_to_rollback", str(exc)) from exc
        return {"version": entry.session.version, "dropped_label": dropped.label}

    @app.get("/sessions/{session_id}/pcp")
    def get_pcp(session_id: str, rows: str, tau: float = DEFAULT_TAU):
        entry = store.entry(session_id)
        try:
            row_ids = [int(r) for r in rows.split(",") if r != ""]
            return entry.session.pcp_payload(row_ids, tau)
        except ValueError as exc:
            raise ApiError(400, "selection.invalid", str(exc)) from exc

    @app.get("/sessions/{session_id}/sample")
    def get_sample(session_id: str, which: int, seed: int = 0):
        entry = store.entry(session_id)
        try:
            entry.session.compute_view()
            coords = entry.session.sample_view(which, SeededRng(seed))
        except ValueError as exc:
            raise ApiError(400, "sample.invalid", str(exc)) from exc
        out = coords
        row_ids = np.arange(out.shape[0])
        if out.shape[0] > MAX_COORD_POINTS:
            rng = np.random.default_rng(cfg.downsample_seed)
            row_ids = np.sort(rng.choice(out.shape[0], size=MAX_COORD_POINTS, replace=False))
            out = out[row_ids]
        return {
            "which": which,
            "seed": seed,
            "coords": out.tolist(),
            "row_ids": row_ids.tolist(),
            "version": entry.session.version,
        }

    @app.get("/sessions/{session_id}/snapshot")
    def get_snapshot(session_id: str):
        entry = store.entry(session_id)
        return entry.session.snapshot(dataset_ref=entry.dataset_id)

    # -- snapshot-to-disk ------------------------------------------------------

    @app.post("/admin/snapshot")
    def save_snapshot():
        if not cfg.snapshot_dir:
            raise ApiError(400, "snapshot.disabled", "no snapshot dir configured")
        os.makedirs(cfg.snapshot_dir, exist_ok=True)
        for dataset_id, dataset in store.datasets.items():
            save_csv(dataset, os.path.join(cfg.snapshot_dir, f"dataset-{dataset_id}.csv"))
        manifest = {
            sid: {
                "snapshot": entry.session.snapshot(dataset_ref=entry.dataset_id),
                "zscored": entry.zscored,
            }
            for sid, entry in store.sessions.items()
        }
        path = os.path.join(cfg.snapshot_dir, "sessions.json")
        with open(path, "w") as fh:
            json.dump(manifest, fh)
        return {"datasets": len(store.datasets), "sessions": len(store.sessions)}

    @app.post("/admin/restore")
    def load_snapshot():
        if not cfg.snapshot_dir:
            raise ApiError(400, "snapshot.disabled", "no snapshot dir configured")
        path = os.path.join(cfg.snapshot_dir, "sessions.json")
        if not os.path.exists(path):
            raise ApiError(404, "snapshot.missing", "no saved snapshot found")
        with open(path) as fh:
            manifest = json.load(fh)
        restored = 0
        for sid, record in manifest.items():
            snap = record["snapshot"]
            dataset_id = snap.get("dataset_ref", "")
            csv_path = os.path.join(cfg.snapshot_dir, f"dataset-{dataset_id}.csv")
            if not os.path.exists(csv_path):
                continue
            with open(csv_path, "rb") as fh:
                dataset = load_csv(fh)
            store.datasets[dataset_id] = dataset
            if record.get("zscored"):
                dataset = zscore(dataset, constant_policy="zero")
            session = restore_session(snap, dataset)
            session.id = sid
            store.sessions[sid] = SessionEntry(
                session=session, dataset_id=dataset_id, zscored=bool(record.get("zscored"))
            )
            restored += 1
        return {"sessions": restored}

    return app

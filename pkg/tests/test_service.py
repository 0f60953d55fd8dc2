import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from corand.dataset import save_csv
from corand.generators import german_layout_synthetic
from corand.service import ServiceConfig, create_app

CSV = "a,b,c\n" + "\n".join(
    ",".join(str(v) for v in row)
    for row in np.random.default_rng(5).standard_normal((30, 3)).tolist()
)


@pytest.fixture
def client(tmp_path):
    app = create_app(ServiceConfig(snapshot_dir=str(tmp_path / "snap")))
    return TestClient(app)


def upload(client, text=CSV, **params):
    return client.post(
        "/datasets", content=text, params=params, headers={"content-type": "text/csv"}
    )


def make_session(client, **kwargs):
    dataset_id = upload(client).json()["id"]
    resp = client.post("/sessions", json={"dataset_id": dataset_id, "seed": 1, **kwargs})
    assert resp.status_code == 201
    return resp.json()["id"]


def test_upload_returns_summary(client):
    resp = upload(client)
    assert resp.status_code == 201
    body = resp.json()
    assert body["n"] == 30 and body["m"] == 3
    assert body["column_names"] == ["a", "b", "c"]


def test_upload_multipart(client):
    resp = client.post("/datasets", files={"file": ("d.csv", CSV, "text/csv")})
    assert resp.status_code == 201
    assert resp.json()["m"] == 3


def test_upload_bad_row_is_400_with_code(client):
    resp = upload(client, text="a,b\n1,2\n3\n")
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "csv.bad_row"
    assert "line 3" in body["message"]


def test_upload_too_large_is_413(tmp_path):
    app = create_app(ServiceConfig(max_upload_bytes=10))
    client = TestClient(app)
    resp = upload(client)
    assert resp.status_code == 413
    assert resp.json()["code"] == "dataset.too_large"


def test_duplicate_uploads_get_distinct_ids(client):
    a = upload(client).json()["id"]
    b = upload(client).json()["id"]
    assert a != b


def test_unknown_session_404(client):
    resp = client.get("/sessions/nope/view")
    assert resp.status_code == 404
    assert resp.json()["code"] == "session.not_found"


def test_fresh_view_is_correlation_pca(client):
    sid = make_session(client)
    view = client.get(f"/sessions/{sid}/view").json()
    dirs = np.array(view["directions"])
    assert dirs.shape == (2, 3)
    assert len(view["coords"]) == 30
    assert view["gains"][0] >= view["gains"][1]
    assert len(view["axis_labels"][0]) == 3  # top-5 capped at m


def test_tile_commit_bumps_version_and_recomputes(client):
    sid = make_session(client)
    v0 = client.get(f"/sessions/{sid}/view").json()
    resp = client.post(
        f"/sessions/{sid}/tiles",
        json={"rows": [0, 1, 2, 3], "cols": [0, 1], "label": "block", "version": v0["version"]},
    )
    assert resp.status_code == 201
    assert resp.json()["version"] == v0["version"] + 1
    v1 = client.get(f"/sessions/{sid}/view").json()
    assert v1["version"] == v0["version"] + 1


def test_stale_version_commit_is_409(client):
    sid = make_session(client)
    v0 = client.get(f"/sessions/{sid}/view").json()
    body = {"rows": [0, 1], "cols": [0], "label": "x", "version": v0["version"]}
    assert client.post(f"/sessions/{sid}/tiles", json=body).status_code == 201
    resp = client.post(f"/sessions/{sid}/tiles", json=body)
    assert resp.status_code == 409
    assert resp.json()["code"] == "session.version_conflict"


def test_delete_last_tile_roundtrip(client):
    sid = make_session(client)
    version = client.get(f"/sessions/{sid}/view").json()["version"]
    client.post(
        f"/sessions/{sid}/tiles",
        json={"rows": [0, 1], "cols": [0], "label": "t", "version": version},
    )
    resp = client.delete(f"/sessions/{sid}/tiles/last", params={"version": version + 1})
    assert resp.status_code == 200
    assert resp.json()["dropped_label"] == "t"
    resp = client.delete(f"/sessions/{sid}/tiles/last", params={"version": version + 2})
    assert resp.status_code == 400  # nothing left to roll back


def test_hypothesis_update_and_validation(client):
    sid = make_session(client)
    version = client.get(f"/sessions/{sid}").json()["version"]
    ok = client.put(
        f"/sessions/{sid}/hypothesis",
        json={"rows": list(range(10)), "partition": [[0], [1, 2]], "version": version},
    )
    assert ok.status_code == 200
    bad = client.put(
        f"/sessions/{sid}/hypothesis",
        json={"rows": [0], "partition": [[0], [0]], "version": ok.json()["version"]},
    )
    assert bad.status_code == 400
    assert bad.json()["code"] == "hypothesis.invalid"


def test_suggest_endpoint(client):
    sid = make_session(client)
    resp = client.post(f"/sessions/{sid}/suggest", json={"rows": [0, 1, 2], "tau": 0.9})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["ratios"]) == 3
    assert set(body["included"]) == {j for j in body["order"] if body["ratios"][j] < 0.9}


def test_pcp_endpoint(client):
    sid = make_session(client)
    resp = client.get(f"/sessions/{sid}/pcp", params={"rows": "0,1,2", "tau": 0.5})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["order"]) == 3
    assert len(body["values"]) == 30
    assert client.get(f"/sessions/{sid}/pcp", params={"rows": "", "tau": 0.5}).status_code == 400


def test_sample_deterministic_in_seed(client):
    sid = make_session(client)
    client.get(f"/sessions/{sid}/view")
    a = client.get(f"/sessions/{sid}/sample", params={"which": 2, "seed": 3}).json()
    b = client.get(f"/sessions/{sid}/sample", params={"which": 2, "seed": 3}).json()
    assert a == b
    c = client.get(f"/sessions/{sid}/sample", params={"which": 1, "seed": 4}).json()
    assert c["coords"] != a["coords"]


def test_view_json_round_trip_precision(client):
    sid = make_session(client)
    view = client.get(f"/sessions/{sid}/view").json()
    dirs = np.array(view["directions"])
    # serialization keeps full double precision: unit norms survive
    assert np.linalg.norm(dirs[0]) == pytest.approx(1.0, abs=1e-12)
    text = json.dumps(view)
    again = np.array(json.loads(text)["directions"])
    assert np.array_equal(again, dirs)


def test_snapshot_endpoint_and_disk_round_trip(client):
    sid = make_session(client)
    version = client.get(f"/sessions/{sid}").json()["version"]
    client.post(
        f"/sessions/{sid}/tiles",
        json={"rows": [0, 1, 2], "cols": [0, 2], "label": "k", "version": version},
    )
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["tiles"][0]["rows"] == [0, 1, 2]
    view_before = client.get(f"/sessions/{sid}/view").json()

    assert client.post("/admin/snapshot").json()["sessions"] == 1
    assert client.post("/admin/restore").json()["sessions"] == 1
    view_after = client.get(f"/sessions/{sid}/view").json()
    assert np.allclose(view_after["directions"], view_before["directions"], atol=1e-9)


def test_large_dataset_coords_downsampled(client):
    rng = np.random.default_rng(0)
    n = 21_000
    text = "a,b\n" + "\n".join(f"{x},{y}" for x, y in rng.standard_normal((n, 2)))
    dataset_id = upload(client, text=text).json()["id"]
    sid = client.post("/sessions", json={"dataset_id": dataset_id, "seed": 0}).json()["id"]
    view = client.get(f"/sessions/{sid}/view").json()
    assert len(view["coords"]) == 20_000
    assert len(view["row_ids"]) == 20_000
    assert view["row_ids"] == sorted(view["row_ids"])
    # deterministic: the same seeded downsample on every call
    again = client.get(f"/sessions/{sid}/view").json()
    assert again["row_ids"] == view["row_ids"]


def test_session_on_factor_dataset(client, tmp_path):
    table = german_layout_synthetic(seed=1, n=60)
    path = tmp_path / "table.csv"
    save_csv(table.dataset, str(path))
    resp = upload(client, text=path.read_text())
    assert resp.status_code == 201
    body = resp.json()
    assert body["m"] == 32

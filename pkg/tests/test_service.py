import math

import pytest
from fastapi.testclient import TestClient

from wedgekit.reports import dump_json
from wedgekit.service import app

client = TestClient(app)


def test_health():
    body = client.get("/health").json()
    assert body["service"] == "wedgekit"
    assert body["schema_version"] == "1"


class TestKernelEndpoint:
    def test_point_evaluation(self):
        resp = client.post("/kernel", json={"points": ["0"], "list_poles": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "PASS"
        row = body["results"]["rows"][0]
        assert row[2] == pytest.approx(0.25)
        assert [0.0, 1.0] in body["results"]["poles"]

    def test_grid_rows(self):
        resp = client.post("/kernel", json={"grid": "-1:1:0.5,-0.3:0.3:0.3"})
        body = resp.json()
        assert len(body["results"]["rows"]) == 5 * 3
        assert body["results"]["columns"][0] == "re_z"

    def test_bad_point_is_client_error(self):
        resp = client.post("/kernel", json={"points": ["zorp"]})
        assert resp.status_code == 400

    def test_unknown_field_rejected(self):
        resp = client.post("/kernel", json={"pointz": ["0"]})
        assert resp.status_code == 422


class TestGeometryEndpoint:
    def test_lightcone_scan_thresholds(self):
        payload = {
            "carrier": {"kind": "lightcone4d", "ell": 1.0, "samples": 20_000},
            "r": "auto",
            "scan_dist": "0:6:0.5",
            "seed": 0,
        }
        body = client.post("/geometry", json=payload).json()
        assert body["status"] == "PASS"
        threshold = math.sqrt(2.0) + 1.0
        for row in body["results"]["rows"]:
            if row["dist"] > threshold * 1.01:
                assert row["member"]
            if row["dist"] < threshold * 0.99:
                assert not row["member"]
        assert body["results"]["thresholds"]["cone_distance"] == pytest.approx(threshold)

    def test_determinism_byte_identical(self):
        payload = {
            "carrier": {"kind": "lightcone4d", "ell": 1.0, "samples": 5_000},
            "r": "auto",
            "scan_dist": "0:3:1",
            "seed": 7,
        }
        a = client.post("/geometry", json=payload).json()
        b = client.post("/geometry", json=payload).json()
        assert dump_json(a) == dump_json(b)

    def test_box_scan(self):
        payload = {
            "carrier": {"kind": "box1d", "a": -0.1, "b": 0.1, "ell": 0.5},
            "r": 1.0,
            "scan_x": "-3:3:0.5",
        }
        body = client.post("/geometry", json=payload).json()
        rows = body["results"]["csv_rows"]
        assert all(len(r) == 3 for r in rows)


class TestReproduceEndpoint:
    def test_pass(self):
        body = client.post(
            "/reproduce", json={"phi": "gaussian:0,1", "r": 1.0, "R": 0.5, "t": 0.0}
        ).json()
        assert body["status"] == "PASS"
        assert body["results"]["residual"] < 1e-6

    def test_invalid_shift(self):
        resp = client.post("/reproduce", json={"r": 1.0, "R": 2.0})
        assert resp.status_code == 400


class TestGlobalEowEndpoint:
    def test_polynomial_fixture_passes(self):
        body = client.post("/global-eow", json={"f1": "poly:0,2,0,1"}).json()
        assert body["status"] == "PASS"
        assert body["results"]["reconstruction"]["passed"]
        assert body["results"]["boundary_match"]["passed"]

    def test_pole_fixture_fails_loudly(self):
        body = client.post("/global-eow", json={"f1": "rational:0.5i", "ell": 0.6}).json()
        assert body["status"] == "FAIL"
        assert "overlap" in body["failures"][0]
        assert body["results"]["overlap"]["max_deviation"] > 1e-2


class TestLocalEowEndpoint:
    def test_small_run(self):
        payload = {
            "masses": "1@0.3i",
            "box": [-0.1, 0.1, 0.5],
            "r": 1.0,
            "xis": [2.0],
            "tolerance": 1e-4,
            "ladder": {"start": 0.25, "ratio": 0.5, "rungs": 12, "order": 2},
            "path_step": 0.02,
        }
        body = client.post("/local-eow", json=payload).json()
        assert body["status"] == "PASS"
        probe = body["results"]["probes"][0]
        assert probe["oracle_deviation"] < 1e-4

    def test_probe_inside_band_rejected(self):
        payload = {"masses": "1@0.3i", "box": [-0.1, 0.1, 0.5], "xis": [0.0]}
        resp = client.post("/local-eow", json=payload)
        assert resp.status_code == 400


class TestCarrierProbeEndpoint:
    def test_verdicts_match_expectation(self):
        payload = {"masses": "1@0.5i", "xis": [1.0, 0.6, 0.4, 0.0]}
        body = client.post("/carrier-probe", json=payload).json()
        assert body["status"] == "PASS"
        for row in body["results"]["probes"]:
            assert row["verdict"] == row["expected"]

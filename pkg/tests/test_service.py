import time

import pytest
from fastapi.testclient import TestClient

from contractforge import Direction, compose, new_contract, optimize, render
from contractforge.contract_io import contract_to_dict
from contractforge.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


C1 = {"input_vars": ["i"], "output_vars": ["o"],
      "assumptions": ["|i| <= 2"], "guarantees": ["o - i <= 0", "i - 2o <= 2"]}
C2 = {"input_vars": ["o"], "output_vars": ["o_p"],
      "assumptions": ["o <= 0.2", "-o <= 1"], "guarantees": ["o_p - o <= 0"]}
C1N = {"input_vars": ["i"], "output_vars": ["o"],
       "assumptions": ["|i| <= 2"], "guarantees": ["|o| <= 3"]}


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    assert r.json() == {"ok": True}


def test_compose_matches_library(client):
    r = client.post("/api/compose", json={"contracts": [C1, C2]})
    assert r.status_code == 200
    body = r.json()
    assert body["ok"] and body["elapsed_ms"] >= 0
    from contractforge.contract_io import contract_from_dict

    direct = compose(contract_from_dict(C1), contract_from_dict(C2))
    assert body["result"] == contract_to_dict(direct)


def test_compose_diagnostic_422(client):
    r = client.post("/api/compose", json={"contracts": [C1N, C2]})
    assert r.status_code == 422
    body = r.json()
    assert body["ok"] is False
    assert body["diagnostic"]["variables"] == ["o"]
    assert set(body["diagnostic"]["failed_terms"]) == {"o <= 0.2", "-o <= 1"}


def test_malformed_body_400(client):
    r = client.post("/api/compose", content=b"not json",
                    headers={"content-type": "application/json"})
    assert r.status_code == 400
    r2 = client.post("/api/compose", json={"contracts": [C1]})
    assert r2.status_code == 400


def test_quotient_merge_refines_bounds_optimize(client):
    top = {"input_vars": ["i"], "output_vars": ["o_p"],
           "assumptions": ["|i| <= 1"], "guarantees": ["o_p - 2i = 1"]}
    part = {"input_vars": ["i"], "output_vars": ["o"],
            "assumptions": ["|i| <= 2"], "guarantees": ["o - 2i = 0"]}
    r = client.post("/api/quotient", json={"contracts": [top, part]})
    assert r.status_code == 200
    assert "-o + o_p = 1" in r.json()["result"]["guarantees"]

    fv = {"input_vars": ["i"], "output_vars": ["o"],
          "assumptions": ["|i| <= 2"], "guarantees": ["o - 2i = 1"]}
    pv = {"input_vars": ["temp"], "output_vars": ["P"],
          "assumptions": ["temp <= 90"], "guarantees": ["P <= 2.1"]}
    r = client.post("/api/merge", json={"contracts": [fv, pv]})
    assert r.status_code == 200
    assert r.json()["result"]["compatible"] is True

    r = client.post("/api/refines", json={"contracts": [C1, C1]})
    assert r.status_code == 200 and r.json()["result"]["refines"] is True

    sys_contract = r.json()
    r = client.post("/api/bounds", json={
        "contracts": [{"input_vars": ["u"], "output_vars": ["x"],
                       "assumptions": [], "guarantees": ["x = 5"]}],
        "options": {"var": "x"}})
    assert r.json()["result"] == {"var": "x", "lower": 5.0, "upper": 5.0}

    r = client.post("/api/optimize", json={
        "contracts": [{"input_vars": ["u"], "output_vars": ["x"],
                       "assumptions": ["u <= 3"], "guarantees": ["x - u = 1"]}],
        "options": {"expr": "x", "direction": "max"}})
    assert r.json()["result"]["value"] == pytest.approx(4.0, abs=1e-6)


def test_mission_schedulability_endpoint(client):
    r = client.post("/api/mission/schedulability", json={"options": {
        "requirements": {"min_soc": 50.0, "min_step_duration": 10.0,
                         "initial_data_volume": 80.0, "initial_uncertainty": 50.0},
    }})
    assert r.status_code == 200
    body = r.json()["result"]
    assert body["admissible"] is True
    assert len(body["soc_bounds"]) == 5


def test_aircraft_evaluate_latency_and_content(client):
    started = time.perf_counter()
    r = client.post("/api/aircraft/evaluate", json={"options": {
        "alt": 15, "thrust": 20000, "mdot_in": 9.316, "mdot_a": 0.429,
        "eps": 0.01, "hx": "controlled"}})
    elapsed = (time.perf_counter() - started) * 1000
    assert r.status_code == 200
    assert elapsed < 3000.0
    body = r.json()["result"]
    assert body["te_bounds"] is not None
    assert body["tout_bounds"][0] == pytest.approx(277.24, abs=1e-6)


def test_aircraft_explore_endpoint(client):
    r = client.post("/api/aircraft/explore", json={"options": {
        "altitudes": [10], "thrusts": [10000], "mdot_in": [16, 32],
        "mdot_a": [0.4], "hx": "controlled"}})
    assert r.status_code == 200
    rows = r.json()["result"]
    assert len(rows) == 2
    assert any(row["valid"] for row in rows)


def test_mdot_precondition_maps_to_400(client):
    r = client.post("/api/aircraft/evaluate", json={"options": {
        "alt": 10, "thrust": 20000, "mdot_in": 2.0, "mdot_a": 0.4}})
    assert r.status_code == 400
    assert r.json()["ok"] is False

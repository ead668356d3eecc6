"""HTTP service endpoints and the thin CLI on top of them."""

import importlib
import json
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # test-client import deprecation noise
    from fastapi.testclient import TestClient

from kthodge import cli
from kthodge.hodge_engine import HodgeDiamond
from kthodge.service import app
from kthodge.spectral_oracle import VerifyRow


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


# --- service ------------------------------------------------------------------------


def test_health(client):
    payload = client.get("/health").json()
    assert payload["status"] == "ok"
    assert payload["package"] == "kthodge"


def test_diamond_endpoint_round_trip(client):
    response = client.post("/diamond", json={"a": "0", "d": "5/2"})
    assert response.status_code == 200
    payload = response.json()
    assert payload["h"][0][1] == 6
    assert payload["h"][1][1] == 3
    # re-parse and re-validate: HodgeDiamond checks duality on construction
    rebuilt = HodgeDiamond(
        tuple(tuple(row) for row in payload["h"]),
        tuple(tuple(row) for row in payload["provenance"]),
    )
    assert rebuilt.entry(0, 1) == 6


def test_diamond_rejects_deformed_metric(client):
    response = client.post("/diamond", json={"d": "5/2", "metric": "rho"})
    assert response.status_code == 400


def test_lattice_count_endpoint(client):
    payload = client.post("/lattice-count", json={"d": "5/2"}).json()
    assert payload["count"] == 6
    assert payload["formula_count"] == 6
    assert [0, 0] in payload["points"]
    assert payload["points"] == sorted(payload["points"])


def test_lattice_count_large_denominator_is_enumeration_only(client):
    payload = client.post("/lattice-count", json={"d": "1/7"}).json()
    assert payload["formula_status"] == "unsupported_denominator"
    assert payload["count"] == 1


def test_ode_check_standard(client):
    response = client.post("/ode-check", json={"d": "5/2", "n": 1})
    assert response.status_code == 200
    payload = response.json()
    assert payload["criterion"]["verdict"] == "not_solvable"
    assert payload["kernel"] == {"method": "fd", "dim": 0, "diagnostic": payload["kernel"]["diagnostic"]}
    assert payload["agree"] is True


def test_ode_check_deformed_routes_to_ratio(client):
    payload = client.post(
        "/ode-check", json={"d": "5/3", "metric": "rho", "r": "1", "n": 1}
    ).json()
    assert payload["kernel"]["method"] == "ratio"
    assert payload["matching"]["verdict"] == "inconclusive"
    assert payload["matching"]["floor"] < 1e-12


def test_ode_check_disagreement_maps_to_409(client, monkeypatch):
    service_app = importlib.import_module("kthodge.service.app")
    monkeypatch.setattr(service_app, "routed_kernel_dim", lambda sysx, tol: (1, 0.0, "fd"))
    response = client.post("/ode-check", json={"d": "5/2", "n": 1})
    assert response.status_code == 409
    assert "disagree" in response.json()["detail"] or "criterion" in response.json()["detail"]


def test_schinzel_endpoint(client):
    payload = client.post("/schinzel", json={"target": 6}).json()
    assert payload == {"target": 6, "status": "reachable", "d": "5/2", "realized_count": 6}
    payload = client.post("/schinzel", json={"target": 8}).json()
    assert payload["status"] == "unreachable"
    assert client.post("/schinzel", json={"target": 0}).status_code == 400


def test_surd_endpoint(client):
    payload = client.post("/surd", json={"n": 1, "u": -1}).json()
    assert payload["h01"] == 3
    assert payload["disc"] == 257
    assert payload["quartic_residual"] < 1e-12
    assert client.post("/surd", json={"n": 1, "u": 0}).status_code == 400


def test_ks_demo_endpoint(client):
    payload = client.post("/ks-demo", json={"K": 3}).json()
    assert payload == {"K": 3, "d": "5/3", "standard": 3, "rho": 1}
    assert client.post("/ks-demo", json={"K": 2}).status_code == 400


def test_verify_endpoint_sectors(client):
    payload = client.post("/verify", json={"d": "5/2", "nmax": 1}).json()
    assert payload["all_agree"] is True
    assert len(payload["rows"]) == 6
    assert all(row["method"] == "fd" for row in payload["rows"])


def test_verify_endpoint_random(client):
    payload = client.post("/verify", json={"mode": "random", "count": 4, "seed": 1}).json()
    assert payload["all_agree"] is True
    assert len(payload["rows"]) == 4


def test_input_validation_maps_to_400(client):
    assert client.post("/diamond", json={"d": "x/y"}).status_code == 400
    assert client.post("/diamond", json={"d": "0"}).status_code == 400
    assert client.post("/diamond", json={"d": "1", "metric": "weird"}).status_code == 400
    assert client.post("/ode-check", json={"d": "5/2", "n": 0}).status_code == 400
    assert client.post("/verify", json={"mode": "sectors"}).status_code == 400


def test_resource_guards_map_to_400(client):
    assert client.post("/lattice-count", json={"d": "10000000000/3"}).status_code == 400
    assert client.post("/ks-demo", json={"K": 41}).status_code == 400
    assert client.post("/verify", json={"mode": "random", "count": 10**6}).status_code == 400


# --- CLI ------------------------------------------------------------------------------


def run_cli(argv, capsys):
    code = cli.run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cli_diamond_json(capsys):
    code, out, _ = run_cli(["diamond", "--a", "0", "--d", "5/2", "--json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["h"][0][1] == 6


def test_cli_diamond_table(capsys):
    code, out, _ = run_cli(["diamond", "--d", "1/2"], capsys)
    assert code == 0
    assert "1  3  1" in out
    assert "h^(0,1) = 2" in out


def test_cli_b_over_8pi_alias(capsys):
    code, out, _ = run_cli(["lattice-count", "--b-over-8pi", "5/2", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["count"] == 6


def test_cli_ks_demo_table(capsys):
    code, out, _ = run_cli(["ks-demo", "--K", "3", "--r", "1"], capsys)
    assert code == 0
    assert "standard: 3" in out
    assert "rho:      1" in out


def test_cli_deterministic_output(capsys):
    _, first, _ = run_cli(["verify", "--d", "5/2", "--nmax", "1", "--json"], capsys)
    _, second, _ = run_cli(["verify", "--d", "5/2", "--nmax", "1", "--json"], capsys)
    assert first == second


def test_cli_input_error_exit_2(capsys):
    code, _, err = run_cli(["diamond", "--d", "x/y"], capsys)
    assert code == 2
    assert "error" in err


def test_cli_surd_table(capsys):
    code, out, _ = run_cli(["surd", "--n", "1", "--u", "-1"], capsys)
    assert code == 0
    assert "sqrt(257)" in out
    assert "h^(0,1) = 3" in out


def test_cli_verify_disagreement_exit_3(capsys, monkeypatch):
    service_app = importlib.import_module("kthodge.service.app")
    fake = [VerifyRow(label="random[0]", criterion="solvable", oracle_dim=0, sigma_min=1.0, agree=False)]
    monkeypatch.setattr(service_app, "verify_random", lambda count, seed, tol: fake)
    code, out, _ = run_cli(["verify", "--random", "1"], capsys)
    assert code == 3
    assert "all agree: NO" in out


def test_cli_oracle_disagreement_exit_3(capsys, monkeypatch):
    service_app = importlib.import_module("kthodge.service.app")
    monkeypatch.setattr(service_app, "routed_kernel_dim", lambda sysx, tol: (1, 0.0, "fd"))
    code, _, err = run_cli(["ode-check", "--d", "5/2", "--n", "1"], capsys)
    assert code == 3
    assert "disagreement" in err

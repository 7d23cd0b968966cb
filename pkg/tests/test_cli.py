from __future__ import annotations

import json
import math

import numpy as np
import pytest

from weaverkit import config, jsonio
from weaverkit.cli import main


@pytest.fixture(autouse=True)
def _restore_config(monkeypatch):
    # --tol-profile writes into the config module; undo it after each test
    for key in ("CERT_SLACK", "PARSEVAL_TOL", "PROJECTION_TOL"):
        monkeypatch.setattr(config, key, getattr(config, key))


def write(tmp_path, name, obj) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def files(tmp_path, mercedes):
    return {
        "mercedes": write(tmp_path, "mercedes.json", jsonio.vectors_to_json(mercedes)),
        "onb": write(tmp_path, "onb2.json", jsonio.vectors_to_json(np.eye(2))),
        "halfproj": write(tmp_path, "halfproj2.json", jsonio.matrix_to_json(np.full((2, 2), 0.5))),
        "zero": write(tmp_path, "zero.json", jsonio.matrix_to_json(np.zeros((3, 3)))),
        "diag": write(tmp_path, "diag.json", jsonio.matrix_to_json(np.diag([0.3, 0.3]))),
        "mcp": write(tmp_path, "mcp.json", {"matrices": [jsonio.matrix_to_json(np.eye(2) / 2)] * 2}),
    }


def test_weaver(files, capsys):
    code, rep = run(["weaver", files["mercedes"], "--r", "2", "--verify"], capsys)
    assert code == 0 and rep["ok"]
    assert max(rep["certificate"]["per_block_bessel"]) == pytest.approx(1.0, abs=1e-9)
    assert rep["verify"]["ok"]
    code, rep = run(["weaver", files["onb"], "--r", "2"], capsys)
    assert code == 0 and rep["certificate"]["per_block_bessel"] == pytest.approx([1.0, 1.0])


def test_bad_input_exit_codes(tmp_path, files, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = run(["weaver", str(bad)], capsys)
    assert code == 2 and rep["error"]["type"] == "InvalidInput"
    code, _ = run(["weaver", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    code, _ = run(["pave", files["diag"], "--class", "projection-half"], capsys)
    assert code == 2


def test_budget_exit_code(files, capsys):
    code, rep = run(["certify-mcp", files["mcp"], "--budget", "3"], capsys)
    assert code == 3 and rep["error"]["type"] == "BudgetExceeded"


def test_pave(files, capsys):
    code, rep = run(["pave", files["halfproj"], "--class", "projection-half", "--r", "2", "--verify"], capsys)
    assert code == 0 and rep["certificate"]["achieved"] == pytest.approx([0.5, 0.5])
    assert rep["verify"]["ok"]
    code, rep = run(["pave", files["zero"], "--class", "bounded"], capsys)
    assert code == 0 and rep["certificate"]["achieved"] == [0.0]


def test_certify_mcp(files, capsys):
    code, rep = run(["certify-mcp", files["mcp"], "--verify"], capsys)
    c = rep["certificate"]
    assert code == 0 and c["ok"]
    assert c["achieved_maxroot"] == pytest.approx(1 + 1 / math.sqrt(2), abs=1e-9)
    assert c["claimed_bound"] == pytest.approx(4.0)


def test_fourier(tmp_path, capsys):
    code, rep = run(["fourier", "--intervals", "0,0.5", "--N", "3"], capsys)
    assert code == 0
    G = jsonio.matrix_from_json(rep["certificate"]["gram"])
    assert G.shape == (7, 7) and np.all(np.diag(G).real == 0.5)
    path = write(tmp_path, "f.json", {"intervals": [[0, 0.5]], "N": 3})
    code, rep2 = run(["fourier", path], capsys)
    assert code == 0 and rep2["certificate"]["gram"] == rep["certificate"]["gram"]


def test_oracle(files, capsys):
    code, rep = run(["oracle", files["mercedes"], "--r", "2"], capsys)
    assert code == 0 and rep["certificate"]["optimum"] == pytest.approx(1.0, abs=1e-12)


def test_frames_commands(tmp_path, files, capsys):
    code, rep = run(["complement", files["mercedes"], "--subset", "0,1"], capsys)
    assert code == 0
    code, rep = run(["repsilon", files["onb"], "--eps", "0.5", "--verify"], capsys)
    assert code == 0 and rep["verify"]["ok"]
    code, rep = run(["bt", files["halfproj"], "--eps", "0.5"], capsys)
    assert code == 2  # columns of the half projection are not unit vectors
    path = write(tmp_path, "u.json", jsonio.matrix_to_json(np.eye(3)))
    code, rep = run(["bt", path, "--eps", "0.5"], capsys)
    assert code == 0
    code, rep = run(["feichtinger", files["onb"], "--eps", "1.0"], capsys)
    assert code == 0 and len(rep["certificate"]["per_block_riesz"]) == 1


def test_gen_is_deterministic(tmp_path, capsys):
    outs = []
    for _ in range(2):
        code, _ = run(["gen", "parseval", "--seed", "7", "--d", "2", "--m", "4",
                       "--out", str(tmp_path / "g.json")], capsys)
        assert code == 0
        outs.append((tmp_path / "g.json").read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "h.json"
    main(["gen", "parseval", "--seed", "8", "--d", "2", "--m", "4", "--out", str(other)])
    assert other.read_bytes() != outs[0]


def test_reports_are_byte_identical(files, capsys):
    main(["weaver", files["mercedes"], "--r", "2"])
    a = capsys.readouterr().out
    main(["--seed", "0", "weaver", files["mercedes"], "--r", "2"])
    b = capsys.readouterr().out
    assert a == b
    assert json.loads(a)["inputs"]


def test_generated_instance_round_trip(tmp_path, capsys):
    out = tmp_path / "mcp.json"
    assert main(["gen", "mcp", "--seed", "3", "--d", "2", "--m", "3", "--out", str(out)]) == 0
    inst = json.loads(out.read_text())["certificate"]["instance"]
    path = write(tmp_path, "inst.json", inst)
    code, rep = run(["certify-mcp", path, "--tol-profile", "strict"], capsys)
    assert code == 0 and rep["certificate"]["ok"]

import json

import numpy as np
import pytest

from boundkey import io as bio
from boundkey.cli import main
from boundkey.dist import JointDistribution3
from boundkey.fixtures import fixture_channel_json, fixture_distribution_json, load_fixture
from boundkey.report import reproduce


@pytest.fixture
def fx_files(tmp_path):
    fx = load_fixture("4x5")
    bio.write_json(tmp_path / "4x5.json", fixture_distribution_json(fx))
    bio.write_json(tmp_path / "4x5_q.json", fixture_channel_json(fx))
    bio.write_json(tmp_path / "4x5_diagram.json", fx.diagram.to_json())
    bio.write_json(tmp_path / "4x5_pab.json", {"P_AB": [list(r) for r in fx.pab_text]})
    return tmp_path


def test_keyrate(fx_files, capsys):
    assert main(["keyrate", str(fx_files / "4x5.json"), "--channel", str(fx_files / "4x5_q.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["noisy_bound"] >= 0.0347590 - 1e-4


def test_keyrate_csv(fx_files, capsys):
    assert main(["keyrate", str(fx_files / "4x5.json"), "--csv", "--direction", "B->A"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("name,direction") and lines[1].startswith("4x5,B->A,")


def test_keyrate_protocol(fx_files, capsys):
    bio.write_json(fx_files / "proto.json", {"steps": [{"speaker": "B", "q": [[1, 1, 1, 1, 1]]}]})
    assert main(["keyrate", str(fx_files / "4x5.json"), "--protocol", str(fx_files / "proto.json")]) == 0
    assert json.loads(capsys.readouterr().out)["advantage"] < 0


def test_validate(fx_files, tmp_path, capsys):
    assert main(["validate", str(fx_files / "4x5.json")]) == 0
    capsys.readouterr()
    product = JointDistribution3(np.full((2, 2, 2), 1 / 8))
    bio.write_json(tmp_path / "prod.json", bio.distribution_to_json(product))
    assert main(["validate", str(tmp_path / "prod.json")]) == 1
    out = json.loads(capsys.readouterr().out)
    assert not out["unambiguity"]["flag_E"]
    assert any(v[0] == "E" for v in out["unambiguity"]["violations"])


def test_lift(fx_files, tmp_path):
    assert main(["lift", str(fx_files / "4x5.json"), "--out", str(tmp_path / "rho.json")]) == 0
    obj = json.loads((tmp_path / "rho.json").read_text())
    assert obj["dA"] == 4 and len(obj["matrix"]) == 400


def test_enumerate_and_infer(fx_files, tmp_path):
    assert main(["enumerate", "--da", "2", "--db", "2", "--out", str(tmp_path / "e.json")]) == 0
    assert len(json.loads((tmp_path / "e.json").read_text())) == 1
    assert main(["infer", "--pab", str(fx_files / "4x5_pab.json"), "--de", "8", "--out", str(tmp_path / "i.json")]) == 0
    assert len(json.loads((tmp_path / "i.json").read_text())) == 2
    assert main(["infer", "--pab", str(fx_files / "4x5_pab.json"), "--de", "3"]) == 1


def test_optimize(tmp_path):
    bio.write_json(tmp_path / "cross.json", {"dA": 2, "dB": 2, "cliques": [[[0, 0], [1, 1]], [[0, 1], [1, 0]]]})
    out = tmp_path / "r.json"
    argv = ["optimize", "--diagram", str(tmp_path / "cross.json"), "--starts", "2", "--seed", "1", "--penalty-schedule", "1e2,1e6", "--out", str(out)]
    assert main(argv) == 0
    res = json.loads(out.read_text())
    assert res["feasible"] and res["best_rate"] <= 1e-6


def test_render(capsys):
    assert main(["render", "--diagram", "3x3", "--format", "svg"]) == 0
    assert capsys.readouterr().out.count('class="dot"') == 9


def test_reproduce_deterministic(tmp_path, capsys):
    assert main(["reproduce", "--out", str(tmp_path / "a")]) == 0
    assert main(["reproduce", "--out", str(tmp_path / "b")]) == 0
    for f in ("report.json", "table.txt", "report.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    table = capsys.readouterr().out
    assert "bits of private key" in table and "5 x 6" in table


def test_reproduce_report():
    rep = reproduce()
    assert [r.name for r in rep.rows] == ["3x3", "4x4", "4x5", "5x6", "6x5"]
    assert all(r.unambiguous and r.ppt and r.pt_invariant for r in rep.rows)
    assert [r.cliques for r in rep.rows] == [4, 6, 8, 10, 10]
    assert all(r.snapped_min_eig_pt >= -1e-12 for r in rep.rows)


def test_usage_errors(tmp_path, capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert "File formats" in capsys.readouterr().err
    (tmp_path / "x.json").write_text('{"dA": 1}')
    assert main(["validate", str(tmp_path / "x.json")]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    assert main(["enumerate", "--da", "9", "--db", "9"]) == 2

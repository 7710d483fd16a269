import json
import subprocess
import sys

import numpy as np
import pytest

from mlspectra import campaign, cli
from mlspectra.construct import scaled_allorthonormal_234
from mlspectra.tensor import delta_tensor, save_tensor, tensor_to_json


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_campaign_is_deterministic_and_order_independent():
    cfg = campaign.VerifyConfig(shapes=[(2, 2, 2), (2, 2, 2, 2)], trials=30, seed=42)
    a = campaign.run_campaign(cfg).dumps(include_clock=False)
    b = campaign.run_campaign(cfg).dumps(include_clock=False)
    par = campaign.VerifyConfig(shapes=[(2, 2, 2), (2, 2, 2, 2)], trials=30, seed=42, workers=2)
    c = campaign.run_campaign(par).dumps(include_clock=False)
    assert a == b
    assert json.loads(a)["passes"] == json.loads(c)["passes"]
    assert json.loads(a)["min_slack"] == json.loads(c)["min_slack"]


@pytest.mark.parametrize("dist", campaign.DISTRIBUTIONS)
def test_campaign_passes(dist):
    rep = campaign.run_campaign(campaign.VerifyConfig(shapes=[(2, 3, 4)], trials=50, seed=1, distribution=dist))
    assert rep.ok
    assert set(rep.totals) == {f"2x3x4:{c}" for c in campaign.CHECKS}


def test_inject_flags_counterexample():
    cfg = campaign.VerifyConfig(
        shapes=[(2, 2, 2)], trials=1, inject=({"dims": [2, 2, 2], "norm": 1, "sigmas": [0.9, 0.9, 0.7]},)
    )
    rep = campaign.run_campaign(cfg)
    assert rep.injected[0]["verdict"] == "NECESSARY_VIOLATED"
    assert "s1^2+s2^2 <= |T|^2+s3^2" in rep.injected[0]["violated"]


def test_replay_reproduces_slacks():
    rng = np.random.default_rng(5)
    T = rng.standard_normal((2, 3, 3)) + 0j
    dump = {"tensor": tensor_to_json(T)}
    assert campaign.replay(dump) == campaign.check_tensor(T, 1e-9)
    # a fake failure with a broken tensor stays broken when re-fed
    bad = {"tensor": {"dims": [2, 2, 2], "entries": [[1, 0]] * 8}}
    assert campaign.replay(bad) == campaign.replay(json.loads(json.dumps(bad)))


def test_config_validation():
    with pytest.raises(ValueError):
        campaign.VerifyConfig(shapes=[(2, 2, 2)], trials=0)
    with pytest.raises(ValueError):
        campaign.VerifyConfig(shapes=[(2, 2)])
    with pytest.raises(ValueError):
        campaign.VerifyConfig(shapes=[(2, 2, 2)], distribution="cauchy")


def test_cli_mlsvd(tmp_path, capsys):
    p = tmp_path / "d.json"
    save_tensor(delta_tensor((2, 3, 2)), p)
    code, out = run(["mlsvd", str(p)], capsys)
    assert code == 0
    spectra = json.loads(out)["spectra"]
    assert [s["values"][0] for s in spectra] == pytest.approx([1, 1, 1])
    save_tensor(scaled_allorthonormal_234(), p)
    code, out = run(["mlsvd", str(p), "--format", "csv"], capsys)
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert len(rows) == 9
    assert float(rows[0][2]) == pytest.approx(1 / np.sqrt(2))
    assert float(rows[-1][2]) == pytest.approx(0.5)


def test_cli_check_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "p.json", {"dims": [2, 2, 2], "norm": 1, "sigmas": [0.9, 0.9, 0.7]})
    code, out = run(["check", bad], capsys)
    assert code == 3 and json.loads(out)["verdict"] == "NECESSARY_VIOLATED"
    ok = write(tmp_path, "q.json", {"dims": [2, 2, 2], "norm": 1, "sigmas": [0.9, 0.8, 0.75]})
    code, out = run(["check", ok], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "SUFFICIENT_PROVEN"
    assert cli.main(["check", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "broken.json").write_text("{")
    assert cli.main(["check", str(tmp_path / "broken.json")]) == 2
    assert cli.main(["check", write(tmp_path, "r.json", {"dims": [2, 2]})]) == 2


def test_cli_construct(tmp_path, capsys):
    p = write(tmp_path, "p.json", {"dims": [3, 3, 3], "norm": 2, "sigmas": [1.6, 1.4, 1.3]})
    out_path = tmp_path / "t.json"
    code, _ = run(["--out", str(out_path), "construct", p], capsys)
    assert code == 0
    obj = json.loads(out_path.read_text())
    assert obj["verification"]["all_orthogonal"]
    assert obj["verification"]["realized_sigmas"] == pytest.approx([1.6, 1.4, 1.3], abs=1e-10)
    assert obj["verification"]["norm"] == pytest.approx(2)
    p4 = write(tmp_path, "p4.json", {"dims": [2, 2, 2, 2], "norm": 1, "sigmas": list(np.sqrt([0.9, 0.8, 0.7, 0.6]))})
    code, out = run(["construct", p4], capsys)
    assert code == 0
    gap = write(tmp_path, "g.json", {"dims": [2, 5, 7], "norm": 1, "sigmas": list(np.sqrt([1 / 2, 1 / 5, 1 / 7]))})
    assert cli.main(["construct", gap]) == 3


def test_cli_horn(tmp_path, capsys):
    code, out = run(["horn", "--triples", "1", "2"], capsys)
    assert code == 0
    assert json.loads(out)["triples"] == [[[1], [1], [1]], [[1], [2], [2]], [[2], [1], [2]]]
    code, out = run(["horn", "--triples", "2", "3", "--subcondition", "eq"], capsys)
    assert "subcondition_divergence" in json.loads(out)
    p = write(tmp_path, "h.json", {"alpha": [2, 1], "beta": [1, 0], "gamma": [3, 1]})
    assert run(["horn", "--check", p], capsys)[0] == 0
    p = write(tmp_path, "h2.json", {"alpha": [1, 0], "beta": [1, 0], "gamma": [2, 0.1]})
    assert run(["horn", "--check", p], capsys)[0] == 3
    s = {"dims": [3, 3, 3], "norm": 1,
         "sigmas": [list(np.sqrt([0.64, 0.27, 0.09])), list(np.sqrt([0.86, 0.1, 0.04])), list(np.sqrt([0.5, 0.37, 0.13]))]}
    assert run(["horn", "--equality-spectra", write(tmp_path, "s.json", s)], capsys)[0] == 0
    assert cli.main(["horn", "--triples", "3", "3"]) == 2


def test_cli_vertices_and_verify(tmp_path, capsys):
    code, out = run(["vertices", "--dims", "2", "3", "5"], capsys)
    assert code == 0 and out.startswith("name,s1_sq,s2_sq,s3_sq\nS,0.5,")
    code, out = run(["--seed", "42", "verify", "--shapes", "2x2x2", "--trials", "20", "--no-clock"], capsys)
    code2, out2 = run(["verify", "--seed", "42", "--shapes", "2x2x2", "--trials", "20", "--no-clock"], capsys)
    assert code == code2 == 0 and out == out2
    assert json.loads(out)["failures"] == []
    inj = write(tmp_path, "i.json", [{"dims": [2, 2, 2], "norm": 1, "sigmas": [0.9, 0.9, 0.7]}])
    code, out = run(["verify", "--trials", "1", "--inject", inj], capsys)
    assert json.loads(out)["injected"][0]["verdict"] == "NECESSARY_VIOLATED"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "mlspectra", "horn", "--triples", "1", "2", "--format", "csv"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines()[0] == "I,J,K"

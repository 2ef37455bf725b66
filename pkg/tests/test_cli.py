import json
import math

import numpy as np
import pytest

from fisherstefan import records
from fisherstefan.cli import load_config, main
from fisherstefan.profile import manifold_series, shoot_profile


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else out.err)


def test_mu_of_c_summary(capsys, tmp_path):
    code, summary = run(capsys, "mu-of-c", "--c", 1.0, "--order", 20, "--out", tmp_path)
    assert code == 0
    assert set(summary) == {"c", "nu", "J_minus_1", "mu"}
    assert summary["mu"] == pytest.approx(9.531512935107384, rel=1e-10)
    assert records.read_json(tmp_path / "mu_of_c.json") == summary


def test_c_of_mu_inverts(capsys, tmp_path):
    code, summary = run(capsys, "c-of-mu", "--mu", 9.531512935107384, "--out", tmp_path)
    assert code == 0 and summary["c"] == pytest.approx(1.0, abs=1e-9)


def test_vanishing_csv(capsys, tmp_path):
    code, summary = run(capsys, "vanishing", "--h-inf", 1.5707963, "--n", 5, "--format", "csv", "--out", tmp_path)
    assert code == 0
    cols = records.read_csv(tmp_path / "spectrum.csv")
    assert list(cols["n"]) == [1, 2, 3, 4, 5]
    assert abs(cols["lambda"][0]) < 1e-6
    assert summary["lambda_1"] == pytest.approx(cols["lambda"][0], rel=1e-11)


def test_prufer_report(capsys, tmp_path):
    code, summary = run(capsys, "prufer", "--c", 1, "--lambda-grid", "0:100:41", "--out", tmp_path)
    assert code == 0
    assert summary["verdict"] == "no point spectrum with lambda >= 0"
    report = records.read_json(tmp_path / "oscillation_report.json")
    assert len(report["per_lambda"]) == 41


def test_artifacts_are_byte_identical(capsys, tmp_path):
    argv = ["prufer", "--c", "0.5", "--lambda-grid", "0:20:5", "--trajectory", "2", "--format", "csv"]
    run(capsys, *argv, "--out", tmp_path / "a")
    run(capsys, *argv, "--out", tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_profile_round_trip(tmp_path):
    prof = shoot_profile(1.0)
    again = records.load_profile(records.write_profile(tmp_path / "p.json", prof))
    assert np.array_equal(again.u, prof.u) and np.array_equal(again.z, prof.z)
    again = records.load_profile(records.write_profile(tmp_path / "p.csv", prof), c=1.0)
    assert np.max(np.abs(again.u - prof.u)) < 1e-11
    with pytest.raises(ValueError):
        records.load_profile(tmp_path / "p.csv")


def test_series_round_trip(capsys, tmp_path):
    series = manifold_series(1.0, 20)
    assert np.array_equal(records.load_series(records.write_series(tmp_path / "s.json", series)).coeffs, series.coeffs)
    code, _ = run(capsys, "series", "--c", 1.0, "--format", "csv", "--out", tmp_path)
    loaded = records.load_series(tmp_path / "series.csv", nu=series.nu)
    assert np.allclose(loaded.coeffs, series.coeffs, rtol=1e-11, atol=0)


def test_json_writer_handles_numpy_and_nan(tmp_path):
    path = records.write_json(tmp_path / "x.json", {"a": np.float64(0.1), "b": np.arange(2), "c": math.nan, "d": 1j})
    assert records.read_json(path) == {"a": 0.1, "b": [0, 1], "c": None, "d": {"re": 0.0, "im": 1.0}}


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# vanishing run\nh-inf = 2.0\nn = 3\n")
    assert load_config(cfg) == {"h_inf": "2.0", "n": "3"}
    code, summary = run(capsys, "vanishing", "--config", cfg, "--out", tmp_path)
    assert code == 0 and summary["h_inf"] == 2.0
    code, summary = run(capsys, "vanishing", "--config", cfg, "--h-inf", 1.0, "--out", tmp_path)
    assert code == 0 and summary["h_inf"] == 1.0 and summary["verdict"] == "Stable"


def test_json_config_and_speed_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"c": 1.0, "h0": 1.0, "T": 10.0}))
    code, summary = run(capsys, "simulate", "--config", cfg, "--mu", 1.0, "--out", tmp_path)
    assert code == 0
    assert summary["mu"] == 1.0 and summary["outcome"]["kind"] == "Vanishing"
    cols = records.read_json(tmp_path / "history.json")
    assert set(cols) == {"t", "h", "h_prime", "max_u"}


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, err = run(capsys, "vanishing", "--config", cfg, "--h-inf", 1.0, "--out", tmp_path)
    assert code == 2 and "colour" in err


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "vanishing", "--h-inf", -1, "--out", tmp_path)[0] == 2
    assert run(capsys, "wave", "--c", 2.5, "--out", tmp_path)[0] == 3
    code, err = run(capsys, "simulate", "--mu", 1, "--h0", 4, "--amplitude", 0.5, "--T", 0.01, "--out", tmp_path)
    assert code == 4 and "inconclusive" in err
    assert records.read_json(tmp_path / "outcome.json")["outcome"]["kind"] == "Undecided"
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--c", "1", "--mu", "2"])
    assert info.value.code == 2


def test_stability_and_essential(capsys, tmp_path):
    code, summary = run(capsys, "stability", "--c", 1.0, "--T", 4, "--out", tmp_path)
    assert code == 0 and summary["fitted_rate"] > 0
    code, summary = run(capsys, "essential", "--c", 1, "--lambda=-1+0.5j", "--lambda=-3", "--greens", -1, -2, "--out", tmp_path)
    assert code == 0 and summary["max_re_border"] == -1.0
    assert [q["region"] for q in summary["queries"]] == ["Resolvent", "EssentialInterior"]
    assert "greens" in summary["queries"][0]

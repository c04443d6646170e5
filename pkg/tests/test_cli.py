import json

import pytest

from uavnet.cli import main

URBAN = {
    "lambda_b": 1e-6, "h_b": 20, "lambda_d": 1e-8,
    "h_d_min": 100, "h_d_max": 300,
    "p_b_db": 10, "p_d_db": 5, "n0_db": -80,
    "alpha_los": 2.5, "alpha_nlos": 4, "m": 1,
    "env": "urban", "bs_antenna_model": "omni_downtilt",
    "theta_b_deg": 100, "n_b": 8,
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "urban.json"
    path.write_text(json.dumps(URBAN))
    return str(path)


def _rows(path):
    lines = [l for l in open(path).read().splitlines() if l and not l.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, l.split(","))) for l in lines[1:]]


def test_coverage_single_tau_rows(config_path, tmp_path):
    out = tmp_path / "cov.csv"
    rc = main(["coverage", "--config", config_path, "--engine", "sim",
               "--protocol", "df", "--tau-db", "0", "--trials", "200",
               "--seed", "4", "--out", str(out)])
    assert rc == 0
    rows = _rows(out)
    assert len(rows) == 1
    assert rows[0]["engine"] == "sim" and rows[0]["tau_db"] == "0"
    assert 0.0 <= float(rows[0]["p_cov"]) <= 1.0


def test_coverage_header_embeds_config(config_path, tmp_path):
    out = tmp_path / "cov.csv"
    main(["coverage", "--config", config_path, "--engine", "sim",
          "--protocol", "af", "--tau-db", "0", "--trials", "50", "--out", str(out)])
    head = [l for l in open(out).read().splitlines() if l.startswith("#")]
    joined = "\n".join(head)
    assert "config:" in joined and '"lambda_b": 1e-06' in joined
    assert any("config_hash" in l for l in head)
    assert any("seed" in l for l in head)


def test_coverage_invalid_config_exits_2(tmp_path):
    bad = dict(URBAN)
    bad["h_d_min"] = 500  # above h_d_max
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    out = tmp_path / "never.csv"
    with pytest.raises(SystemExit) as exc:
        main(["coverage", "--config", str(path), "--out", str(out)])
    assert exc.value.code == 2
    assert not out.exists()


def test_coverage_rejects_isotropic_analytic(config_path, tmp_path):
    iso = dict(URBAN)
    iso["bs_antenna_model"] = "isotropic"
    path = tmp_path / "iso.json"
    path.write_text(json.dumps(iso))
    rc = main(["coverage", "--config", str(path), "--engine", "analytic",
               "--tau-db", "0", "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_coverage_deterministic_bytes(config_path, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["coverage", "--config", config_path, "--engine", "both",
            "--protocol", "af", "--tau-db", "0", "--trials", "150",
            "--samples", "512", "--seed", "12"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_sweep_rows_and_determinism(config_path, tmp_path):
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    args = ["sweep", "--config", config_path, "--param", "uav_density",
            "--values", "1e-8,3e-8", "--engine", "sim", "--protocol", "df",
            "--tau-db", "0", "--trials", "120", "--seed", "5"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = _rows(out1)
    assert [r["x"] for r in rows] == ["1e-08", "3e-08"]


def test_sweep_empty_grid_exits_2(config_path, tmp_path):
    rc = main(["sweep", "--config", config_path, "--param", "uav_density",
               "--values", ",", "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_sweep_bad_environment_exits_2(config_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--config", config_path, "--param", "environment",
              "--values", "urban,atlantis", "--trials", "10",
              "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_sweep_mean_height_shifts_band(config_path, tmp_path):
    out = tmp_path / "h.csv"
    rc = main(["sweep", "--config", config_path, "--param", "mean_height",
               "--values", "200,400", "--engine", "sim", "--protocol", "af",
               "--tau-db", "0", "--trials", "80", "--out", str(out)])
    assert rc == 0
    assert len(_rows(out)) == 2


def test_validate_rejects_corrupted_eta_order(tmp_path):
    bad = dict(URBAN)
    bad["env"] = {"c1": 9.61, "c2": 0.16, "eta_los_db": 20, "eta_nlos_db": 1}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--config", str(path), "--out", str(tmp_path / "r.json")])
    assert exc.value.code == 2


def test_validate_report_runs(config_path, tmp_path):
    out = tmp_path / "report.json"
    rc = main(["validate", "--config", config_path, "--seed", "1",
               "--ratio-samples", "200000", "--spatial-samples", "4000",
               "--laplace-samples", "5000", "--trials", "2500",
               "--samples", "2048", "--out", str(out)])
    report = json.loads(out.read_text())
    assert {"version", "config", "checks", "passed"} <= set(report)
    names = {c["name"] for c in report["checks"]}
    assert any("ratio_cdf" in n for n in names)
    assert any("closest" in n for n in names)
    assert any("laplace" in n for n in names)
    assert any("coverage" in n for n in names)
    failing = [c for c in report["checks"] if not c["passed"]]
    assert rc == 0, f"failing checks: {failing}"

import numpy as np
import pytest

from countstats import cli, io


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def test_g2_columns_agree(tmp_path):
    assert run(tmp_path, "g2", "--g-mhz", "10", "--kappa-mhz", "2.7", "--tau-max-us", "1") == 0
    meta, cols, data = io.read_csv(tmp_path / "g2.csv")
    assert cols == ["tau", "g2_analytic", "g2_numeric"]
    assert np.max(np.abs(data[:, 1] - data[:, 2])) < 1e-8
    assert meta["param.g_mhz"] == "10.0" and "version" in meta


def test_fano_map_zero_lines(tmp_path):
    assert run(tmp_path, "fano-map", "--g-points", "3", "--delta-points", "9") == 0
    meta, cols, data = io.read_csv(tmp_path / "fano_map.csv")
    assert cols == ["x", "y", "value"]
    zero = float(meta["zero_line"])
    assert zero == pytest.approx(np.sqrt(3) * 2.7)
    live = data[(data[:, 1] > 0) & (np.abs(np.abs(data[:, 0]) - zero) > 1e-6)]
    assert np.all((live[:, 2] < 0) == (np.abs(live[:, 0]) < zero))
    assert float(meta["ratio_to_closed_form"]) == pytest.approx(0.5, rel=1e-8)


def test_pipeline_commands(tmp_path):
    assert run(tmp_path, "simulate", "--pulses", "3000", "--seed", "4") == 0
    assert run(tmp_path, "adjust") == 0
    assert run(tmp_path, "estimate", "--bin-us", "0.01", "--tau-max-us", "0.2") == 0
    _, cols, data = io.read_csv(tmp_path / "g2_estimate.csv")
    assert cols == ["tau", "g2", "stderr"] and data.shape == (20, 3)


def test_dqd_and_maps(tmp_path):
    assert run(tmp_path, "dqd", "--epsilon-mhz", "0.3") == 0
    assert run(tmp_path, "lg-map", "--tau-points", "10", "--delta-points", "3") == 0
    assert run(tmp_path, "vrs-scan", "--rate-points", "3", "--tau-points", "50") == 0
    for name in ("dqd_stats.csv", "lg_map.csv", "vrs_scan.csv"):
        assert (tmp_path / name).read_text().startswith("# version=")


def test_angular_units(tmp_path):
    assert run(tmp_path, "g2", "--angular", "--g-mhz", "1.0", "--kappa-mhz", "1.0", "--points", "5") == 0
    meta, _, _ = io.read_csv(tmp_path / "g2.csv")
    assert meta["units"] == "rad/us"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[run]\nseed = 9\n\n[g2]\npoints = 7\ng_mhz = 5\n")
    assert run(tmp_path, "g2", "--config", str(cfg), "--g-mhz", "6") == 0
    meta, _, data = io.read_csv(tmp_path / "g2.csv")
    assert data.shape[0] == 7 and meta["seed"] == "9" and meta["param.g_mhz"] == "6.0"


@pytest.mark.parametrize(
    "argv, text",
    [
        (["g2", "--bogus"], "unrecognized"),
        (["nonsense"], "invalid choice"),
        (["g2", "--points", "1"], "at least 2"),
        (["lg-map", "--kind", "other"], "kind"),
    ],
)
def test_config_errors_exit_one(tmp_path, capsys, argv, text):
    assert run(tmp_path, *argv) == cli.EXIT_CONFIG
    assert text in capsys.readouterr().err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[g2]\nunknown = 1\n")
    assert run(tmp_path, "g2", "--config", str(cfg)) == cli.EXIT_CONFIG
    cfg.write_text("not an ini")
    assert run(tmp_path, "g2", "--config", str(cfg)) == cli.EXIT_CONFIG
    assert "malformed" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert cli.main(["dqd", "--out", str(blocker / "x")]) == cli.EXIT_CONFIG
    assert "output directory" in capsys.readouterr().err


def test_verify_subset_writes_report(tmp_path):
    skip = ",".join(str(n) for n in range(2, 14))
    assert run(tmp_path, "verify", "--skip", skip) == 0
    report = (tmp_path / "verify_report.txt").read_text()
    assert "[PASS]  1" in report and "all checks passed" in report and " s)" not in report


def test_verify_reports_breach_with_exit_two(tmp_path, monkeypatch):
    from countstats import acceptance

    def failing():
        return acceptance.CheckResult(99, "stub", False, "forced breach")

    failing.number = 99
    monkeypatch.setattr(acceptance, "CHECKS", [failing])
    assert run(tmp_path, "verify") == cli.EXIT_NUMERIC
    assert "FAILED [99]" in (tmp_path / "verify_report.txt").read_text()


def test_version_exits_cleanly(capsys):
    assert cli.main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == "0.1.0"

"""Tests for the command-line harness and its exit codes."""

import json

import numpy as np
import pandas as pd
import pytest

from lieccm.cli import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main

SCALAR_CONFIG = """\
[system]
name = "scalar-linear"

[synthesis]
lambda = 0.5
grid_size = 50

[simulation]
t_end = 10.0
dt = 0.01
path_segments = 4
x0_offset = 0.5
"""

SE3_CONFIG = """\
[system]
name = "se3-heading"

[synthesis]
lambda = 0.2
grid_size = 20

[simulation]
t_end = 1.0
dt = 0.01
period = 0.5
path_segments = 4
u_star = [0.0, 0.0, 0.3]
x0_offset = 0.3
"""


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def scalar_cert(workdir):
    config = workdir / "scalar.toml"
    config.write_text(SCALAR_CONFIG, encoding="utf-8")
    cert = workdir / "scalar.json"
    assert main(["synthesize", "--config", str(config), "--out", str(cert)]) == EXIT_OK
    return config, cert


@pytest.fixture(scope="module")
def se3_cert(workdir):
    config = workdir / "se3.toml"
    config.write_text(SE3_CONFIG, encoding="utf-8")
    cert = workdir / "se3.json"
    assert main(["synthesize", "--config", str(config), "--out", str(cert)]) == EXIT_OK
    return config, cert


class TestSynthesizeCommand:
    """lieccm synthesize."""

    def test_writes_certificate_and_report(self, scalar_cert):
        _, cert = scalar_cert
        data = json.loads(cert.read_text(encoding="utf-8"))
        assert data["status"] == "verified"
        report = json.loads(cert.with_suffix(".report.json").read_text(encoding="utf-8"))
        assert report["passed"] is True

    def test_deterministic(self, scalar_cert, tmp_path):
        config, cert = scalar_cert
        again = tmp_path / "again.json"
        assert main(["synthesize", "--config", str(config), "--out", str(again)]) == EXIT_OK
        assert again.read_bytes() == cert.read_bytes()

    def test_infeasible_rate(self, tmp_path):
        config = tmp_path / "pinned.toml"
        config.write_text(
            '[system]\nname = "scalar-linear"\n[synthesis]\nlambda = 1e6\nrho_mode = "zero"\n'
            "a1 = 1.0\na2 = 1.0\nmax_iters = 20\ngrid_size = 10\n",
            encoding="utf-8",
        )
        cert = tmp_path / "pinned.json"
        assert main(["synthesize", "--config", str(config), "--out", str(cert)]) == EXIT_FAILURE
        assert not cert.exists()
        report = json.loads(cert.with_suffix(".report.json").read_text(encoding="utf-8"))
        assert report["passed"] is False
        assert report["worst_r1"] > 0

    def test_missing_system_name(self, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text("[synthesis]\nlambda = 0.5\n", encoding="utf-8")
        assert main(["synthesize", "--config", str(config)]) == EXIT_INPUT

    def test_missing_config_flag(self):
        assert main(["synthesize"]) == EXIT_INPUT


class TestVerifyCommand:
    """lieccm verify."""

    def test_passes(self, scalar_cert, tmp_path):
        _, cert = scalar_cert
        out = tmp_path / "verify.json"
        assert main(["verify", "--cert", str(cert), "--samples", "500", "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text(encoding="utf-8"))["seed"] == 2

    def test_scaled_metric_fails(self, scalar_cert, tmp_path, capsys):
        _, cert = scalar_cert
        data = json.loads(cert.read_text(encoding="utf-8"))
        data["coeffs"] = (100.0 * np.array(data["coeffs"])).tolist()
        edited = tmp_path / "edited.json"
        edited.write_text(json.dumps(data), encoding="utf-8")
        assert main(["verify", "--cert", str(edited), "--samples", "100"]) == EXIT_FAILURE
        assert "R0_hi" in capsys.readouterr().out

    def test_truncated_certificate(self, scalar_cert, tmp_path):
        _, cert = scalar_cert
        text = cert.read_text(encoding="utf-8")
        truncated = tmp_path / "truncated.json"
        truncated.write_text(text[: len(text) // 2], encoding="utf-8")
        assert main(["verify", "--cert", str(truncated)]) == EXIT_INPUT

    def test_missing_certificate(self, tmp_path):
        assert main(["verify", "--cert", str(tmp_path / "absent.json")]) == EXIT_INPUT


class TestSimulateCommand:
    """lieccm simulate."""

    def test_scalar_decay(self, scalar_cert, tmp_path):
        config, cert = scalar_cert
        trace = tmp_path / "trace.csv"
        assert main(["simulate", "--config", str(config), "--cert", str(cert), "--out", str(trace)]) == EXIT_OK
        summary = json.loads(trace.with_suffix(".summary.json").read_text(encoding="utf-8"))
        assert summary["fitted_rate"] <= -0.45
        assert summary["rate_ok"] is True
        df = pd.read_csv(trace)
        assert list(df.columns) == ["t", "x0", "x_star0", "u0", "d_induced", "path_energy", "h_residual"]
        assert len(df) == 1001

    def test_repeatable_trace(self, scalar_cert, tmp_path):
        config, cert = scalar_cert
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["simulate", "--config", str(config), "--cert", str(cert), "--out", str(first)])
        main(["simulate", "--config", str(config), "--cert", str(cert), "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_zero_initial_error(self, scalar_cert, tmp_path):
        _, cert = scalar_cert
        config = tmp_path / "zero.toml"
        config.write_text(
            '[system]\nname = "scalar-linear"\n[simulation]\nt_end = 1.0\ndt = 0.01\n'
            "period = 0.5\npath_segments = 4\nx0 = [0.0]\n",
            encoding="utf-8",
        )
        trace = tmp_path / "zero.csv"
        assert main(["simulate", "--config", str(config), "--cert", str(cert), "--out", str(trace)]) == EXIT_OK
        assert pd.read_csv(trace)["d_induced"].max() <= 1e-6

    def test_se3_stays_on_group(self, se3_cert, tmp_path):
        config, cert = se3_cert
        trace = tmp_path / "se3.csv"
        assert main(["simulate", "--config", str(config), "--cert", str(cert), "--out", str(trace)]) == EXIT_OK
        summary = json.loads(trace.with_suffix(".summary.json").read_text(encoding="utf-8"))
        assert summary["max_h_residual"] <= 1e-7
        assert summary["final_distance"] < summary["initial_distance"]

    def test_system_mismatch(self, scalar_cert, se3_cert, tmp_path):
        se3_config, _ = se3_cert
        _, cert = scalar_cert
        assert main(["simulate", "--config", str(se3_config), "--cert", str(cert),
                     "--out", str(tmp_path / "x.csv")]) == EXIT_INPUT


class TestGeodesicCommand:
    """lieccm geodesic."""

    QUARTER_TURN = "0,-1,0,1,0,0,0,0,1"

    def test_quarter_turn_length(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = main(["geodesic", "--group", "so3", "--from=1,0,0,0,1,0,0,0,1",
                     f"--to={self.QUARTER_TURN}", "--out", str(out)])
        assert code == EXIT_OK
        df = pd.read_csv(out)
        assert df["cumulative_length"].iloc[-1] == pytest.approx(np.sqrt(2) * np.pi / 2, abs=1e-8)
        assert len(df) == 33

    def test_identical_endpoints(self, tmp_path):
        out = tmp_path / "still.csv"
        point = "--from=1,0,0,0,1,0,0,0,1"
        assert main(["geodesic", "--group", "so3", point, "--to=1,0,0,0,1,0,0,0,1",
                     "--nodes", "5", "--out", str(out)]) == EXIT_OK
        assert pd.read_csv(out)["cumulative_length"].max() == 0.0

    def test_different_components(self):
        assert main(["geodesic", "--group", "o2xr", "--from=1,0,0,1,0", "--to=1,0,0,-1,0"]) == EXIT_FAILURE

    def test_off_manifold_point(self):
        assert main(["geodesic", "--group", "so3", "--from=2,0,0,0,1,0,0,0,1",
                     "--to=1,0,0,0,1,0,0,0,1"]) == EXIT_INPUT

    def test_unparseable_point(self):
        assert main(["geodesic", "--group", "so3", "--from=a,b", "--to=1"]) == EXIT_INPUT

    def test_unknown_group(self):
        assert main(["geodesic", "--group", "sl2", "--from=1", "--to=1"]) == EXIT_INPUT


class TestExportSDPACommand:
    """lieccm export-sdpa."""

    def test_writes_problem(self, tmp_path):
        config = tmp_path / "sdpa.toml"
        config.write_text('[system]\nname = "scalar-linear"\n[synthesis]\nlambda = 0.5\ngrid_size = 3\n',
                          encoding="utf-8")
        out = tmp_path / "problem.dat-s"
        assert main(["export-sdpa", "--config", str(config), "--out", str(out)]) == EXIT_OK
        assert out.read_text(encoding="utf-8").splitlines()[2] == "5"

    def test_unsupported_degree(self, tmp_path):
        config = tmp_path / "sdpa.toml"
        config.write_text('[system]\nname = "scalar-linear"\n[synthesis]\nlambda = 0.5\ndegree = 1\n',
                          encoding="utf-8")
        assert main(["export-sdpa", "--config", str(config), "--out", str(tmp_path / "p.dat-s")]) == EXIT_INPUT

import json

import pytest

from memslab.cli import main

DISK = {"kind": "radial", "dimension": 2, "radius": 1.0, "nodes": 64}
ONES = {"kind": "constant", "value": 1.0}


def run(tmp_path, command, config, extra=()):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "out"
    return main([command, "--config", str(cfg_path), "--out", str(out), *extra]), out


class TestSolve:
    def test_feasible_writes_artifacts(self, tmp_path):
        code, out = run(
            tmp_path, "solve",
            {"domain": DISK, "f": ONES, "g": ONES, "lambda": 0.5, "mu": 0.5},
        )
        assert code == 0
        assert (out / "solution.csv").exists()
        summary = json.loads((out / "solve_summary.json").read_text())
        assert summary["verdict"] == "converged"
        assert summary["sup_u"] == pytest.approx(summary["sup_v"])
        assert "config_fingerprint" in summary

    def test_infeasible_exit_two(self, tmp_path):
        code, out = run(
            tmp_path, "solve",
            {"domain": DISK, "f": ONES, "g": ONES, "lambda": 0.9, "mu": 0.9},
        )
        assert code == 2
        summary = json.loads((out / "solve_summary.json").read_text())
        assert summary["reason"] == "touched-one"

    def test_budget_exhaustion_exit_three(self, tmp_path):
        code, _ = run(
            tmp_path, "solve",
            {"domain": DISK, "f": ONES, "g": ONES, "lambda": 0.7, "mu": 0.7,
             "solver": {"max_iter": 3}},
        )
        assert code == 3

    def test_missing_parameters_exit_four(self, tmp_path, capsys):
        code, _ = run(tmp_path, "solve", {"domain": DISK, "f": ONES, "g": ONES})
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        fields = {v["field"] for v in err["violations"]}
        assert {"lambda", "mu"} <= fields

    def test_missing_profile_file_exit_four(self, tmp_path, capsys):
        code, _ = run(
            tmp_path, "solve",
            {"domain": DISK, "f": {"kind": "tabulated", "path": "missing.csv"},
             "g": ONES, "lambda": 0.1, "mu": 0.1},
        )
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "invalid-config"

    def test_bad_domain_lists_all_violations(self, tmp_path, capsys):
        code, _ = run(
            tmp_path, "solve",
            {"domain": {"kind": "radial", "dimension": 0, "radius": -1.0,
                        "nodes": 64}, "f": ONES, "g": ONES},
        )
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        messages = " ".join(v["message"] for v in err["violations"])
        assert "dimension" in messages and "radius" in messages


class TestCurve:
    def test_trace_rows_and_determinism(self, tmp_path):
        config = {"domain": DISK, "f": ONES, "g": ONES,
                  "theta_grid": [0.5, 1.0, 2.0], "curve": {"rtol": 5e-3}}
        code, out = run(tmp_path, "curve", config)
        assert code == 0
        first = (out / "curve.csv").read_bytes()
        assert (out / "bounds.json").exists()
        rows = first.decode().splitlines()
        assert len(rows) == 3 + 3  # fingerprint, provenance, header + 3 rays

        code2, out2 = run(tmp_path, "curve", config)
        assert (out2 / "curve.csv").read_bytes() == first  # byte-identical rerun

    def test_lower_cert_below_lambda_star(self, tmp_path):
        code, out = run(
            tmp_path, "curve",
            {"domain": DISK, "f": ONES, "g": ONES, "theta_grid": [1.0],
             "curve": {"rtol": 5e-3}},
        )
        rows = (out / "curve.csv").read_text().splitlines()
        record = dict(zip(rows[2].split(","), rows[3].split(",")))
        assert float(record["lower_cert"]) <= float(record["lambda_star"])

    def test_bad_grid_exit_four(self, tmp_path, capsys):
        code, _ = run(
            tmp_path, "curve",
            {"domain": DISK, "f": ONES, "g": ONES, "theta_grid": [-1.0, 1.0]},
        )
        assert code == 4
        capsys.readouterr()


class TestOtherCommands:
    def test_bounds(self, tmp_path):
        code, out = run(tmp_path, "bounds", {"domain": DISK, "f": ONES, "g": ONES})
        assert code == 0
        data = json.loads((out / "bounds.json").read_text())
        assert data["a_f"] == pytest.approx(16.0 / 27.0)

    def test_eigen(self, tmp_path):
        code, out = run(
            tmp_path, "eigen",
            {"domain": DISK, "f": ONES, "g": ONES, "lambda": 0.4, "mu": 0.4},
        )
        assert code == 0
        data = json.loads((out / "eigen_summary.json").read_text())
        assert data["classification"] == "stable"
        assert (out / "eigenfunctions.csv").exists()

    def test_symmetrize(self, tmp_path):
        code, out = run(
            tmp_path, "symmetrize",
            {"domain": {"kind": "rect", "lx": 1.0, "ly": 1.0, "nx": 24, "ny": 24},
             "f": ONES, "g": ONES, "target_nodes": 64},
        )
        assert code == 0
        lines = (out / "f_symmetrized.csv").read_text().splitlines()
        assert lines[1] == "index,value"
        assert len(lines) == 2 + 64

    def test_extremal(self, tmp_path):
        code, out = run(
            tmp_path, "extremal",
            {"domain": DISK, "f": ONES, "g": ONES, "theta": 1.0,
             "fractions": [0.5, 0.9], "moser_alpha": 2.0,
             "curve": {"rtol": 5e-3}},
        )
        assert code == 0
        lines = (out / "approach.csv").read_text().splitlines()
        assert len(lines) == 2 + 2


class TestCheck:
    def test_single_cheap_criterion(self, tmp_path, capsys):
        code, out = run(
            tmp_path, "check",
            {"criteria": ["singular-identity"]},
            extra=["--resolution-scale", "0.5"],
        )
        assert code == 0
        assert "singular-identity" in capsys.readouterr().out
        report = json.loads((out / "check_report.json").read_text())
        assert report["results"][0]["passed"] is True

    def test_unknown_criterion_exit_four(self, tmp_path, capsys):
        code, _ = run(tmp_path, "check", {"criteria": ["no-such-check"]})
        assert code == 4
        capsys.readouterr()

    def test_coarse_resolution_reports_failures(self, tmp_path, capsys):
        # deliberately coarse run: failures are reported per criterion, not raised
        code, out = run(
            tmp_path, "check",
            {"criteria": ["infrastructure", "singular-identity"]},
            extra=["--resolution-scale", "0.0625"],
        )
        assert code in (0, 1)
        report = json.loads((out / "check_report.json").read_text())
        assert {r["name"] for r in report["results"]} == {
            "infrastructure", "singular-identity"
        }
        capsys.readouterr()


def test_unreadable_config_exit_four(tmp_path, capsys):
    code = main(["solve", "--config", str(tmp_path / "nope.json")])
    assert code == 4
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "invalid-config"


class TestExitFive:
    def test_per_ray_failure_keeps_partial_output(self, tmp_path, monkeypatch):
        # inject a failure on the second ray: partial CSV plus manifest
        import memslab.cli as cli_mod

        real = cli_mod.extremal_on_ray

        def flaky(mesh, f, g, theta, cfg):
            if theta == 2.0:
                raise RuntimeError("injected ray failure")
            return real(mesh, f, g, theta, cfg)

        monkeypatch.setattr(cli_mod, "extremal_on_ray", flaky)
        code, out = run(
            tmp_path, "curve",
            {"domain": DISK, "f": ONES, "g": ONES, "theta_grid": [1.0, 2.0],
             "curve": {"rtol": 5e-3}},
        )
        assert code == 5
        rows = (out / "curve.csv").read_text().splitlines()
        assert len(rows) == 3 + 1  # the healthy ray is retained
        failures = json.loads((out / "curve_failures.json").read_text())
        assert failures["failures"][0]["theta"] == 2.0


def test_console_entry_point(tmp_path):
    import subprocess
    import sys

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"domain": DISK, "f": ONES, "g": ONES}))
    proc = subprocess.run(
        [sys.executable, "-m", "memslab.cli", "bounds",
         "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "o" / "bounds.json").exists()

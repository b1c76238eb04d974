"""Command-line driver tests, run in-process through main()."""

import csv
import io
import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from lapbound.cli import main
from lapbound.ingest import random_connected_graph, write_matrix_market

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
K3 = str(FIXTURES / "k3.mtx")


@pytest.fixture()
def k3_rhs(tmp_path):
    p = tmp_path / "rhs.txt"
    p.write_text("1.0 -1.0 0.0\n")
    return str(p)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestEstimate:
    def test_k3_known_values(self, capsys, k3_rhs):
        code, out, err = run_cli(
            capsys,
            "estimate",
            "--input",
            K3,
            "--rhs",
            k3_rhs,
            "--smoother-iterations",
            "0",
            "--sweeps",
            "1",
            "--with-true-error",
        )
        assert code == 0, err
        rows = parse_csv(out)
        assert len(rows) == 1
        assert rows[0]["label"] == "k3"
        assert float(rows[0]["psi"]) == pytest.approx(np.sqrt(2 / 3), rel=1e-9)
        assert float(rows[0]["eff"]) == pytest.approx(1.0, abs=1e-6)
        assert rows[0]["sweeps"] == "1"

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "estimate", "--input", K3, "--format", "json", "--seed", "4"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["version"]
        assert payload["seed"] == 4
        assert len(payload["rows"]) == 1

    def test_deterministic_modulo_timing(self, capsys):
        argv = ["estimate", "--input", str(FIXTURES / "tree_dominated.mtx"), "--seed", "9"]
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        r1, r2 = parse_csv(out1)[0], parse_csv(out2)[0]
        r1.pop("seconds"), r2.pop("seconds")
        assert r1 == r2

    def test_seed_changes_problem(self, capsys):
        base = ["estimate", "--input", K3]
        _, out1, _ = run_cli(capsys, *base, "--seed", "1")
        _, out2, _ = run_cli(capsys, *base, "--seed", "2")
        assert parse_csv(out1)[0]["psi"] != parse_csv(out2)[0]["psi"]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.csv"
        code, out, _ = run_cli(
            capsys, "estimate", "--input", K3, "--output", str(target)
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("label,")

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "estimate", "--input", "/nope/missing.mtx")
        assert code == 2
        assert "lapbound:" in err

    def test_unbalanced_rhs_exits_3(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1.0 1.0 1.0\n")
        code, _, err = run_cli(
            capsys, "estimate", "--input", K3, "--rhs", str(bad)
        )
        assert code == 3
        assert "lapbound:" in err

    def test_project_rhs_repairs_imbalance(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("2.0 0.0 1.0\n")
        code, out, _ = run_cli(
            capsys, "estimate", "--input", K3, "--rhs", str(bad), "--project-rhs"
        )
        assert code == 0

    def test_wrong_rhs_length_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1.0 -1.0\n")
        code, _, _ = run_cli(capsys, "estimate", "--input", K3, "--rhs", str(bad))
        assert code == 2

    def test_face_basis_on_file_graph_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "estimate", "--input", K3, "--basis", "face")
        assert code == 2
        assert "grid" in err


class TestDumpLocal:
    def test_k3_per_edge_values(self, capsys, k3_rhs):
        code, out, _ = run_cli(
            capsys,
            "dump-local",
            "--input",
            K3,
            "--rhs",
            k3_rhs,
            "--smoother-iterations",
            "0",
            "--sweeps",
            "1",
        )
        assert code == 0
        payload = json.loads(out)
        values = [rec["psi_e"] for rec in payload["per_edge"]]
        np.testing.assert_allclose(values, [2 / 3, 1 / 3, 1 / 3], rtol=1e-9)
        assert payload["sum_psi_e_sq"] == pytest.approx(2 / 3, rel=1e-9)
        assert payload["psi"] == pytest.approx(np.sqrt(2 / 3), rel=1e-9)
        pairs = [(rec["i"], rec["j"]) for rec in payload["per_edge"]]
        assert pairs == [(2, 1), (3, 1), (3, 2)]

    def test_csv_format_with_true_error(self, capsys, k3_rhs):
        code, out, _ = run_cli(
            capsys,
            "dump-local",
            "--input",
            K3,
            "--rhs",
            k3_rhs,
            "--smoother-iterations",
            "0",
            "--sweeps",
            "1",
            "--format",
            "csv",
            "--with-true-error",
        )
        assert code == 0
        rows = parse_csv(out)
        assert list(rows[0].keys()) == ["i", "j", "w", "psi_e", "err_e"]
        errs = [float(r["err_e"]) for r in rows]
        np.testing.assert_allclose(errs, [2 / 3, 1 / 3, 1 / 3], rtol=1e-9)


class TestGridExperiment:
    def test_small_levels(self, capsys):
        code, out, _ = run_cli(
            capsys, "grid-experiment", "--levels", "2,3", "--sweeps-set", "1,3"
        )
        assert code == 0
        rows = parse_csv(out)
        assert [r["label"] for r in rows] == ["level2", "level2", "level3", "level3"]
        for r in rows:
            psi, true = float(r["psi"]), float(r["true_error"])
            assert psi >= true - 1e-9 * psi
            assert float(r["eff"]) == pytest.approx(psi / true, rel=1e-9)
        # more sweeps never hurt
        assert float(rows[1]["psi"]) <= float(rows[0]["psi"]) + 1e-12

    def test_deterministic_modulo_timing(self, capsys):
        argv = ["grid-experiment", "--levels", "2", "--sweeps-set", "3"]
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        r1, r2 = parse_csv(out1)[0], parse_csv(out2)[0]
        r1.pop("seconds"), r2.pop("seconds")
        assert r1 == r2

    def test_bad_levels_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "grid-experiment", "--levels", "2,x")
        assert code == 2


class TestCompareBaseline:
    def test_k3_flow_estimate_is_tighter(self, capsys, k3_rhs):
        code, out, _ = run_cli(
            capsys,
            "compare-baseline",
            "--input",
            K3,
            "--rhs",
            k3_rhs,
            "--smoother-iterations",
            "0",
        )
        assert code == 0
        rows = parse_csv(out)
        assert [r["method"] for r in rows] == ["flow-estimate", "two-term-bound"]
        psi = float(rows[0]["psi_or_sqrtE"])
        bound = float(rows[1]["psi_or_sqrtE"])
        assert psi == pytest.approx(np.sqrt(2 / 3), rel=1e-9)
        assert bound >= psi - 1e-9
        true = float(rows[0]["true_error"])
        assert psi >= true - 1e-9

    def test_desk_scale_gate_exits_3(self, capsys, tmp_path):
        big = tmp_path / "big.mtx"
        write_matrix_market(big, random_connected_graph(2100, 60, seed=1))
        code, _, err = run_cli(
            capsys, "compare-baseline", "--input", str(big), "--max-iter", "1"
        )
        assert code == 3
        assert "numerical failure" in err


class TestEntryPoints:
    def test_module_invocation(self, k3_rhs):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "lapbound.cli",
                "estimate",
                "--input",
                K3,
                "--rhs",
                k3_rhs,
                "--smoother-iterations",
                "0",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.startswith("label,")

    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

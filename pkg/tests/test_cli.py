import csv
import math

import numpy as np
import pytest

from eqtomo import EquidistantConfig, build_state_set, born_probabilities, random_density
from eqtomo.cli import main, parse_theta, sweep_rows
from eqtomo.tomo_io import read_document, write_document


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def value_after(out, label):
    for line in out.splitlines():
        if line.startswith(label):
            return float(line[len(label):].split()[0])
    raise AssertionError(f"{label!r} not in output:\n{out}")


@pytest.mark.parametrize("text,expected", [("pi", math.pi), ("pi/2", math.pi / 2), ("2pi/3", 2 * math.pi / 3), ("0.25", 0.25)])
def test_parse_theta(text, expected):
    assert parse_theta(text) == pytest.approx(expected)


class TestStates:
    def test_sic_case(self, tmp_path, capsys):
        code, out, _ = run(capsys, "states", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--out", tmp_path / "s.json")
        assert code == 0
        assert "SIC: yes" in out
        assert value_after(out, "POVM completeness defect:") <= 1e-10
        assert read_document(tmp_path / "s.json").config.dim == 3

    def test_out_of_bound(self, tmp_path, capsys):
        code, _, err = run(capsys, "states", "--dim", 3, "--alpha-mod", 0.9, "--theta", "pi", "--out", tmp_path / "s.json")
        assert code == 2
        assert "lambda" in err.lower() or "negative" in err.lower()
        assert not (tmp_path / "s.json").exists()

    def test_orthonormal(self, tmp_path, capsys):
        code, out, _ = run(capsys, "states", "--dim", 5, "--alpha-mod", 0, "--theta", 0, "--out", tmp_path / "s.json")
        assert code == 0
        assert value_after(out, "POVM completeness defect:") <= 1e-12
        assert "SIC: no" in out

    def test_env_output_dir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("EQTOMO_OUTPUT_DIR", str(tmp_path))
        assert run(capsys, "states", "--dim", 3, "--alpha-mod", 0.2, "--theta", 1)[0] == 0
        assert (tmp_path / "states.eqt.json").exists()

    def test_usage_errors(self, capsys):
        assert run(capsys, "states", "--dim", 3)[0] == 1
        assert run(capsys, "states", "--dim", 3, "--alpha-mod", 0.2, "--theta", "banana")[0] == 1
        assert run(capsys, "nonsense")[0] == 1
        # out-of-range theta parses but fails validation
        assert run(capsys, "states", "--dim", 3, "--alpha-mod", 0.2, "--theta", 7)[0] == 2


class TestProbe:
    def test_sum_rule(self, tmp_path, capsys):
        out_file = tmp_path / "p.json"
        code, out, _ = run(capsys, "probe", "--dim", 5, "--alpha-mod", 0.2, "--theta", 1.3, "--random", "3,4", "--out", out_file)
        assert code == 0
        assert value_after(out, "sum of probabilities:") == pytest.approx(5, abs=1e-10)
        assert read_document(out_file).values.sum() == pytest.approx(5, abs=1e-10)

    def test_maximally_mixed_default(self, tmp_path, capsys):
        code, _, _ = run(capsys, "probe", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--out", tmp_path / "p.json")
        assert code == 0
        np.testing.assert_allclose(read_document(tmp_path / "p.json").values, 1 / 3, atol=1e-12)

    def test_state_file(self, tmp_path, capsys):
        rho = random_density(3, 2, 8)
        write_document(rho, tmp_path / "rho.json")
        code, _, _ = run(
            capsys, "probe", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--state", tmp_path / "rho.json", "--out", tmp_path / "p.json"
        )
        assert code == 0
        expected = born_probabilities(rho, build_state_set(EquidistantConfig(3, 0.5, math.pi)))
        np.testing.assert_array_equal(read_document(tmp_path / "p.json").values, expected.values)

    def test_dim_mismatch(self, tmp_path, capsys):
        write_document(random_density(5, 2, 8), tmp_path / "rho.json")
        code, _, err = run(
            capsys, "probe", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--state", tmp_path / "rho.json", "--out", tmp_path / "p.json"
        )
        assert code == 2
        assert "dim 5" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(
            capsys, "probe", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--state", tmp_path / "nope.json", "--out", tmp_path / "p.json"
        )
        assert code == 3

    def test_wrong_kind(self, tmp_path, capsys):
        write_document(EquidistantConfig(3, 0.5, math.pi), tmp_path / "c.json")
        code, _, _ = run(
            capsys, "probe", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--state", tmp_path / "c.json", "--out", tmp_path / "p.json"
        )
        assert code == 3


@pytest.fixture
def probs_file(tmp_path):
    table = born_probabilities(random_density(3, 3, 5), build_state_set(EquidistantConfig(3, 0.5, math.pi)))
    return write_document(table, tmp_path / "probs.json")


class TestSimulate:
    def test_deterministic(self, tmp_path, capsys, probs_file):
        for name in ("a.json", "b.json"):
            assert run(capsys, "simulate", "--probs", probs_file, "--shots", 5000, "--seed", 11, "--out", tmp_path / name)[0] == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        counts = read_document(tmp_path / "a.json")
        assert int(counts.counts.sum()) == 5000

    def test_zero_shots(self, tmp_path, capsys, probs_file):
        assert run(capsys, "simulate", "--probs", probs_file, "--shots", 0, "--seed", 1, "--out", tmp_path / "c.json")[0] == 1

    def test_probs_out(self, tmp_path, capsys, probs_file):
        code, _, _ = run(
            capsys, "simulate", "--probs", probs_file, "--shots", 100, "--seed", 1, "--out", tmp_path / "c.json", "--probs-out", tmp_path / "e.json"
        )
        assert code == 0
        est = read_document(tmp_path / "e.json")
        assert est.source == "estimated" and est.shots == 100


class TestReconstruct:
    def test_round_trip_with_truth(self, tmp_path, capsys):
        rho = random_density(5, 5, 3)
        write_document(rho, tmp_path / "rho.json")
        flags = ["--dim", 5, "--alpha-mod", 0.2, "--theta", 0.7]
        assert run(capsys, "probe", *flags, "--state", tmp_path / "rho.json", "--out", tmp_path / "p.json")[0] == 0
        code, out, _ = run(
            capsys, "reconstruct", "--probs", tmp_path / "p.json", *flags, "--truth", tmp_path / "rho.json", "--out", tmp_path / "r.json"
        )
        assert code == 0
        assert value_after(out, "fidelity:") >= 1 - 1e-8
        report = read_document(tmp_path / "r.json")
        np.testing.assert_allclose(report.rho_raw, rho.entries, atol=1e-8)

    def test_no_project(self, tmp_path, capsys, probs_file):
        code, out, _ = run(
            capsys, "reconstruct", "--probs", probs_file, "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--no-project", "--out", tmp_path / "r.json"
        )
        assert code == 0 and "projection: disabled" in out
        assert read_document(tmp_path / "r.json").rho_physical is None

    def test_even_dimension(self, tmp_path, capsys):
        table = born_probabilities(random_density(4, 4, 1), build_state_set(EquidistantConfig(4, 0.2, 0.0)))
        write_document(table, tmp_path / "p.json")
        code, _, err = run(
            capsys, "reconstruct", "--probs", tmp_path / "p.json", "--dim", 4, "--alpha-mod", 0.2, "--theta", 0, "--out", tmp_path / "r.json"
        )
        assert code == 2
        assert "do not appear in the equations system" in err

    def test_singular(self, tmp_path, capsys, probs_file):
        code, _, err = run(
            capsys, "reconstruct", "--probs", probs_file, "--dim", 3, "--alpha-mod", 1.0, "--theta", 0, "--out", tmp_path / "r.json"
        )
        assert code == 2
        assert "k=1" in err and "r=0" in err

    def test_malformed_input(self, tmp_path, capsys):
        (tmp_path / "bad.json").write_text('{"kind": "probabilities", ')
        code, _, err = run(
            capsys, "reconstruct", "--probs", tmp_path / "bad.json", "--dim", 3, "--alpha-mod", 0.5, "--theta", "pi", "--out", tmp_path / "r.json"
        )
        assert code == 3 and "document error" in err


class TestDemoEven:
    @pytest.mark.parametrize("n", [4, 6])
    def test_identical_tables(self, capsys, n):
        code, out, _ = run(capsys, "demo-even", "--dim", n)
        assert code == 0
        assert value_after(out, "max probability difference:") <= 1e-12
        assert value_after(out, "max state difference:") > 0

    def test_odd_rejected(self, capsys):
        assert run(capsys, "demo-even", "--dim", 3)[0] == 2


class TestSweep:
    def test_exact_mode(self, tmp_path, capsys):
        out_file = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys, "sweep", "--dim", 5, "--theta", 0, "--alpha-grid", "0.1:0.9:5", "--trials", 3, "--out", out_file
        )
        assert code == 0
        rows = list(csv.DictReader(out_file.open()))
        assert [r["status"] for r in rows] == ["ok"] * 5
        for r in rows:
            assert float(r["mean_fidelity"]) >= 1 - 1e-8
            assert math.isfinite(float(r["max_condition_number"]))

    def test_deterministic(self, tmp_path, capsys):
        args = ["sweep", "--dim", 3, "--theta", "pi", "--alpha-grid", "0.1:0.5:3", "--shots", 2000, "--trials", 4, "--seed", 9]
        run(capsys, *args, "--out", tmp_path / "a.csv")
        run(capsys, *args, "--out", tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_invalid_points_reported(self):
        rows = sweep_rows(3, math.pi, [0.5, 0.8], 0, 2, 0)
        assert rows[0][4] == "ok"
        assert rows[1][4] == "SpectrumNegative" and math.isnan(rows[1][1])

    def test_even_rejected(self, tmp_path, capsys):
        assert run(capsys, "sweep", "--dim", 4, "--theta", 0, "--alpha-grid", "0.1:0.2:2", "--out", tmp_path / "x.csv")[0] == 2

    def test_bad_grid(self, tmp_path, capsys):
        assert run(capsys, "sweep", "--dim", 3, "--theta", 0, "--alpha-grid", "0.1-0.2", "--out", tmp_path / "x.csv")[0] == 1

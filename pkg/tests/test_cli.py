import json
import subprocess
import sys

import numpy as np
import pytest

from sphdefect import cli
from sphdefect.harmonics import GauntTable, gaunt_table


def run(argv, capsys):
    """Invoke the CLI in-process; return (exit_code, stdout, stderr)."""
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPlumbing:
    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["no-such-command"])
        assert exc.value.code == 2

    def test_missing_required_flag_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["variance"])  # --d is required
        assert exc.value.code == 2

    def test_bad_range_syntax_exit_2(self, capsys):
        code, _, err = run(["variance", "--d", "2", "--l-range", "10:2"], capsys)
        assert code == 2
        assert "range" in err

    def test_l_and_range_mutually_exclusive(self, capsys):
        code, _, err = run(["variance", "--d", "2", "--l", "4",
                            "--l-range", "2:8:2"], capsys)
        assert code == 2
        assert "exactly one" in err

    def test_capability_refusal_exit_2(self, capsys):
        code, _, err = run(["gaunt", "--d", "2", "--l", "60"], capsys)
        assert code == 2
        assert "budget" in err

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0

    def test_console_entry_point(self):
        # module execution path used by the installed script
        proc = subprocess.run(
            [sys.executable, "-m", "sphdefect.cli", "facile", "--q", "1",
             "--no-timestamp"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "holds_diag" in proc.stdout


class TestVariance:
    def test_csv_schema_and_header(self, capsys):
        code, out, err = run(["variance", "--d", "2", "--l-range", "2:6:2",
                              "--tol", "1e-4", "--no-timestamp"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# sphdefect ")
        assert lines[1].startswith("# config: ")
        config = json.loads(lines[1].split("# config: ", 1)[1])
        assert config["command"] == "variance"
        assert config["d"] == 2
        assert config["l_range"] == "2:6:2"
        assert lines[2] == ("l,variance,l_pow_d_variance,tail_bound,"
                            "q_used,tol_achieved")
        assert len(lines) == 6
        row = lines[3].split(",")
        assert int(row[0]) == 2
        assert float(row[1]) == pytest.approx(1.91482, rel=1e-4)

    def test_byte_identical_reruns(self, capsys):
        argv = ["variance", "--d", "2", "--l", "4", "--tol", "1e-4",
                "--no-timestamp"]
        _, out1, _ = run(argv, capsys)
        _, out2, _ = run(argv, capsys)
        assert out1 == out2

    def test_timestamp_line_present_by_default(self, capsys):
        code, out, _ = run(["variance", "--d", "2", "--l", "4",
                            "--tol", "1e-4"], capsys)
        assert code == 0
        assert "# timestamp: " in out

    def test_json_format(self, capsys):
        code, out, _ = run(["variance", "--d", "2", "--l", "4", "--tol", "1e-4",
                            "--format", "json", "--no-timestamp"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["config"]["command"] == "variance"
        assert doc["result"][0]["l"] == 4
        assert doc["result"][0]["tol_achieved"] is True

    def test_output_file_and_env_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SPHDEFECT_OUTPUT_DIR", str(tmp_path))
        code, out, _ = run(["variance", "--d", "2", "--l", "4", "--tol", "1e-4",
                            "--no-timestamp", "-o", "sub/v.csv"], capsys)
        assert code == 0
        assert out == ""
        assert (tmp_path / "sub" / "v.csv").exists()

    def test_odd_degree_rows_are_zero(self, capsys):
        code, out, _ = run(["variance", "--d", "2", "--l", "5", "--tol", "1e-4",
                            "--no-timestamp"], capsys)
        assert code == 0
        row = out.splitlines()[3].split(",")
        assert float(row[1]) == 0.0
        assert float(row[3]) == 0.0


class TestConstant:
    def test_both_methods_json(self, capsys):
        code, out, _ = run(["constant", "--d", "2", "--no-timestamp"], capsys)
        assert code == 0
        r = json.loads(out)["result"]
        assert r["consistent"] is True
        assert r["exceeds_lower_bound"] is True
        assert r["series"]["value"] == pytest.approx(12.1114, rel=1e-4)
        assert r["disagreement"] <= r["combined_error_estimate"]
        assert r["lower_bound"] == pytest.approx(6.1584, rel=1e-4)

    def test_single_method(self, capsys):
        code, out, _ = run(["constant", "--d", "3", "--method", "integral",
                            "--no-timestamp"], capsys)
        assert code == 0
        r = json.loads(out)["result"]
        assert "series" not in r
        assert r["integral"]["value"] == pytest.approx(63.4661, rel=1e-4)

    def test_disagreement_exit_1(self, capsys, monkeypatch):
        # force a fake inflated series estimate through the plumbing
        real = cli.constant_estimate

        def skewed(d, method, **kw):
            est = real(d, method, **kw)
            if method == "series":
                return est.__class__(d=est.d, method=est.method,
                                     value=est.value + 1.0,
                                     error_estimate=est.error_estimate,
                                     params=est.params)
            return est

        monkeypatch.setattr(cli, "constant_estimate", skewed)
        code, out, err = run(["constant", "--d", "2", "--no-timestamp"], capsys)
        assert code == 1
        assert "disagree" in err
        assert json.loads(out)["result"]["consistent"] is False


class TestGaunt:
    def test_table_roundtrips_through_cli_file(self, capsys, tmp_path):
        path = tmp_path / "g24.txt"
        code, _, err = run(["gaunt", "--d", "2", "--l", "4",
                            "-o", str(path)], capsys)
        assert code == 0
        assert "canonical nonzero" in err
        back = GauntTable.load(str(path))
        assert np.array_equal(back.coefficients,
                              gaunt_table(2, 4).coefficients)

    def test_stdout_text_format(self, capsys):
        code, out, _ = run(["gaunt", "--d", "2", "--l", "2"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "2 2 5 6"


class TestDiagnostics:
    def test_lemcg_pass_exit_0(self, capsys):
        code, out, _ = run(["lemcg", "--d", "2", "--l", "4",
                            "--no-timestamp"], capsys)
        assert code == 0
        r = json.loads(out)["result"]
        assert r["pass"] is True
        assert r["max_offdiag_residual"] < 1e-9

    def test_lemcg_failure_exit_1(self, capsys, monkeypatch):
        real = cli.lemcg_check
        monkeypatch.setattr(cli, "lemcg_check",
                            lambda table: real(table) + 1e-6)
        code, out, err = run(["lemcg", "--d", "2", "--l", "2",
                              "--no-timestamp"], capsys)
        assert code == 1
        assert "diagnostic" in err
        assert json.loads(out)["result"]["pass"] is False

    def test_circulant_csv(self, capsys):
        code, out, _ = run(["circulant", "--d", "2", "--l-range", "2:4:2",
                            "--no-timestamp"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[2] == "l,sum,closed_form,rel_err,g"
        for line in lines[3:]:
            assert float(line.split(",")[3]) < 1e-9

    def test_facile_table_and_exit(self, capsys):
        code, out, _ = run(["facile", "--q-max", "4", "--no-timestamp"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 3 + 10  # all (q, p) with 1 <= q <= p <= 4
        assert all(line.split(",")[4] == "true" for line in lines[3:])


class TestMcClt:
    def test_json_run(self, capsys):
        code, out, err = run(["mc-clt", "--d", "2", "--l", "8", "--n", "60",
                              "--seed", "5", "--no-timestamp"], capsys)
        assert code == 0
        r = json.loads(out)["result"]
        assert r[0]["l"] == 8
        assert r[0]["n_realizations"] == 60

    def test_odd_skip_warning(self, capsys):
        code, out, err = run(["mc-clt", "--d", "2", "--l-range", "7:8",
                              "--n", "40", "--no-timestamp"], capsys)
        assert code == 0
        assert "skipping odd l=7" in err
        assert len(json.loads(out)["result"]) == 1

    def test_all_odd_is_usage_error(self, capsys):
        code, _, err = run(["mc-clt", "--d", "2", "--l", "7", "--n", "40"],
                           capsys)
        assert code == 2
        assert "no even l" in err

    def test_dump_realizations(self, capsys, tmp_path):
        path = tmp_path / "defects.csv"
        code, _, _ = run(["mc-clt", "--d", "2", "--l", "8", "--n", "30",
                          "--no-timestamp", "--dump-realizations", str(path)],
                         capsys)
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[2] == "realization,defect,normalized_defect"
        assert len(lines) == 3 + 30

    def test_workers_flag_accepted(self, capsys):
        code, _, err = run(["mc-clt", "--d", "2", "--l", "8", "--n", "40",
                            "--workers", "4", "--no-timestamp"], capsys)
        assert code == 0
        assert "serially" in err


class TestMoments:
    def test_half_range_values(self, capsys):
        code, out, _ = run(["moments", "--d", "2", "--l", "4",
                            "--k-range", "2:3", "--no-timestamp"], capsys)
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[3:]]
        from sphdefect.spherequad import gegenbauer_moment
        assert float(rows[0][1]) == pytest.approx(gegenbauer_moment(2, 4, 2),
                                                  rel=1e-15)
        assert float(rows[1][1]) == pytest.approx(gegenbauer_moment(2, 4, 3),
                                                  rel=1e-15)


class TestSelftest:
    def test_subset_passes(self, capsys):
        code, out, err = run(["selftest", "--criteria", "1,9",
                              "--no-timestamp"], capsys)
        assert code == 0
        assert "all 2 criteria passed" in err
        lines = out.splitlines()
        assert lines[2] == "criterion,name,passed,detail"
        assert len(lines) == 5

    def test_unknown_criterion_exit_2(self, capsys):
        code, _, err = run(["selftest", "--criteria", "42"], capsys)
        assert code == 2
        assert "unknown criteria" in err

    def test_failure_exit_1(self, capsys, monkeypatch):
        from sphdefect import acceptance

        def broken():
            return acceptance.CriterionResult(1, "forced", False, "injected")

        monkeypatch.setattr(acceptance, "CRITERIA", (broken,))
        code, out, err = run(["selftest", "--no-timestamp"], capsys)
        assert code == 1
        assert "FAILED" in err

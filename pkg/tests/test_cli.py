"""Front-end behavior: parsing, outputs, exit codes, determinism, schemas."""

import json
import math

import jsonschema
import pytest

import temporalis.cli as cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestAngleGrammar:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("pi", math.pi),
            ("-pi", -math.pi),
            ("pi/2", math.pi / 2),
            ("2pi/3", 2 * math.pi / 3),
            ("0.5pi", 0.5 * math.pi),
            ("3pi", 3 * math.pi),
            ("1.25", 1.25),
            ("-0.5", -0.5),
            ("PI / 4", math.pi / 4),
        ],
    )
    def test_accepted_forms(self, text, expected):
        assert cli.parse_angle(text) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("text", ["2*pi", "pi+1", "tau", "pi/0", ""])
    def test_rejected_forms(self, text):
        with pytest.raises(ValueError):
            cli.parse_angle(text)


class TestMzPoint:
    def test_lgi_only_regime(self, capsys):
        record = run_json(
            capsys, "mz-point", "--r1", "0.25", "--r2", "0.75", "--phi", "pi", "--q", "0.5"
        )
        assert abs(record["analytic"]["wigner_k"] - 1.5) < 1e-12
        assert record["lgi"]["violated"] is True
        assert record["analytic"]["delta"] == 0.0
        assert record["nsit"]["violated"] is False
        assert record["feasibility"]["feasible"] is False
        jsonschema.validate(record, cli.REPORT_SCHEMAS["mz-point"])

    def test_nsit_only_regime(self, capsys):
        record = run_json(
            capsys, "mz-point", "--r1", "0.5", "--r2", "0.5", "--phi", "pi", "--q", "1"
        )
        assert abs(record["analytic"]["wigner_k"] - 1.0) < 1e-12
        assert record["lgi"]["violated"] is False
        assert abs(record["analytic"]["delta"] + 0.5) < 1e-12
        assert record["nsit"]["violated"] is True

    def test_classical_limit(self, capsys):
        record = run_json(
            capsys, "mz-point", "--r1", "0", "--r2", "0", "--phi", "0", "--q", "1"
        )
        assert record["lgi"]["violated"] is False
        assert record["nsit"]["violated"] is False
        assert record["feasibility"]["feasible"] is True

    def test_invalid_params_exit_2(self, capsys):
        code, _, err = run(capsys, "mz-point", "--r1", "1.5", "--r2", "0", "--phi", "0", "--q", "0")
        assert code == 2
        assert "r1" in err

    def test_bad_angle_exit_2(self, capsys):
        code, _, err = run(capsys, "mz-point", "--r1", "0", "--r2", "0", "--phi", "2*pi", "--q", "0")
        assert code == 2

    def test_missing_param_exit_2(self, capsys):
        code, _, err = run(capsys, "mz-point", "--r1", "0.5", "--r2", "0.5", "--phi", "0")
        assert code == 2
        assert "--q" in err

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "mz-point", "--r1", "0.25", "--r2", "0.75", "--phi", "pi", "--q", "0.5",
            "--format", "csv",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("r1,r2,phi,q,c01,")
        assert len(lines) == 2


class TestMzScan:
    ARGS = (
        "mz-scan",
        "--r1-values", "0.25,0.5", "--r2-values", "0.5,0.75",
        "--phi-values", "0,pi", "--q-values", "0.5,1",
    )

    def test_rows_and_lexicographic_order(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == ",".join(cli._SCAN_COLUMNS)
        assert len(lines) == 1 + 16
        r1_column = [line.split(",")[0] for line in lines[1:]]
        assert r1_column == sorted(r1_column)

    def test_byte_identical_reruns(self, capsys, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert cli.main([*self.ARGS, "--out", str(first)]) == 0
        assert cli.main([*self.ARGS, "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_parallel_output_matches_serial(self, capsys, tmp_path, monkeypatch):
        args = ("mz-scan", "--r1-values", "0,0.3,0.6", "--r2-values", "0.2,0.8,1",
                "--phi-values", "0,pi/2,pi", "--q-values", "0,0.5,1")
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        monkeypatch.setenv("TEMPORALIS_THREADS", "1")
        assert cli.main([*args, "--out", str(serial)]) == 0
        monkeypatch.setenv("TEMPORALIS_THREADS", "4")
        assert cli.main([*args, "--out", str(parallel)]) == 0
        assert serial.read_bytes() == parallel.read_bytes()

    def test_mixture_q_axis_zeroes_delta_column(self, capsys):
        code, out, _ = run(
            capsys, "mz-scan", "--r1-points", "4", "--r2-points", "4",
            "--phi-points", "5", "--q-values", "0.5",
        )
        assert code == 0
        lines = out.strip().split("\n")[1:]
        delta_index = cli._SCAN_COLUMNS.index("delta")
        assert all(float(line.split(",")[delta_index]) == 0.0 for line in lines)

    def test_json_format_validates(self, capsys):
        record = run_json(capsys, "mz-scan", "--r1-values", "0.25", "--r2-values", "0.75",
                          "--phi-values", "pi", "--q-values", "0.5", "--format", "json")
        jsonschema.validate(record, cli.REPORT_SCHEMAS["mz-scan"])
        assert record["rows"][0][7] == pytest.approx(1.5)  # k column

    def test_oversize_grid_exit_2(self, capsys):
        code, _, err = run(capsys, "mz-scan", "--r1-points", "200", "--r2-points", "200",
                           "--phi-points", "200", "--q-points", "200")
        assert code == 2
        assert "guard" in err


class TestSpin:
    def test_counterexample_record(self, capsys):
        record = run_json(capsys, "spin", "--omega", "1", "--times", "0,pi/4,pi/2,3pi/4")
        jsonschema.validate(record, cli.REPORT_SCHEMAS["spin"])
        assert abs(record["lgi"]["lhs"] - 2.0 * math.sqrt(2.0)) < 1e-12
        assert record["lgi"]["violated"] is True
        assert all(not item["violated"] for item in record["nsit"])
        assert all(item["feasible"] for item in record["feasibility"]["pairwise"])
        assert record["feasibility"]["full"]["feasible"] is False

    def test_three_times_uses_wigner_form(self, capsys):
        record = run_json(capsys, "spin", "--omega", "1", "--times", "0,pi/3,2pi/3")
        assert record["lgi"]["form"] == "wigner3"
        assert abs(record["lgi"]["lhs"] - 1.5) < 1e-12

    def test_unsorted_times_exit_2(self, capsys):
        code, _, err = run(capsys, "spin", "--omega", "1", "--times", "1,0")
        assert code == 2


class TestDoubleslit:
    def test_default_report(self, capsys):
        record = run_json(capsys, "doubleslit")
        jsonschema.validate(record, cli.REPORT_SCHEMAS["doubleslit"])
        assert abs(record["kappa"] - 0.8992442425890482) < 1e-6
        assert record["local_maxima"]["I"] >= 3
        assert record["local_maxima"]["II_AND_III"] <= 1

    def test_pattern_csv(self, capsys):
        code, out, _ = run(capsys, "doubleslit", "--experiment", "I", "--n-points", "201",
                           "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "x,density,mass"
        assert len(lines) == 202

    def test_coarse_grid_exit_2(self, capsys):
        code, _, err = run(capsys, "doubleslit", "--d", "50", "--t-prop", "2",
                           "--x-min", "-20", "--x-max", "20", "--n-points", "201")
        assert code == 2
        assert "coarse" in err


class TestFeasibilityCommand:
    @staticmethod
    def problem_file(tmp_path, c02):
        problem = {
            "checkpoints": 3,
            "outcomes": [[1, -1], [1, -1], [1, -1]],
            "constraints": [
                {"indices": [0, 1], "table": {"+1,+1": 0.375, "+1,-1": 0.125, "-1,+1": 0.125, "-1,-1": 0.375}},
                {"indices": [1, 2], "table": {"+1,+1": 0.375, "+1,-1": 0.125, "-1,+1": 0.125, "-1,-1": 0.375}},
                {"indices": [0, 2], "table": {
                    "+1,+1": 0.25 * (1 + c02), "+1,-1": 0.25 * (1 - c02),
                    "-1,+1": 0.25 * (1 - c02), "-1,-1": 0.25 * (1 + c02)}},
            ],
        }
        path = tmp_path / "problem.json"
        path.write_text(json.dumps(problem))
        return path

    def test_infeasible_wigner_statistics(self, capsys, tmp_path):
        path = self.problem_file(tmp_path, c02=-0.5)  # correlations 1/2, 1/2, -1/2
        record = run_json(capsys, "feasibility", "--problem", str(path))
        jsonschema.validate(record, cli.REPORT_SCHEMAS["feasibility"])
        assert record["feasible"] is False
        assert record["certificate"]

    def test_feasible_statistics_with_witness(self, capsys, tmp_path):
        path = self.problem_file(tmp_path, c02=0.5)
        record = run_json(capsys, "feasibility", "--problem", str(path))
        assert record["feasible"] is True
        assert abs(sum(record["witness"].values()) - 1.0) < 1e-9

    def test_missing_problem_exit_2(self, capsys):
        code, _, err = run(capsys, "feasibility")
        assert code == 2


class TestNsitSample:
    def test_max_violation_all_significant(self, capsys):
        record = run_json(
            capsys, "nsit-sample", "--r1", "0.5", "--r2", "0.5", "--phi", "0", "--q", "1",
            "--n", "2000", "--trials", "20", "--seed", "7",
        )
        jsonschema.validate(record, cli.REPORT_SCHEMAS["nsit-sample"])
        assert record["summary"]["n_significant"] == 20

    def test_null_point_mostly_insignificant(self, capsys):
        record = run_json(
            capsys, "nsit-sample", "--r1", "0.5", "--r2", "0.5", "--phi", "0", "--q", "0.5",
            "--n", "2000", "--trials", "40", "--seed", "7",
        )
        assert record["summary"]["n_significant"] <= 6

    def test_deterministic_given_seed(self, capsys):
        args = ("nsit-sample", "--r1", "0.5", "--r2", "0.5", "--phi", "0", "--q", "1",
                "--n", "500", "--trials", "3", "--seed", "11")
        first = run_json(capsys, *args)
        second = run_json(capsys, *args)
        assert first == second


class TestConfigRoute:
    def test_config_equivalent_to_flags(self, capsys, tmp_path):
        config = tmp_path / "point.json"
        config.write_text(json.dumps({"r1": 0.25, "r2": 0.75, "phi": "pi", "q": 0.5}))
        via_config = run_json(capsys, "mz-point", "--config", str(config))
        via_flags = run_json(
            capsys, "mz-point", "--r1", "0.25", "--r2", "0.75", "--phi", "pi", "--q", "0.5"
        )
        assert via_config == via_flags

    def test_unknown_key_rejected(self, capsys, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"r1": 0.25, "r2": 0.75, "phi": "pi", "q": 0.5, "bogus": 1}))
        code, _, err = run(capsys, "mz-point", "--config", str(config))
        assert code == 2
        assert "bogus" in err or "invalid config" in err

    def test_config_and_flags_conflict(self, capsys, tmp_path):
        config = tmp_path / "point.json"
        config.write_text(json.dumps({"r1": 0.25, "r2": 0.75, "phi": "pi", "q": 0.5}))
        code, _, err = run(capsys, "mz-point", "--config", str(config), "--r1", "0.3")
        assert code == 2
        assert "--r1" in err

    def test_inline_problem_config(self, capsys, tmp_path):
        config = tmp_path / "feas.json"
        config.write_text(json.dumps({
            "problem_json": {
                "outcomes": [[1, -1]],
                "constraints": [{"indices": [0], "table": {"+1": 0.5, "-1": 0.5}}],
            }
        }))
        record = run_json(capsys, "feasibility", "--config", str(config))
        assert record["feasible"] is True


class TestOutputPlumbing:
    def test_out_writes_file_with_lf_endings(self, capsys, tmp_path):
        target = tmp_path / "row.csv"
        code = cli.main([
            "mz-point", "--r1", "0.25", "--r2", "0.75", "--phi", "pi", "--q", "0.5",
            "--format", "csv", "--out", str(target),
        ])
        assert code == 0
        data = target.read_bytes()
        assert b"\r" not in data and data.endswith(b"\n")

    def test_csv_uses_17_significant_digits(self, capsys):
        _, out, _ = run(capsys, "mz-point", "--r1", "0.25", "--r2", "0.75", "--phi", "pi",
                        "--q", "0.5", "--format", "csv")
        row = out.strip().split("\n")[1].split(",")
        assert row[2] == f"{math.pi:.17g}"

import csv
import io
import json
import subprocess
import sys

import pytest

from confboot.cli import main, parse_grid, UsageError
from confboot.schedule import DeploymentSchedule

FOUR_FOLD = '{"op_rate": 1, "segments": [{"start": 0, "rate": 1}, {"start": 5, "rate": 4}]}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def parse_kv(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


class TestBound:
    def test_anchor(self, capsys):
        code, out, _ = run(capsys, "bound", "--pp", "0.9", "--tpast", "1", "--tfut", "5")
        kv = parse_kv(out)
        assert code == 0
        assert float(kv["mishap_probability"]) == pytest.approx(0.06, abs=0.005)
        assert kv["bound"] == "0.93993"

    def test_certain(self, capsys):
        _, out, _ = run(capsys, "bound", "--pp", "1.0", "--tpast", "1", "--tfut", "100")
        assert float(parse_kv(out)["mishap_probability"]) == 0.0

    def test_bounded(self, capsys):
        _, out, _ = run(capsys, "bound", "--pl", "0.9", "--ql", "1e-12", "--tpast", "1", "--tfut", "5")
        assert float(parse_kv(out)["mishap_probability"]) == pytest.approx(0.06, abs=0.005)

    def test_full_precision_json(self, capsys):
        _, out, _ = run(capsys, "bound", "--pp", "0.9", "--tpast", "1", "--tfut", "5", "--format", "json")
        assert set(json.loads(out)) == {"bound", "minimizer_q", "mishap_probability"}

    @pytest.mark.parametrize(
        "argv",
        [
            ("--pp", "1.5", "--tpast", "1", "--tfut", "1"),
            ("--pp", "0.5", "--tpast", "0", "--tfut", "1"),
            ("--pl", "0.5", "--tpast", "1", "--tfut", "1"),
            ("--pp", "0.5", "--pl", "0.5", "--ql", "0.1", "--tpast", "1", "--tfut", "1"),
            ("--tpast", "1", "--tfut", "1"),
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, "bound", *argv)
        assert code == 2 and err.startswith("error:")


class TestFigure1:
    def test_rows(self, capsys):
        _, out, _ = run(capsys, "figure1", "--pp", "0.9", "0.82", "--ratios", "0,1,5")
        got = {(float(r["pp"]), float(r["ratio"])): float(r["mishap_prob"]) for r in rows(out)}
        assert got[(0.9, 5.0)] == pytest.approx(0.06, abs=0.005)
        assert got[(0.82, 1.0)] == pytest.approx(0.0496, abs=0.001)
        assert got[(0.9, 0.0)] == 0.0 and got[(0.82, 0.0)] == 0.0
        assert out.splitlines()[0] == "pp,ratio,mishap_prob"

    def test_grid_spec(self, capsys):
        _, out, _ = run(capsys, "figure1", "--pp", "0.5", "--ratios", "0:2:0.5")
        assert [float(r["ratio"]) for r in rows(out)] == [0.0, 0.5, 1.0, 1.5, 2.0]


class TestTable1:
    def test_reachable_rows(self, capsys):
        _, out, _ = run(capsys, "table1")
        table = {float(r["pp"]): (float(r["k"]), float(r["k_linear"])) for r in rows(out)}
        assert list(table) == [0.92, 0.82, 0.72, 0.5, 0.1]
        assert table[0.82][0] == pytest.approx(1.0, abs=0.05)
        assert table[0.82][1] == pytest.approx(0.41, abs=0.01)
        assert table[0.72][0] == pytest.approx(0.5, rel=0.05)
        assert table[0.5][1] == pytest.approx(0.1, abs=0.01)
        assert table[0.1][1] == pytest.approx(0.02, abs=0.01)

    def test_full_precision(self, capsys):
        _, out, _ = run(capsys, "table1", "--pp", "0.5", "--precision", "full")
        k = rows(out)[0]["k"]
        assert len(k.replace(".", "").lstrip("0")) == 17

    def test_unbounded_rendered_inf(self, capsys):
        _, out, _ = run(capsys, "table1", "--pp", "0.99")
        assert rows(out)[0]["k"] == "inf"


class TestScenario:
    def test_four_fold_drop(self, capsys):
        _, out, _ = run(capsys, "scenario", "--schedule-json", FOUR_FOLD, "--k", "5", "--grid", "5.001")
        assert float(rows(out)[0]["t_hor"]) == pytest.approx(4.47, abs=0.01)
        assert out.splitlines()[0] == "t,fleet,T_past,t_hor,ratio"

    def test_linear_ratio(self, capsys, tmp_path):
        path = tmp_path / "linear.json"
        path.write_text(DeploymentSchedule.constant_rate(2.0, op_rate=3.0).to_json())
        _, out, _ = run(capsys, "scenario", "--schedule", str(path), "--k", "5", "--grid", "1:10:1")
        assert all(float(r["ratio"]) == pytest.approx(1.44949, abs=1e-5) for r in rows(out))

    def test_constant_fleet_from_constraint(self, capsys):
        sched = DeploymentSchedule.constant_fleet(4.0, 1.0).to_json()
        _, out, _ = run(capsys, "scenario", "--schedule-json", sched, "--pp", "0.9", "--confidence", "0.5",
                        "--grid", "1,2")
        assert [r["t_hor"] for r in rows(out)] == ["inf", "inf"]
        _, out, _ = run(capsys, "scenario", "--schedule-json", sched, "--k", "5", "--grid", "1,2")
        assert [float(r["t_hor"]) for r in rows(out)] == [5.0, 10.0]

    def test_unaware_flag(self, capsys):
        double = '{"op_rate": 1, "segments": [{"start": 0, "rate": 1}, {"start": 5, "rate": 2}]}'
        _, out, _ = run(capsys, "scenario", "--schedule-json", double, "--k", "5", "--grid", "5", "--unaware")
        assert float(rows(out)[0]["t_hor"]) == pytest.approx(7.246, abs=0.01)

    def test_bounded_constraint(self, capsys):
        _, out, _ = run(capsys, "scenario", "--schedule-json", FOUR_FOLD, "--pl", "0.9", "--ql", "1e-6",
                        "--confidence", "0.95", "--grid", "1,2")
        assert len(rows(out)) == 2

    def test_json_output(self, capsys, tmp_path):
        out_path = tmp_path / "trace.json"
        code, out, _ = run(capsys, "scenario", "--schedule-json", FOUR_FOLD, "--k", "5", "--grid", "1,6",
                           "--format", "json", "--out", str(out_path))
        assert code == 0 and out == ""
        data = json.loads(out_path.read_text())
        assert [d["t"] for d in data] == [1.0, 6.0]

    def test_malformed_schedule(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"op_rate": 1,\n "segments": [{"start": 0, "rate": "fast"}]}')
        code, _, err = run(capsys, "scenario", "--schedule", str(path), "--k", "5", "--grid", "1:3:1")
        assert code == 2 and "segments[0].rate" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "scenario", "--schedule", str(tmp_path / "nope.json"), "--k", "5", "--grid", "1")
        assert code == 2


class TestValidate:
    def test_anchor_passes(self, capsys):
        code, out, _ = run(capsys, "validate", "--pp", "0.9", "--tpast", "1", "--tfut", "5")
        kv = parse_kv(out)
        assert code == 0 and kv["result"] == "PASS"
        assert float(kv["gap"]) < 1e-3

    def test_certain(self, capsys):
        code, out, _ = run(capsys, "validate", "--pp", "1.0", "--tpast", "1", "--tfut", "5")
        kv = parse_kv(out)
        assert code == 0
        assert kv["engine_bound"] == kv["grid_oracle_bound"] == "1"
        assert kv["monte_carlo"].startswith("1 ")

    def test_table_row(self, capsys):
        code, out, _ = run(capsys, "validate", "--pp", "0.5", "--tpast", "10", "--tfut", "2")
        assert code == 0
        assert float(parse_kv(out)["engine_bound"]) == pytest.approx(0.95, abs=0.001)

    def test_bounded(self, capsys):
        code, out, _ = run(capsys, "validate", "--pl", "0.8", "--ql", "1e-4", "--tpast", "100", "--tfut", "300",
                           "--mc-samples", "200000")
        assert code == 0, out

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(capsys, "validate", "--pp", "0.9", "--tpast", "1", "--tfut", "5",
                           "--grid-size", "3", "--max-gap", "1e-9", "--mc-samples", "10000")
        assert code == 1 and "oracle_gap: FAIL" in out

    def test_non_integer_counts(self, capsys):
        code, _, _ = run(capsys, "validate", "--pp", "0.9", "--tpast", "1.5", "--tfut", "5")
        assert code == 2

    def test_deterministic(self, capsys):
        argv = ("validate", "--pp", "0.7", "--tpast", "3", "--tfut", "9", "--mc-samples", "100000", "--seed", "4")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_parse_grid():
    assert parse_grid("1:2:0.25") == [1.0, 1.25, 1.5, 1.75, 2.0]
    assert parse_grid("3,1.5") == [3.0, 1.5]
    for bad in ("2:1:1", "1:2:0", "a,b", "0,1", ""):
        with pytest.raises(UsageError):
            parse_grid(bad)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "confboot", "table1", "--pp", "0.5"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("pp,k,k_linear\n0.5,0.202658,")

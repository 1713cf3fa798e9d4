import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nlqm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path_or_text):
    text = path_or_text.read_text() if hasattr(path_or_text, "read_text") else path_or_text
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestSimulate:
    def test_converges(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, _, err = run(capsys, "simulate", "--mu", "1", "--b", "1", "--N", "1", "--x0", "0.01", "--y0", "0",
                           "--t-end", "20", "--out", str(out))
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["t", "x", "y"]
        assert abs(float(rows[-1][2]) - 1.0) <= 1e-6
        assert all(float(r[1]) > 0 for r in rows)
        assert "# simulate config:" in err

    def test_seventeen_digits(self, capsys):
        code, out, _ = run(capsys, "simulate", "--mu", "1", "--b", "1", "--x0", "0.3", "--y0", "0.1",
                           "--t-end", "0.01", "--dt", "0.001")
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 11
        assert float(rows[5][0]) == 0.005
        assert all("%.17g" % float(cell) == cell for cell in rows[3])

    def test_levinson_inadmissible(self, capsys):
        code, _, err = run(capsys, "simulate", "--mu", "1", "--b", "-1", "--form", "levinson")
        assert code == 1
        assert "b + mu != 0" in err

    def test_no_flags(self, capsys):
        code, _, err = run(capsys, "simulate")
        assert code == 1
        assert "usage" in err

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["simulate", "--frobnicate"])
        assert ei.value.code == 1

    def test_N_zero_rejected(self, capsys):
        code, _, err = run(capsys, "simulate", "--mu", "1", "--b", "1", "--N", "0", "--x0", "0.1", "--y0", "0",
                           "--t-end", "1")
        assert code == 1 and "N" in err

    def test_failure_writes_partial(self, capsys, tmp_path):
        out = tmp_path / "part.csv"
        code, _, err = run(capsys, "simulate", "--mu", "1", "--b", "1", "--x0", "0.3", "--y0", "0", "--t-end", "10",
                           "--dt", "0.01", "--max-steps", "20", "--out", str(out))
        assert code == 2
        assert "max_steps" in err
        _, rows = read_csv(out)
        assert 1 <= len(rows) <= 21

    def test_lienard_json(self, capsys):
        code, out, _ = run(capsys, "simulate", "--mu", "0.5", "--b", "-1", "--N", str(math.sqrt(2.5)), "--x0", "0.0625",
                           "--y0", "0", "--form", "lienard", "--t-end", "1", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["columns"] == ["t", "u", "du"]
        assert data["form"] == "lienard-y"
        # y' = mu (N^2 - y^2) + 4 b x = 0.5 * 2.5 - 0.25 = 1
        assert data["rows"][0][2] == pytest.approx(1.0, abs=1e-15)

    def test_config_and_flag_precedence(self, capsys, tmp_path):
        cfgfile = tmp_path / "c.json"
        cfgfile.write_text(json.dumps({"mu": 1, "b": 1, "x0": 0.2, "y0": 0.0, "t-end": 0.5, "N": 3}))
        code, out, err = run(capsys, "simulate", "--config", str(cfgfile), "--N", "1")
        assert code == 0
        echo = json.loads(err.splitlines()[0].split("config: ", 1)[1])
        assert echo["N"] == 1.0 and echo["mu"] == 1 and echo["t_end"] == 0.5

    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--config", str(tmp_path / "nope.json"))
        assert code == 1


class TestEquilibria:
    def test_three(self, capsys):
        code, out, _ = run(capsys, "equilibria", "--mu", "1", "--b", "1", "--N", "1")
        assert code == 0
        data = json.loads(out)
        assert [d["class"] for d in data] == ["stable-node", "unstable-node", "saddle"]
        assert data[0]["state_order"] == ["y", "x"]

    def test_b0_gives_two(self, capsys):
        code, out, _ = run(capsys, "equilibria", "--mu", "1", "--b", "0", "--N", "1")
        assert code == 0 and len(json.loads(out)) == 2

    def test_stable_at_N2(self, capsys):
        code, out, _ = run(capsys, "equilibria", "--mu", "0.5", "--b", "0.5", "--N", "2")
        data = json.loads(out)
        assert data[0]["point"] == [0.0, 2.0] and data[0]["class"] == "stable-node"


class TestVerify:
    def test_sn(self, capsys):
        code, out, _ = run(capsys, "verify", "--family", "sn", "--mu", "0.5")
        data = json.loads(out)
        assert code == 0 and data["passed"]
        assert data["max_abs_residual"] <= 1e-8

    def test_b0_constraint_named(self, capsys):
        code, _, err = run(capsys, "verify", "--family", "soliton-b0", "--mu", "1", "--N", "1", "--E", "10")
        assert code == 1
        assert "E < 8mu^2 required" in err

    @pytest.mark.parametrize("argv", [
        ("--family", "soliton-general", "--mu", "1", "--b", "-2", "--N", "1"),
        ("--family", "soliton-b0", "--mu", "1", "--N", "1", "--E", "4"),
        ("--family", "soliton-mu0", "--b", "-2", "--N", "1", "--E", "10"),
        ("--family", "abel", "--B", "2", "--N", "2"),
    ])
    def test_pass(self, capsys, argv):
        code, out, _ = run(capsys, "verify", *argv)
        data = json.loads(out)
        assert code == 0 and data["passed"]
        if "first_integral" in data:
            assert data["first_integral"]["max_deviation"] <= 1e-6

    def test_missing_family(self, capsys):
        assert run(capsys, "verify", "--mu", "1")[0] == 1


class TestFigure:
    def test_fig2(self, capsys, tmp_path):
        code, _, err = run(capsys, "figure", "fig2", "--out", str(tmp_path))
        assert code == 0
        header, rows = read_csv(tmp_path / "fig2.csv")
        assert header == ["t", "x_eq30", "x_eq32", "x_eq33"]
        assert len(rows) == 1201
        assert rows[0] == ["0", "0.5", "0.5625", "0.25"]
        assert "warning:" in err and "E < 8mu^2" in err

    def test_fig1(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure", "fig1", "--out", str(tmp_path))
        assert code == 0
        for N in (1, 2):
            header, rows = read_csv(tmp_path / f"fig1_N{N}.csv")
            assert header == ["xi", "y_B1", "y_B2"]
            assert len(rows) == 1201
            by_xi = {float(r[0]): r for r in rows}
            assert float(by_xi[1.0][1]) == N and float(by_xi[1.0][2]) == N
            assert float(by_xi[0.0][1]) == N and float(by_xi[0.0][2]) == N / 2

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(capsys, "figure", "fig1", "--out", str(a))
        run(capsys, "figure", "fig1", "--out", str(b))
        assert (a / "fig1_N1.csv").read_bytes() == (b / "fig1_N1.csv").read_bytes()

    def test_unwritable(self, capsys, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code, _, err = run(capsys, "figure", "fig2", "--out", str(blocker / "sub"))
        assert code == 2


class TestElliptic:
    def test_k0_is_sin(self, capsys):
        code, out, _ = run(capsys, "elliptic", "--k", "0", "--u-max", "3.14159")
        _, rows = read_csv(out)
        a = np.array(rows, dtype=float)
        assert code == 0 and np.max(np.abs(a[:, 1] - np.sin(a[:, 0]))) <= 1e-12

    def test_k1_is_tanh(self, capsys):
        _, out, _ = run(capsys, "elliptic", "--k", "1")
        a = np.array(read_csv(out)[1], dtype=float)
        assert np.max(np.abs(a[:, 1] - np.tanh(a[:, 0]))) <= 1e-12

    def test_identity(self, capsys):
        _, out, _ = run(capsys, "elliptic", "--k", "0.5", "--u-max", "10")
        header, rows = read_csv(out)
        a = np.array(rows, dtype=float)
        assert header == ["u", "sn", "cn", "dn"]
        assert np.max(np.abs(a[:, 1] ** 2 + a[:, 2] ** 2 - 1)) <= 1e-12

    @pytest.mark.parametrize("k", ["1.5", "-0.2"])
    def test_out_of_range(self, capsys, k):
        assert run(capsys, "elliptic", "--k", k)[0] == 1


def test_no_command(capsys):
    assert run(capsys)[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nlqm", "equilibria", "--mu", "1", "--b", "1"],
                       capture_output=True, text=True, env={"NO_COLOR": "1", "PATH": ""})
    assert r.returncode == 0
    assert len(json.loads(r.stdout)) == 3

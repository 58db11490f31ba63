import json

from click.testing import CliRunner

from ampleangles.bin.aa import cli


def invoke(*args):
    return CliRunner().invoke(cli, list(args))


class TestDescribe:
    def test_text(self):
        result = invoke("describe", "--base", "F2", "--chain", "Z,F")
        assert result.exit_code == 0, result.output
        assert "-K = 2Z+4F, K^2 = 8" in result.output
        assert "(K + C)^2 = 4" in result.output

    def test_json(self):
        result = invoke("describe", "--base", "P2", "--blow-up", "-", "--format", "json")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["kind"] == "describe"
        assert data["generators"] == ["H", "E1"]
        assert data["anticanonical"] == "3H-E1"

    def test_csv_is_rejected(self):
        result = invoke("describe", "--format", "csv")
        assert result.exit_code == 2

    def test_bad_base(self):
        result = invoke("describe", "--base", "Q3")
        assert result.exit_code == 2
        assert "Unknown base surface" in result.output

    def test_bad_chain(self):
        result = invoke("describe", "--chain", "Z,Q")
        assert result.exit_code == 2

    def test_zero_denominator(self):
        result = invoke("describe", "--base", "P2", "--chain", "1/0H")
        assert result.exit_code == 2
        assert "Bad coefficient" in result.output


class TestAmpleAngles:
    def test_blown_up_plane(self):
        result = invoke(
            "aa", "--base", "P2", "--blow-up", "-", "--chain", "E1", "--line-bundle", "H"
        )
        assert result.exit_code == 0, result.output
        assert "interval: (0, 1)" in result.output
        assert "0 in closure: True (interval (0, 1))" in result.output

    def test_csv(self):
        result = invoke(
            "aa",
            "--base",
            "P2",
            "--blow-up",
            "-",
            "--chain",
            "E1",
            "--line-bundle",
            "H",
            "--format",
            "csv",
        )
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines == ["kind,beta1,quadratic_sign", "vertex,0,0", "vertex,1,1"]

    def test_hirzebruch_open_orthant(self):
        result = invoke("aa", "--base", "F3", "--chain", "Z", "--box", "none", "--format", "json")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert [vertex["point"] for vertex in data["vertices"]] == [["0"], ["2/3"]]
        assert data["hrep"]["box"] is None

    def test_needs_chain(self):
        result = invoke("aa", "--base", "F1")
        assert result.exit_code == 2
        assert "needs --chain" in result.output

    def test_bad_box(self):
        assert invoke("aa", "--chain", "Z", "--box", "abc").exit_code == 2
        assert invoke("aa", "--chain", "Z", "--box=-1").exit_code == 2


class TestTail:
    def test_text(self):
        result = invoke("tail", "--base", "F1", "--h", "1")
        assert result.exit_code == 0, result.output
        assert "verdict: ALF_ModuloCurves" in result.output
        assert "budget (K_s + c)^2 = 3, x = 1" in result.output

    def test_over_budget(self):
        result = invoke("tail", "--base", "F1", "--h", "2", "--v", "2")
        assert result.exit_code == 0, result.output
        assert "verdict: NotALF_Budget" in result.output

    def test_bad_order(self):
        result = invoke("tail", "--h", "1", "--order", "LL")
        assert result.exit_code == 2

    def test_cycle(self):
        result = invoke("tail", "--chain", "Z,F,S=Z+F,F", "--h", "1")
        assert result.exit_code == 2
        assert "no tails" in result.output

    def test_curves_and_check(self, tmp_path):
        curves = tmp_path / "curves.json"
        curves.write_text(json.dumps([{"label": "section", "class": "Z+F"}]))
        out = tmp_path / "out"
        result = invoke(
            "tail", "--h", "1", "--curves", str(curves), "--format", "json", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        data = json.loads((out / "tail.json").read_text())
        assert "section" in data["curves"]

        result = invoke("check", str(out / "tail.json"))
        assert result.exit_code == 0, result.output
        assert "ok $.origin" in result.output.splitlines()

    def test_missing_curve_file(self, tmp_path):
        result = invoke("tail", "--curves", str(tmp_path / "missing.json"))
        assert result.exit_code == 2


class TestSweep:
    def test_text(self):
        result = invoke("sweep", "--n-min", "1", "--n-max", "1", "--max-x", "1")
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("n=1 r=2 h=0 v=0 x=0 budget=3 verdict=ALF_ModuloCurves")

    def test_csv(self, tmp_path):
        args = ["--n-min", "0", "--n-max", "1", "--max-x", "1", "--format", "csv"]
        result = invoke("sweep", *args, "--out", str(tmp_path))
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert lines[0] == "n,r,h,v,x,base_budget,budget,verdict,quadratic,tilde_lp,block_lp"
        assert len(lines) == 1 + 2 * 3

    def test_bad_range(self):
        assert invoke("sweep", "--r", "5").exit_code == 2
        assert invoke("sweep", "--jobs", "0").exit_code == 2


class TestVerify:
    def test_single_check(self):
        result = invoke("verify", "--only", "adjunction", "--quick")
        assert result.exit_code == 0, result.output
        assert result.output.startswith("PASS adjunction")

    def test_json(self):
        result = invoke("verify", "--only", "budget", "--quick", "--format", "json")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["passed"] is True
        assert [check["name"] for check in data["checks"]] == ["budget"]

    def test_unknown_check(self):
        assert invoke("verify", "--only", "nope").exit_code == 2


class TestCheck:
    def test_no_certificates(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("{}")
        result = invoke("check", str(path))
        assert result.exit_code == 0
        assert "no certificates found" in result.output

    def test_failure(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"k": 1, "m": 1, "matrix": [["1"]]},
                    "certificate": {"type": "feasible", "point": ["-1"]},
                }
            )
        )
        result = invoke("check", str(path))
        assert result.exit_code == 1
        assert "FAILED $" in result.output

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("not json")
        assert invoke("check", str(path)).exit_code == 2


def test_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"base": "F2", "format": "json", "describe": {"chain": "Z,F"}}))
    result = invoke("--config", str(path), "describe")
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["budget"] == "4"

import io
import json

import pytest

from qmoments import cli
from qmoments.exactmath import QPoly, parse_poly


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"d": 2, "cov": [["1", "1/2"], ["1/2", "2"]]}))
    return str(path)


def test_moment(model_file):
    code, text = run("moment", "--model", model_file, "--word", "1,2,1,2")
    assert code == 0
    # c12 c12 + c21 c12 + q c22 c11
    assert parse_poly(text.splitlines()[0]) == QPoly(["1/2", 2])


def test_moment_with_evaluation(model_file):
    code, text = run("moment", "--model", model_file, "--word", "1,1,1,1", "--q=-1/2")
    assert code == 0
    assert text.splitlines() == ["2 + q", "at q=-1/2: 3/2"]


def test_moment_json(model_file):
    code, text = run("moment", "--model", model_file, "--word", "1,1", "--json", "--q", "0,1")
    assert code == 0
    data = json.loads(text)
    assert data["polynomial"] == ["1"]
    assert data["evaluations"] == {"0": "1", "1": "1"}


def test_routes_agree(model_file):
    outs = [run(cmd, "--model", model_file, "--word", "1,2,2,1,2,1")[1] for cmd in ("moment", "wick", "recursion")]
    assert outs[0] == outs[1] == outs[2]


def test_table_roundtrip(model_file):
    code, text = run("table", "--model", model_file, "--max-order", "4")
    assert code == 0
    rows = text.strip().splitlines()
    assert len(rows) == 2 + 4 + 8 + 16
    sigma, poly = rows[-1].split(" -> ")
    assert sigma == "2,2,2,2"
    assert parse_poly(poly) == QPoly([8, 4])


def test_table_threads_deterministic(model_file):
    one = run("table", "--model", model_file, "--max-order", "5")[1]
    many = run("table", "--model", model_file, "--max-order", "5", "--threads", "3")[1]
    assert one == many


def test_diagrams():
    code, text = run("diagrams", "--size", "4")
    assert code == 0
    assert text.splitlines() == ["(1,2)(3,4)\t0", "(1,3)(2,4)\t1", "(1,4)(2,3)\t0"]


@pytest.mark.parametrize("eps, verdict", [("--++", "catalan"), ("-1,1,1,-1", "not catalan")])
def test_catalan(eps, verdict):
    code, text = run("catalan", f"--eps={eps}")
    assert code == 0
    assert text.strip() == verdict


def test_verify():
    code, text = run("verify", "--random", "2", "--seed", "5", "--max-order", "6")
    assert code == 0
    assert text.startswith("PASS: 126 words")


def test_verify_mismatch_exit_code(monkeypatch):
    monkeypatch.setattr(cli, "q_wick_moment", lambda *a, **k: QPoly([99]))
    code, text = run("verify", "--random", "1", "--max-order", "2")
    assert code == 3
    assert text.startswith("FAIL at 1:")


def test_fock_check(model_file):
    code, text = run("fock-check", "--model", model_file, "--word", "1,2,1,2,2,1")
    assert code == 0
    lines = text.strip().splitlines()
    assert len(lines) == 5 and all(line.endswith("ok") for line in lines)


def test_fock_check_not_psd(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"d": 2, "cov": [["1", "2"], ["2", "1"]]}))
    code, _ = run("fock-check", "--model", str(path), "--word", "1,2")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ("moment", "--model", "/nonexistent.json", "--word", "1"),
    ("moment", "--random", "2", "--word", "1,x"),
    ("moment", "--random", "2", "--word", "1,3"),
    ("moment", "--random", "2"),
    ("moment", "--word", "1"),
    ("frobnicate",),
    ("catalan", "--eps", "1,0"),
    ("moment", "--random", "1", "--word", "1", "--q", "abc"),
])
def test_input_errors(argv):
    assert run(*argv)[0] == 1


def test_bad_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"d": 1,\n "cov": [[1]')
    assert run("moment", "--model", str(path), "--word", "1")[0] == 1
    assert "line 2" in capsys.readouterr().err


def test_cap():
    assert run("wick", "--random", "1", "--word", ",".join(["1"] * 14))[0] == 2
    assert run("wick", "--random", "1", "--word", ",".join(["1"] * 14), "--force")[0] == 0


def test_stdin_model(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"d": 1, "cov": [["3"]]}'))
    code, text = run("moment", "--model", "-", "--word", "1,1")
    assert code == 0 and text.strip() == "3"

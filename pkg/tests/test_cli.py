import json
import shutil
import subprocess
import sys

import pytest

from contlogic.cli import main
from contlogic.fileio import load

EXAMPLE_M1 = "vocabulary\n predicate P 0\n predicate Q 0\nend\nuniverse 1\nP = 1/2\nQ = 0\n"
EXAMPLE_M2 = "vocabulary\n predicate P 0\n predicate Q 0\nend\nuniverse 1\nP = 0\nQ = 1/2\n"
THETA_C = "min(P, Q, 1 -. min(P, Q))"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def example_files(tmp_path):
    a, b = tmp_path / "m1.gst", tmp_path / "m2.gst"
    a.write_text(EXAMPLE_M1)
    b.write_text(EXAMPLE_M2)
    return str(a), str(b)


def test_parse_infers_vocabulary(capsys):
    code, out, _ = run(["parse", "--formula", "sup x . (P(x) -. 1/2)", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["sentence"] is True and "P/1" in data["vocabulary"]


def test_parse_error_exits_2(capsys):
    code, _, err = run(["parse", "--formula", "min(P,"], capsys)
    assert code == 2 and err.startswith("error:")


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_classify_json(capsys):
    code, out, _ = run(["classify", "--formula", "max(P -. 1/2, Q)"], capsys)
    data = json.loads(out)
    assert code == 0 and data["flags"]["conditional"] is True


def test_translate(capsys):
    code, out, _ = run(["translate", "--formula", "P | Q | ~(P | Q)"], capsys)
    assert code == 0
    code, cls, _ = run(["classify", "--formula", out.strip()], capsys)
    assert json.loads(cls)["flags"]["conditional"] is False


def test_eval(example_files, capsys):
    code, out, _ = run(["eval", "--structure", example_files[0], "--formula", "max(P, Q)"], capsys)
    assert code == 0 and out.strip() == "1/2"


def test_check_example_violation(example_files, tmp_path, capsys):
    report = tmp_path / "check.json"
    code, out, _ = run(["check", "--in", *example_files, "--formula", THETA_C, "--eps", "0",
                        "--out", str(report)], capsys)
    assert code == 1 and "violated" in out
    data = json.loads(report.read_text())
    assert data["product_value"] == "1/2" and data["factor_values"] == ["0", "0"]


def test_check_conditional_passes(example_files, capsys):
    code, out, _ = run(["check", "--in", *example_files, "--formula", "max(P, Q)"], capsys)
    assert code == 0 and "preserved" in out


def test_down_up_round_trip(tmp_path, capsys):
    src = tmp_path / "m.gst"
    src.write_text("vocabulary\n predicate P 1\nend\nuniverse 2\nP 0 = 1/4\nP 1 = 1\n")
    k, back = tmp_path / "k.fst", tmp_path / "back.gst"
    assert main(["down", "--grid", "2", "--in", str(src), "--out", str(k)]) == 0
    assert "P_le_1_4 0 = true" in k.read_text()
    assert main(["up", "--grid", "2", "--in", str(k), "--out", str(back)]) == 0
    assert load(back) == load(src)


def test_down_rejects_first_order_input(tmp_path, capsys):
    k = tmp_path / "k.fst"
    k.write_text("vocabulary\n predicate A 0\nend\nuniverse 1\nA = true\n")
    code, _, _ = run(["down", "--in", str(k)], capsys)
    assert code == 2


def test_product(example_files, capsys):
    code, out, _ = run(["product", "--in", *example_files, "--filter", "full"], capsys)
    assert code == 0 and "P = 1/2" in out and "Q = 1/2" in out
    code, out, _ = run(["product", "--in", *example_files, "--filter", "kernel=1"], capsys)
    assert code == 0 and "Q = 0" in out


def test_search_finds_witness(capsys):
    code, out, _ = run(["search", "--formula", THETA_C, "--universe", "1", "--index-size", "2",
                        "--trials", "1000", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 1 and data["witness"] is not None


def test_suite_writes_report_and_figure(tmp_path, capsys):
    out, fig = tmp_path / "r.json", tmp_path / "r.png"
    code, _, _ = run(["suite", "example-reproduction", "--out", str(out), "--figure", str(fig),
                      "--timestamp", "T"], capsys)
    assert code == 0
    assert json.loads(out.read_text())["status"] == "pass"
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_suite_global_flags_before_subcommand(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--seed", "9", "--trials", "10", "suite", "los", "--out", str(a), "--timestamp", "T"]) == 0
    assert main(["suite", "los", "--seed", "9", "--trials", "10", "--out", str(b), "--timestamp", "T"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["spec"]["seed"] == 9


@pytest.mark.skipif(shutil.which("contlogic") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["contlogic", "classify", "--formula", "P"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["flags"]["conditional"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "contlogic.cli", "parse", "--formula", "min(P"],
                       capture_output=True, text=True)
    assert r.returncode == 2

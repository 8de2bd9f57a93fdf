"""Command-line behavior: exit codes, determinism, JSON round-trips."""

import io
import json


from mcss.cli import main
from mcss.mcxio import emit, parse
from mcss.builders import WallParams, hurtubise, staircase, wall

H1 = emit(hurtubise(1))
H3 = emit(hurtubise(3))
BROKEN_RELATION = (
    "mcx 1\nring Q\n"
    "module 0 0 1\nmodule 0 1 1\nmodule 1 0 1\nmodule 1 1 1\n"
    "map 1 1 1 : 1\nmap 0 1 1 : 1\nmap 1 1 0 : 1\nmap 0 0 1 : 1\n"
)


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(tmp_path, capsys):
    f = tmp_path / "h1.mcx"
    f.write_text(H1)
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 0 and out.strip() == "OK"


def test_validate_relation_failure(tmp_path, capsys):
    f = tmp_path / "bad.mcx"
    f.write_text(BROKEN_RELATION)
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 1
    assert "n=1" in out and "(1,1)" in out


def test_parse_error_exit_2(tmp_path, capsys):
    f = tmp_path / "syntax.mcx"
    f.write_text("mcx 1\nring Q\nmodule 0 0 1\nmodule 0 0 1\n")
    code, _, err = run(capsys, "validate", str(f))
    assert code == 2 and "line 4" in err


def test_usage_error_exit_3(capsys):
    code, _, err = run(capsys, "example", "staircase")
    assert code == 3 and "len" in err
    code, _, err = run(capsys, "example", "wall", "--r", "5", "--s", "2", "--t", "2")
    assert code == 3
    code, _, err = run(capsys, "example", "nonsense")
    assert code == 3 and "invalid choice" in err


def test_stdin_input(capsys, monkeypatch):
    code, out, _ = run(capsys, "validate", "-", stdin=H1, monkeypatch=monkeypatch)
    assert code == 0 and out.strip() == "OK"


def test_pages_text_deterministic(tmp_path, capsys):
    f = tmp_path / "h1.mcx"
    f.write_text(H1)
    code1, out1, _ = run(capsys, "pages", str(f))
    code2, out2, _ = run(capsys, "pages", str(f))
    assert code1 == code2 == 0
    assert out1 == out2
    assert "E_2:" in out1
    assert "(0,1): Z^1" in out1 and "(2,0): Z^1" in out1
    assert "Delta_2:" in out1 and "[-1]" in out1


def test_pages_json_roundtrip(tmp_path, capsys):
    f = tmp_path / "h1.mcx"
    f.write_text(H1)
    code, out, _ = run(capsys, "pages", str(f), "--json", "--max-r", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["ring"] == "Z"
    assert doc["pages"]["2"]["0"]["1"] == {"invariants": [0]}
    assert doc["pages"]["3"] == {}
    d2 = doc["differentials"]["2"]
    assert d2 == [{"p": 2, "q": 0, "target_p": 0, "target_q": 1, "matrix": [["-1"]]}]


def test_pages_empty_delta_table_for_hurtubise3(tmp_path, capsys):
    f = tmp_path / "h3.mcx"
    f.write_text(H3)
    code, out, _ = run(capsys, "pages", str(f), "--json")
    doc = json.loads(out)
    assert all(not recs for r, recs in doc["differentials"].items() if int(r) >= 2)


def test_diff_single_cell(tmp_path, capsys):
    f = tmp_path / "h1.mcx"
    f.write_text(H1)
    code, out, _ = run(capsys, "diff", str(f), "-r", "2", "-p", "2", "-q", "0")
    assert code == 0
    assert "Delta_2 at (2,0) -> (0,1)" in out
    assert "matrix: [-1]" in out


def test_compare_ok_and_json(tmp_path, capsys):
    f = tmp_path / "h3.mcx"
    f.write_text(H3)
    code, out, _ = run(capsys, "compare", str(f))
    assert code == 0 and "OK" in out
    code, out, _ = run(capsys, "compare", str(f), "--json", "--max-r", "3")
    doc = json.loads(out)
    assert code == 0 and doc["compare"]["failures"] == []


def test_homology_output(tmp_path, capsys):
    f = tmp_path / "wall.mcx"
    f.write_text(emit(wall(WallParams(3, 2, 2, 4))))
    code, out, _ = run(capsys, "homology", str(f))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "ring Z"
    assert "H_0: Z^1" in lines
    assert "H_1: Z/2" in lines
    code, out, _ = run(capsys, "homology", str(f), "--json")
    doc = json.loads(out)
    assert doc["homology"]["0"] == {"invariants": [0]}
    assert doc["homology"]["1"] == {"invariants": [2]}


def test_example_emits_valid_file(tmp_path, capsys):
    out_path = tmp_path / "wall.mcx"
    code, _, _ = run(capsys, "example", "wall", "--r", "3", "--s", "2", "--t", "2",
                     "-o", str(out_path))
    assert code == 0
    c = parse(out_path.read_text())
    assert c.validate() == []
    assert c == wall(WallParams(3, 2, 2, 8))


def test_example_staircase_ring_flag(capsys):
    code, out, _ = run(capsys, "example", "staircase", "--len", "3", "--ring", "F", "5")
    assert code == 0
    assert out.startswith("mcx 1\nring F 5\n")
    assert parse(out) == staircase(3, __import__("mcss.rings", fromlist=["GF"]).GF(5))


def test_random_deterministic(capsys):
    code1, out1, _ = run(capsys, "random", "--seed", "42")
    code2, out2, _ = run(capsys, "random", "--seed", "42")
    assert code1 == code2 == 0 and out1 == out2
    assert parse(out1).validate() == []


def test_ring_override(tmp_path, capsys):
    f = tmp_path / "h1.mcx"
    f.write_text(H1)
    code, out, _ = run(capsys, "pages", str(f), "--ring", "Q")
    assert code == 0 and out.splitlines()[0] == "ring Q"
    # refusal: rational entries cannot rebase to F 2
    g = tmp_path / "frac.mcx"
    g.write_text("mcx 1\nring Q\nmodule 0 0 1\nmodule 0 1 1\nmap 0 0 1 : 1/2\n")
    code, _, err = run(capsys, "pages", str(g), "--ring", "F", "2")
    assert code == 3 and "rebase" in err
    code, _, err = run(capsys, "pages", str(g), "--ring", "Z")
    assert code == 3


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/nowhere.mcx")
    assert code == 3

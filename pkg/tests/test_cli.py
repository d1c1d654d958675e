import csv

import pytest

from rkpuzzle.cli import main
from rkpuzzle.puzzle import fixture_text, parse_grid, parse_puzzle, solve_puzzle, vector_to_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--max-n", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["n", "minimal_slope", "prefix_len", "matrix_rows", "rank"]
    assert [l.split()[1] for l in lines[1:]] == ["0", "-1", "1", "-1/2", "-1/2", "-2"]
    assert lines[-1].split()[0] == "6" and lines[-1].split()[-1] == "36"


def test_table_jobs_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _, out1, _ = run(capsys, "table", "--max-n", "8", "--jobs", "1", "--csv", str(a))
    _, out2, _ = run(capsys, "table", "--max-n", "8", "--jobs", "3", "--csv", str(b))
    assert out1.replace(str(a), "") == out2.replace(str(b), "")
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["n", "minimal_slope", "prefix_len", "matrix_rows", "rank"]
    assert rows[8] == ["8", "1/2", "7", rows[8][3], "64"]


def test_table_reads_jobs_from_env(capsys, monkeypatch):
    monkeypatch.setenv("RK_JOBS", "2")
    code, out, _ = run(capsys, "table", "--max-n", "3")
    assert code == 0 and len(out.splitlines()) == 4


def test_solve_fixture(capsys, tmp_path):
    path = tmp_path / "fig1.rk"
    path.write_text(fixture_text("fig1"))
    code, out, _ = run(capsys, "solve", str(path))
    assert code == 0
    assert out == "unique\n1 3 4\n2 7 5\n4 9 9\n"


def test_solve_underdetermined(capsys, tmp_path):
    path = tmp_path / "fig2.rk"
    path.write_text(fixture_text("fig2"))
    code, out, _ = run(capsys, "solve", str(path))
    assert code == 0
    assert out.startswith("underdetermined(dim=1)\nsample solution:\n")


def test_solve_inconsistent(capsys, tmp_path):
    path = tmp_path / "bad.rk"
    path.write_text(fixture_text("fig1").replace("clue inf 3 18", "clue inf 3 19"))
    code, out, err = run(capsys, "solve", str(path))
    assert code == 1
    assert out == "inconsistent\n"
    assert "warning: slope inf totals 45" in err


def test_solve_format_error(capsys, tmp_path):
    path = tmp_path / "bad.rk"
    path.write_text("rk v1\ndims 1 1\nslopes 0\nclue 0 -1 x\n")
    code, _, err = run(capsys, "solve", str(path))
    assert code == 1 and "line 4" in err


def test_solve_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", str(tmp_path / "nope.rk"))
    assert code == 2


def test_matrix(capsys):
    code, out, _ = run(capsys, "matrix", "4", "4", "--through", "1")
    assert code == 0
    fields = dict(l.split(" ", 1) for l in out.splitlines())
    assert fields["rows"] == "22" and fields["cols"] == "16"
    assert int(fields["nullity"]) >= 1
    assert int(fields["rank"]) + int(fields["nullity"]) == 16


def test_mask(capsys):
    code, out, _ = run(capsys, "mask", "4", "4", "--through", "1")
    assert code == 0
    assert out == "#..#\n.##.\n.##.\n#..#\nforced 8/16\n"


def test_lines(capsys):
    code, out, _ = run(capsys, "lines", "3", "3", "-1")
    assert code == 0
    assert out.splitlines()[0] == "slope -1 on 3x3: 5 lines"
    assert out.splitlines()[1] == "-6: (3,3)"


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "6", "6")
    assert code == 0
    assert out == "k = -2\nr = -2\nc = -2\nb = -2\ns = -2\n"
    code, _, err = run(capsys, "invariants", "12", "12", "--max-q", "1")
    assert code == 1 and "search cap" in err


def test_certify(capsys, tmp_path):
    log = tmp_path / "log.txt"
    code, out, _ = run(capsys, "certify", "3", "--through", "1", "--log", str(log))
    assert code == 0
    assert "certified 9/9" in out and "sound yes" in out and "complete yes" in out
    assert log.read_text().splitlines()[0] == "(3, 3) <- -1 -6"
    code, out, _ = run(capsys, "certify", "7", "--through", "-1/2", "--symmetry")
    assert code == 0 and "sound yes" in out


def test_generate_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "4", "4", "--through", "-1/2", "--seed", "5",
                       "--out-dir", str(tmp_path))
    assert code == 0
    grid = parse_grid((tmp_path / "rk_4x4_seed5.grid").read_text())
    puzzle = parse_puzzle((tmp_path / "rk_4x4_seed5.rk").read_text())
    sol = solve_puzzle(puzzle)
    assert sol.status == "unique" and vector_to_grid(puzzle.dims, sol.particular) == grid
    assert all(1 <= x <= 9 for x in grid.values)
    run(capsys, "generate", "4", "4", "--through", "-1/2", "--seed", "5", "--out-dir", str(tmp_path / "b"))
    assert (tmp_path / "b" / "rk_4x4_seed5.rk").read_bytes() == (tmp_path / "rk_4x4_seed5.rk").read_bytes()


def test_fixture(capsys):
    code, out, _ = run(capsys, "fixture", "fig2_fig3")
    assert code == 0 and out == fixture_text("fig2_fig3")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nosuch"],
        ["matrix", "4", "4"],
        ["matrix", "4", "4", "--through", "2/3"],
        ["matrix", "0", "4", "--through", "1"],
        ["mask", "3", "3", "--through", "banana"],
        ["table", "--max-n", "0"],
        ["table", "--max-n", "3", "--jobs", "0"],
        ["generate", "2", "2", "--through", "1", "--seed", "1", "--range", "9..1"],
        ["lines", "3", "3", "0/0"],
        ["lines", "3", "3", "2/4"],
        ["mask", "3", "3", "--through", "-2/4"],
        ["fixture", "fig9"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "usage" in err


def test_help(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "table" in out

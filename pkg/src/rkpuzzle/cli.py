"""``rk`` command line: a thin shell over the library."""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from pathlib import Path

from .certifier import certify, propagate
from .lattice import (
    LatticeDims,
    build_coefficient_matrix,
    enumerate_lines,
    parse_order_slope,
    parse_slope,
    slope_prefix,
)
from .puzzle import (
    FIXTURES,
    PuzzleFormatError,
    clues_from_grid,
    fixture_text,
    parse_puzzle,
    random_grid,
    render,
    serialize_grid,
    serialize_puzzle,
    solve_puzzle,
    validate,
    vector_to_grid,
)
from .uniqueness import (
    SearchCapExceeded,
    clue_rank,
    entry_uniqueness_mask,
    invariants,
    search_table,
)

EXIT_OK, EXIT_UNSOLVABLE = 0, 1


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-1/2" through as a value instead of an unknown option
        self._negative_number_matcher = re.compile(r"^-\d+$|^-\d*\.\d+$|^-\d+/\d+$")


def _dims(parser: argparse.ArgumentParser, n: int, m: int) -> LatticeDims:
    try:
        return LatticeDims(n, m)
    except ValueError as exc:
        parser.error(f"<n> <m>: {exc}")


def _through(parser: argparse.ArgumentParser, token: str):
    try:
        return slope_prefix(parse_order_slope(token))
    except ValueError as exc:
        parser.error(f"--through: {exc}")


def cmd_lines(args, parser) -> int:
    dims = _dims(parser, args.n, args.m)
    try:
        slope = parse_slope(args.slope)
    except ValueError as exc:
        parser.error(f"<slope>: {exc}")
    lines = enumerate_lines(dims, slope)
    print(f"slope {slope} on {dims.n}x{dims.m}: {len(lines)} lines")
    for ln in lines:
        cells = " ".join(f"({i},{j})" for i, j in ln.cells)
        print(f"{ln.offset}: {cells}")
    return EXIT_OK


def cmd_matrix(args, parser) -> int:
    dims = _dims(parser, args.n, args.m)
    cm = build_coefficient_matrix(dims, _through(parser, args.through))
    r = clue_rank(cm)
    print(f"slopes {' '.join(s.token() for s in cm.slopes)}")
    print(f"rows {cm.nrows}")
    print(f"cols {cm.ncols}")
    print(f"rank {r}")
    print(f"nullity {cm.ncols - r}")
    return EXIT_OK


def cmd_solve(args, parser) -> int:
    try:
        text = Path(args.puzzle).read_text(encoding="utf-8")
    except OSError as exc:
        parser.error(f"<puzzle-file>: {exc}")
    try:
        puzzle = parse_puzzle(text)
    except PuzzleFormatError as exc:
        print(f"{args.puzzle}: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    for issue in validate(puzzle).issues:
        print(f"warning: {issue}", file=sys.stderr)
    sol = solve_puzzle(puzzle)
    if sol.status == "inconsistent":
        print("inconsistent")
        return EXIT_UNSOLVABLE
    grid = vector_to_grid(puzzle.dims, sol.particular)
    if sol.status == "unique":
        print("unique")
    else:
        print(f"underdetermined(dim={sol.nullbasis.dim})")
        print("sample solution:")
    print(render(grid))
    return EXIT_OK


def cmd_mask(args, parser) -> int:
    dims = _dims(parser, args.n, args.m)
    mask = entry_uniqueness_mask(dims, _through(parser, args.through))
    print(render(mask))
    print(f"forced {sum(mask.unique)}/{dims.size}")
    return EXIT_OK


def cmd_invariants(args, parser) -> int:
    dims = _dims(parser, args.n, args.m)
    try:
        report = invariants(dims, args.max_q)
    except SearchCapExceeded as exc:
        print(f"search cap reached: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except ValueError as exc:
        parser.error(f"--max-q: {exc}")
    for name in ("k", "r", "c", "b", "s"):
        print(f"{name} = {getattr(report, name)}")
    return EXIT_OK


TABLE_COLUMNS = ("n", "minimal_slope", "prefix_len", "matrix_rows", "rank")


def cmd_table(args, parser) -> int:
    if args.max_n < 1:
        parser.error("--max-n: must be at least 1")
    if args.jobs < 1:
        parser.error("--jobs: must be at least 1")
    try:
        rows = search_table(args.max_n, args.max_q, jobs=args.jobs)
    except SearchCapExceeded as exc:
        print(f"search cap reached: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except ValueError as exc:
        parser.error(f"--max-q: {exc}")
    records = [(r.n, r.slope.token(), r.prefix_len, r.matrix_rows, r.rank) for r in rows]
    widths = [max(len(str(x)) for x in col) for col in zip(TABLE_COLUMNS, *records)]
    for rec in [TABLE_COLUMNS, *records]:
        print("  ".join(str(x).rjust(w) for x, w in zip(rec, widths)).rstrip())
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TABLE_COLUMNS)
            w.writerows(records)
        print(f"csv {args.csv}")
    return EXIT_OK


def cmd_certify(args, parser) -> int:
    dims = _dims(parser, args.n, args.n)
    slopes = _through(parser, args.through)
    cert = certify(dims, slopes) if args.symmetry else propagate(dims, slopes)
    mask = entry_uniqueness_mask(dims, slopes)
    algebraic = mask.unique_cells()
    print(f"certified {len(cert.determined)}/{dims.size}")
    print(f"algebraic {len(algebraic)}/{dims.size}")
    print(f"sound {'yes' if cert.determined <= algebraic else 'NO'}")
    print(f"complete {'yes' if cert.determined == algebraic else 'no'}")
    if args.log:
        Path(args.log).write_text(cert.derivation_text(), encoding="utf-8")
        print(f"log {args.log}")
    return EXIT_OK


def _value_range(parser, text: str) -> tuple[int, int]:
    match = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if not match:
        parser.error(f"--range: expected lo..hi, got {text!r}")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        parser.error(f"--range: empty range {text}")
    return lo, hi


def cmd_generate(args, parser) -> int:
    dims = _dims(parser, args.n, args.m)
    slopes = _through(parser, args.through)
    lo, hi = _value_range(parser, args.range)
    seed = int(args.seed) if re.fullmatch(r"-?\d+", args.seed) else args.seed
    grid = random_grid(dims, lo, hi, seed)
    puzzle = clues_from_grid(grid, slopes)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"rk_{dims.n}x{dims.m}_seed{args.seed}"
    grid_path, puzzle_path = out / f"{stem}.grid", out / f"{stem}.rk"
    grid_path.write_text(serialize_grid(grid), encoding="utf-8")
    puzzle_path.write_text(serialize_puzzle(puzzle), encoding="utf-8")
    print(f"grid {grid_path}")
    print(f"puzzle {puzzle_path}")
    return EXIT_OK


def cmd_fixture(args, parser) -> int:
    sys.stdout.write(fixture_text(args.name))
    return EXIT_OK


COMMANDS = {
    "lines": cmd_lines,
    "matrix": cmd_matrix,
    "solve": cmd_solve,
    "mask": cmd_mask,
    "invariants": cmd_invariants,
    "table": cmd_table,
    "certify": cmd_certify,
    "generate": cmd_generate,
    "fixture": cmd_fixture,
}


def _command(sub, name: str, help: str) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help)
    p.set_defaults(func=COMMANDS[name], subparser=p)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rk", description="Exact uniqueness analysis for line-sum puzzles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = _command(sub, "lines", "list the lines of one slope and their cells")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("slope")

    p = _command(sub, "matrix", "clue matrix shape, rank and nullity")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--through", required=True, metavar="SLOPE")

    p = _command(sub, "solve", "solve an rk v1 puzzle file")
    p.add_argument("puzzle", metavar="puzzle-file")

    p = _command(sub, "mask", "render which cells the clues force")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--through", required=True, metavar="SLOPE")

    p = _command(sub, "invariants", "minimal slopes for grid, rows, columns, border")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--max-q", type=int, default=None)

    p = _command(sub, "table", "minimal slope per square size")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--max-q", type=int, default=None)
    p.add_argument("--jobs", type=int, default=int(os.environ.get("RK_JOBS", "1")))
    p.add_argument("--csv", default=None, metavar="PATH")

    p = _command(sub, "certify", "peeling fixpoint against the algebraic mask")
    p.add_argument("n", type=int)
    p.add_argument("--through", required=True, metavar="SLOPE")
    p.add_argument("--symmetry", action="store_true", help="also transport cells by admissible symmetries")
    p.add_argument("--log", default=None, metavar="PATH", help="write the derivation log here")

    p = _command(sub, "generate", "random grid and its full clue set")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--through", required=True, metavar="SLOPE")
    p.add_argument("--seed", required=True)
    p.add_argument("--range", default="1..9", metavar="LO..HI")
    p.add_argument("--out-dir", default=".", metavar="DIR")

    p = _command(sub, "fixture", "print a bundled figure puzzle")
    p.add_argument("name", choices=FIXTURES)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, args.subparser)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: solve, verify, sweep, boundaries and compare.

Exit codes: 0 success, 1 input error, 2 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .analysis import (
    compare_games,
    find_region_boundaries,
    log_gaps,
    sweep_csv,
    sweep_delta_e,
)
from .continuous import solve_ct
from .discrete import GATE_READINGS, solve_dt
from .game import GameParams
from .oracle import CT_DEFAULT_STEP
from .results import SpeResult, round_floats
from .sfg import solve_sfg
from .verify import run_checks, verify

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2

SOLVERS = {"ct": solve_ct, "dt": solve_dt, "sfg": solve_sfg}


class InputError(Exception):
    """Bad command-line input; reported on stderr with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise InputError(message)


def load_params(path: str | None) -> GameParams:
    if path is None:
        raise InputError("--params is required for this command")
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read params file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"params file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("params file must hold a JSON object")
    try:
        return GameParams.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid params: {exc}") from exc


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise InputError(f"range must look like lo:hi, got {text!r}") from exc
    if not (0 < lo < hi):
        raise InputError("range needs 0 < lo < hi")
    return lo, hi


def dumps_json(obj: Any) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=True) + "\n"


def solve_csv(res: SpeResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case", "type", "t1", "t2", "flock", "u1", "u2"])
    for o in res.outcomes:
        writer.writerow(
            [res.case.path, o.type_tag.value, o.t1, o.t2, o.flock.value, f"{o.u1:.12g}", f"{o.u2:.12g}"]
        )
    if not res.outcomes:
        writer.writerow([res.case.path, "", "", "", "", "", ""])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


def run_solve(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    try:
        res = SOLVERS[args.mode](params)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    text = solve_csv(res) if args.output == "csv" else dumps_json(res.to_dict(params.t_o))
    emit(text, args.out)
    return EXIT_OK


def run_verify(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    try:
        if args.params is not None:
            report = run_checks(args.mode, [load_params(args.params)], args.step, args.workers)
        else:
            report = verify(args.mode, args.trials, args.seed, args.step, args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.output == "json":
        text = dumps_json({"seed": args.seed, **report.to_dict()})
    else:
        text = "\n".join(report.summary_lines()) + "\n"
    emit(text, args.out)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def run_sweep(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    lo, hi = parse_range(args.range or "0.05:6")
    try:
        rows = sweep_delta_e(params, lo, hi, args.step if args.step is not None else 0.05)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.output == "json":
        text = dumps_json(
            [
                {
                    "delta_e": row.delta_e,
                    "ct": row.spe_ct.to_dict(params.t_o),
                    "dt": row.spe_dt.to_dict(params.t_o),
                    "sfg": row.spe_sfg.to_dict(params.t_o),
                }
                for row in rows
            ]
        )
    else:
        text = sweep_csv(rows)
    emit(text, args.out)
    return EXIT_OK


def run_boundaries(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    lo, hi = parse_range(args.range or "1:1000")
    try:
        bset = find_region_boundaries(params, lo, hi, args.tol, args.gate)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    emit(dumps_json(bset.to_dict()), args.out)
    return EXIT_OK


def run_compare(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    lo, hi = parse_range(args.range or "0.01:100")
    try:
        factors = [float(x) for x in args.beta1_factors.split(",")]
    except ValueError as exc:
        raise InputError(f"--beta1-factors must be comma-separated numbers: {exc}") from exc
    if args.samples < 2:
        raise InputError("--samples must be at least 2")
    if any(f < 1 for f in factors):
        raise InputError("--beta1-factors must all be >= 1")
    strengths = [params.beta1 * f for f in factors]
    try:
        rows = compare_games(params, log_gaps(lo, hi, args.samples), strengths)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["game", "existence", "uniqueness", "n_types", "strict_flock", "t1_le_t2"]
        writer.writerow(cols)
        for summary in rows:
            row = summary.row()
            writer.writerow([row[c] for c in cols])
        text = buf.getvalue()
    else:
        text = dumps_json({"beta1_values": strengths, "range": [lo, hi], "rows": [s.row() for s in rows]})
    emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flockgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, output: str = "json") -> None:
        p.add_argument("--params", help="JSON file with beta1, beta2, E1, E2, r, t_o[, w, c_o1, c_o2]")
        p.add_argument("--output", choices=("json", "csv"), default=output)
        p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("solve", help="closed-form SPE of one game")
    common(p)
    p.add_argument("--mode", choices=tuple(SOLVERS), required=True)
    p.set_defaults(func=run_solve)

    p = sub.add_parser("verify", help="seeded solver-versus-oracle comparison")
    p.add_argument("--params", help="verify this single instance instead of random draws")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--mode", choices=tuple(SOLVERS), required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=CT_DEFAULT_STEP, help="grid step for ct/sfg")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("sweep", help="classify all three games over a range of territory gaps")
    common(p, output="csv")
    p.add_argument("--range", help="lo:hi (default 0.05:6)")
    p.add_argument("--step", type=float, help="gap increment (default 0.05)")
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("boundaries", help="discrete-game region boundaries")
    common(p)
    p.add_argument("--range", help="lo:hi (default 1:1000)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--gate", choices=GATE_READINGS, default="resolved")
    p.set_defaults(func=run_boundaries)

    p = sub.add_parser("compare", help="qualitative comparison of the three games")
    common(p)
    p.add_argument("--range", help="lo:hi of the log-spaced gap sample (default 0.01:100)")
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument(
        "--beta1-factors",
        default="1,2,4,8,16",
        help="leader strengths to pool, as multiples of the file's beta1",
    )
    p.set_defaults(func=run_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

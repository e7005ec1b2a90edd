"""Command-line entry point.

Exit codes: 0 success, 2 invalid flags or values, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .conflict import RewardGaps, aoc_analytic, aoc_curve, aoc_oracle, rasterize_region
from .exceptions import StackConflictError
from .game import PlayerId, detect_conflict, load_game, solve_stackelberg
from .io import fmt, write_atomic, write_csv, write_pgm
from .scenarios import Condition, Scenario, ScenarioConfig, default_offsets, run_sweep, summary_table
from .transforms import Model, SocialParams, transform_game
from .vehicle import PlannerConfig, load_planner_config

MODELS = [m.value for m in Model]


class UsageError(Exception):
    """Bad flag value; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(flag):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        if not (v > 0 and math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"{flag} must be > 0, got {text}")
        return v
    return parse


def _int_at_least(flag, low):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}") from None
        if v < low:
            raise argparse.ArgumentTypeError(f"{flag} must be >= {low}, got {v}")
        return v
    return parse


def _add_model(p, required=True):
    p.add_argument("--model", choices=MODELS, required=required, default=None if required else "baseline",
                   help="reward model")


def _add_alphas(p):
    p.add_argument("--alpha1", type=float, default=0.0, help="row player's coefficient (radians for svo)")
    p.add_argument("--alpha2", type=float, default=0.0, help="column player's coefficient (radians for svo)")


def _add_gaps(p, with_a=True):
    if with_a:
        p.add_argument("--A", type=_positive("--A"), required=True, help="row player's preference margin (> 0)")
    p.add_argument("--B", type=_positive("--B"), required=True, help="column player's preference margin (> 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stackconflict", description="Conflict analysis for Stackelberg driving games.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=42, help="seed recorded with randomised outputs")
    parser.add_argument("--config", type=Path, help="key=value planner configuration file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("aoc", help="Area of Conflict for a model and reward gaps")
    _add_model(p)
    _add_gaps(p)
    p.add_argument("--oracle", type=_int_at_least("--oracle", 10), help="also estimate on an N x N oracle grid")

    p = sub.add_parser("region", help="rasterise the conflict region to a PGM image")
    _add_model(p)
    _add_gaps(p)
    p.add_argument("--res", type=_int_at_least("--res", 1), default=200, help="pixels per side")
    p.add_argument("--out", type=Path, required=True, help="output .pgm path")
    p.add_argument("--csv", type=Path, help="also write cell centres as alpha1,alpha2,conflict")

    p = sub.add_parser("curve", help="AoC as a function of A for fixed B, as CSV")
    _add_model(p)
    _add_gaps(p, with_a=False)
    p.add_argument("--a-min", type=_positive("--a-min"), required=True)
    p.add_argument("--a-max", type=_positive("--a-max"), required=True)
    p.add_argument("--samples", type=_int_at_least("--samples", 1), default=100)
    p.add_argument("--out", type=Path, required=True, help="output .csv path")

    p = sub.add_parser("game-solve", help="Stackelberg equilibrium of a game file")
    p.add_argument("--file", type=Path, required=True)
    p.add_argument("--leader", choices=["row", "col"], default="row")
    _add_model(p, required=False)
    _add_alphas(p)

    p = sub.add_parser("game-conflict", help="solve with both leaders and report conflict")
    p.add_argument("--file", type=Path, required=True)
    _add_model(p, required=False)
    _add_alphas(p)

    conditions = [c.value for c in Condition]
    scenarios = [s.value for s in Scenario]
    p = sub.add_parser("simulate", help="staggered-start sweep of one scenario and condition")
    p.add_argument("--scenario", choices=scenarios, required=True)
    p.add_argument("--condition", choices=conditions, required=True)
    p.add_argument("--grid", type=_int_at_least("--grid", 1), default=5, help="offsets per vehicle")
    p.add_argument("--out", type=Path, required=True, help="results .csv path")

    p = sub.add_parser("sweep-all", help="all conditions of one or both scenarios")
    p.add_argument("--scenario", choices=scenarios + ["all"], default="all")
    p.add_argument("--grid", type=_int_at_least("--grid", 1), default=5)
    p.add_argument("--out-dir", type=Path, required=True, help="directory for per-condition CSVs")
    return parser


def _social(args) -> SocialParams:
    model = Model.parse(args.model)
    hi = model.upper
    for flag, value in (("--alpha1", args.alpha1), ("--alpha2", args.alpha2)):
        if not 0 <= value <= hi:
            raise UsageError(f"{flag} must lie in [0, {hi:g}] for model {model.value}, got {value}")
    if model is Model.AUGMENTED_ALTRUISM and args.alpha1 * args.alpha2 >= 1:
        raise UsageError("--alpha1 and --alpha2 cannot both be 1 for model aug")
    return SocialParams(model, args.alpha1, args.alpha2)


def _planner(args) -> PlannerConfig:
    if args.config is None:
        return PlannerConfig()
    if not args.config.is_file():
        raise UsageError(f"--config file {args.config} not found")
    try:
        return load_planner_config(args.config)
    except ValueError as exc:
        raise UsageError(f"--config: {exc}") from None


def _check_out(path: Path, flag: str):
    if not path.parent.exists():
        raise UsageError(f"{flag} directory {path.parent} does not exist")


def _cmd_aoc(args, out):
    gaps = RewardGaps(args.A, args.B)
    print(fmt(aoc_analytic(args.model, gaps)), file=out)
    if args.oracle:
        est, boundary = aoc_oracle(args.model, gaps, args.oracle, return_boundary=True)
        print(f"oracle: {fmt(est)} (boundary cells: {boundary})", file=out)


def _cmd_region(args, out):
    _check_out(args.out, "--out")
    if args.csv is not None:
        _check_out(args.csv, "--csv")
    raster = rasterize_region(args.model, RewardGaps(args.A, args.B), args.res)
    write_pgm(args.out, raster.cells)
    if args.csv is not None:
        c = raster.centers
        rows = ((c[j], c[i], bool(raster.cells[i, j])) for i in range(raster.resolution)
                for j in range(raster.resolution))
        write_csv(args.csv, ("alpha1", "alpha2", "conflict"), rows)
    print(f"fraction: {fmt(raster.fraction)}", file=out)


def _cmd_curve(args, out):
    if args.a_max < args.a_min:
        raise UsageError("--a-max must be >= --a-min")
    _check_out(args.out, "--out")
    rows = aoc_curve(args.model, args.B, (args.a_min, args.a_max), args.samples)
    write_csv(args.out, ("A", "aoc"), rows)


def _cell(game, eq):
    r, c = eq.labels(game)
    return f"({r},{c})"


def _load(args):
    params = _social(args)
    game = load_game(args.file)
    return transform_game(game, params) if params.kind is not Model.BASELINE else game, game


def _cmd_game_solve(args, out):
    effective, game = _load(args)
    eq = solve_stackelberg(effective, PlayerId.ROW if args.leader == "row" else PlayerId.COL)
    print(f"leader: {args.leader}", file=out)
    print(f"equilibrium: {_cell(game, eq)}", file=out)
    print(f"leader value: {fmt(eq.leader_value)}", file=out)
    print(f"follower value: {fmt(eq.follower_value)}", file=out)


def _cmd_game_conflict(args, out):
    effective, game = _load(args)
    verdict = detect_conflict(effective)
    print(f"conflict: {fmt(verdict.in_conflict)}", file=out)
    print(f"row-led: {_cell(game, verdict.row_led)}", file=out)
    print(f"col-led: {_cell(game, verdict.col_led)}", file=out)


SWEEP_COLUMNS = ("offset_row", "offset_col", "time_row", "time_col", "collided")


def _cmd_simulate(args, out):
    _check_out(args.out, "--out")
    cfg = ScenarioConfig(scenario=args.scenario, planner=_planner(args))
    result = run_sweep(args.scenario, args.condition, default_offsets(args.grid), cfg, seed=args.seed)
    write_csv(args.out, SWEEP_COLUMNS, result.rows())
    print(f"{args.scenario} {args.condition}: average {fmt(result.average_time)}", file=out)


def _cmd_sweep_all(args, out):
    if not args.out_dir.is_dir():
        raise UsageError(f"--out-dir {args.out_dir} is not a directory")
    planner = _planner(args)
    scenarios = list(Scenario) if args.scenario == "all" else [Scenario(args.scenario)]
    tables = []
    for sc in scenarios:
        cfg = ScenarioConfig(scenario=sc, planner=planner)
        results = {}
        for cond in Condition:
            res = run_sweep(sc, cond, default_offsets(args.grid), cfg, seed=args.seed)
            write_csv(args.out_dir / f"{sc.value}_{cond.value}.csv", SWEEP_COLUMNS, res.rows())
            results[cond] = res
        tables.append(f"{sc.value}\n{summary_table(sc, results)}")
    text = "\n\n".join(tables) + "\n"
    write_atomic(args.out_dir / "summary.txt", text)
    out.write(text)


COMMANDS = {
    "aoc": _cmd_aoc,
    "region": _cmd_region,
    "curve": _cmd_curve,
    "game-solve": _cmd_game_solve,
    "game-conflict": _cmd_game_conflict,
    "simulate": _cmd_simulate,
    "sweep-all": _cmd_sweep_all,
}


def dispatch(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"stackconflict: error: {exc}", file=err)
        return 2
    except (StackConflictError, OSError, ValueError) as exc:
        print(f"stackconflict: {exc}", file=err)
        return 1
    return 0


def main(argv=None) -> int:
    return dispatch(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

Subcommands:

* ``smcl check``    -- explore a game under one algorithm, analyse the
  absorbing components, and report (text, JSON, DOT).
* ``smcl simulate`` -- Monte-Carlo playouts; writes the first run's trace
  as CSV and prints tail-classified outcome frequencies.
* ``smcl catalog``  -- write one of the built-in benchmark games.
"""

from __future__ import annotations

import argparse
import sys

from . import catalog
from .analysis import analyze
from .dot import export_dot
from .explorer import explore
from .gamefile import GameFileError, parse_game, parse_weights, write_game
from .report import RunConfig, dump_json, render_table, run_check
from .simulate import empirical_convergence, simulate, trace_to_csv


def _add_learner_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algo", required=True,
                        choices=["fp", "gfp", "afffp"])
    parser.add_argument("--tau0", type=float, default=0.01,
                        help="first-iteration softmax temperature")
    parser.add_argument("--alpha", type=float, default=0.2,
                        help="gfp discount step")
    parser.add_argument("--lambda0", type=float, default=0.8,
                        help="afffp initial forgetting factor")
    parser.add_argument("--gamma", type=float, default=0.05,
                        help="afffp adaptation rate")
    parser.add_argument("--lambda-min", type=float, default=0.01,
                        help="afffp lower clamp for the forgetting factor")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smcl",
        description="Model checking of game-theoretic learning dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="explore and analyse a game")
    check.add_argument("--game", required=True)
    _add_learner_options(check)
    check.add_argument("--max-depth", type=int, default=100)
    check.add_argument("--state-cap", type=int, default=1_000_000)
    check.add_argument("--prob-floor", type=float, default=0.0)
    check.add_argument("--no-merge", action="store_true",
                       help="disable state merging (pure expansion tree)")
    init = check.add_mutually_exclusive_group(required=True)
    init.add_argument("--weights", help="weights file for a single run")
    init.add_argument("--random-inits", type=int, metavar="N",
                      help="number of random initialisations")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--dot", help="write the first run's chain as DOT")
    check.add_argument("--json", help="write the full report as JSON")

    sim = sub.add_parser("simulate", help="Monte-Carlo playouts")
    sim.add_argument("--game", required=True)
    _add_learner_options(sim)
    sim.add_argument("--iterations", type=int, required=True)
    sim.add_argument("--runs", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--weights",
                     help="weights file (default: random per seed)")
    sim.add_argument("--trace", required=True,
                     help="CSV path for the first run's trace")

    cat = sub.add_parser("catalog", help="write a built-in game")
    cat.add_argument("name", choices=["simple", "shapley", "complex"])
    cat.add_argument("--n", type=int, default=5,
                     help="complex game size parameter (4n actions)")
    cat.add_argument("--delta", type=float, default=0.03,
                     help="complex game sharpness parameter")
    cat.add_argument("--out", required=True)
    return parser


def _load_weights(args, game):
    if getattr(args, "weights", None):
        return parse_weights(args.weights, game)
    return catalog.random_initial_weights(game, [args.seed, 0])


def _cmd_check(args) -> int:
    game = parse_game(args.game)
    config = RunConfig(
        algorithm=args.algo,
        tau0=args.tau0,
        alpha=args.alpha,
        lambda0=args.lambda0,
        gamma=args.gamma,
        lambda_min=args.lambda_min,
        max_depth=args.max_depth,
        merge_enabled=not args.no_merge,
        state_cap=args.state_cap,
        prob_floor=args.prob_floor,
    )
    if args.weights:
        inits = [parse_weights(args.weights, game)]
    else:
        if args.random_inits < 1:
            print("error: --random-inits must be positive", file=sys.stderr)
            return 2
        inits = [
            catalog.random_initial_weights(game, [args.seed, k])
            for k in range(args.random_inits)
        ]
    report = run_check(config, game, inits)
    print(render_table(report, game))
    if args.json:
        dump_json(report, game, args.json)
    if args.dot:
        first = report.dtmcs[0]
        if first is None:
            print("error: first run failed, no DOT written", file=sys.stderr)
        else:
            export_dot(first, analyze(game, first), args.dot)
    for record in report.runs:
        if not record.ok:
            print(f"run {record.index} failed: {record.error}",
                  file=sys.stderr)
    return 0 if report.all_ok else 1


def _cmd_simulate(args) -> int:
    game = parse_game(args.game)
    config = RunConfig(
        algorithm=args.algo, tau0=args.tau0, alpha=args.alpha,
        lambda0=args.lambda0, gamma=args.gamma, lambda_min=args.lambda_min,
    )
    learner = config.learner(game, _load_weights(args, game))
    trace = simulate(game, learner, args.iterations, args.tau0,
                     [args.seed, 0])
    trace_to_csv(trace, game, args.trace)
    print(f"trace of run 0 written to {args.trace}")
    if args.runs > 1:
        result = empirical_convergence(
            game, learner, args.runs, args.iterations, args.seed,
            tau0=args.tau0,
        )
        print(f"runs                 {result.runs}")
        print(f"unresolved fraction  {result.unresolved:.4f}")
        for actions, freq in sorted(
            result.frequencies.items(), key=lambda kv: -kv[1]
        ):
            label = " ".join(str(a) for a in sorted(actions))
            print(f"  {freq:.4f}  {label}")
    return 0


def _cmd_catalog(args) -> int:
    if args.name == "simple":
        game = catalog.simple_coordination()
    elif args.name == "shapley":
        game = catalog.shapley()
    else:
        game = catalog.complex_coordination(
            catalog.ComplexGameParams(n=args.n, delta=args.delta)
        )
    write_game(game, args.out, comment=f"catalog game: {args.name}")
    print(f"{args.name} written to {args.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_catalog(args)
    except GameFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

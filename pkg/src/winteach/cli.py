"""Command-line entry points: teach, play, experiment, serve.

Exit codes: 0 success, 1 usage error, 2 runtime failure. Boards print in the
human (mirrored) perspective unless --robot-view is given; board JSON files
on disk are always in the canonical robot frame.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import learner
from .agent import AgentConfig, Policy, choose_move
from .board import Board, COLS, PlayerId
from .experiments import run_ablation, run_variant_experiment, write_report
from .oracle import GroundTruth, answer as oracle_answer, demonstrate
from .win_rule import WinRule, rule_id


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; we reserve 2 for runtime
        raise UsageError(message)


def _load_rule(path: str) -> WinRule:
    with open(path, encoding="utf-8") as fh:
        return WinRule.from_json(json.load(fh))


def _print_board(board: Board, robot_view: bool) -> None:
    print(board.render(human_view=not robot_view))


def cmd_teach(args) -> int:
    if args.oracle:
        gt = GroundTruth(rule=_load_rule(args.oracle), rng_seed=args.seed)
        board, winner = demonstrate(gt)
        answer_fn = lambda q: oracle_answer(gt, q)
    elif args.interactive:
        if not args.demo:
            raise UsageError("--interactive needs --demo BOARD_JSON")
        with open(args.demo, encoding="utf-8") as fh:
            board = Board.from_json(json.load(fh))
        winner = PlayerId(args.winner)

        def answer_fn(q):
            print(f"\nQuestion {q.id + 1} [{q.dimension}]")
            _print_board(q.hypothetical, args.robot_view)
            while True:
                reply = input(f"{q.prompt} [y/n] ").strip().lower()
                if reply in ("y", "yes"):
                    return True
                if reply in ("n", "no"):
                    return False
                print("please answer y or n")

    else:
        raise UsageError("teach needs --oracle RULE_JSON or --interactive")

    print("Demonstration:")
    _print_board(board, args.robot_view)
    rule, events = learner.teach(board, winner, answer_fn, budget=args.budget)
    for e in events:
        if e["event"] == "question":
            print(f"Q{e['id'] + 1} [{e['dimension']}]")
        elif e["event"] == "answer":
            print(f"  -> {'yes' if e['value'] else 'no'}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(rule.canonical_bytes())
    if args.transcript:
        learner.write_transcript(events, Path(args.transcript))
    print(f"learned rule {rule_id(rule)} -> {out}")
    return 0


def cmd_play(args) -> int:
    rule = _load_rule(args.rule)
    human = PlayerId.P1 if args.first == "human" else PlayerId.P2
    agent = human.opponent
    cfg = AgentConfig(policy=Policy.MINIMAX, depth=args.depth, seed=args.seed)
    board = Board.empty()
    mover = PlayerId.P1
    while True:
        if mover is agent:
            col = choose_move(board, agent, rule, rule, cfg)
            board = board.apply_action(agent, col)
            shown = col if args.robot_view else COLS - 1 - col
            print(f"\nagent plays column {shown}")
        else:
            _print_board(board, args.robot_view)
            while True:
                raw = input("your column [0-6] ").strip()
                try:
                    col = int(raw)
                except ValueError:
                    print("enter a number 0-6")
                    continue
                if not 0 <= col < COLS:
                    print("enter a number 0-6")
                    continue
                if not args.robot_view:
                    col = COLS - 1 - col
                if col not in board.legal_actions():
                    print("that column is full")
                    continue
                break
            board = board.apply_action(human, col)
        winner = next((p for p in PlayerId if rule.detect(board, p)), None)
        if winner is not None:
            _print_board(board, args.robot_view)
            print("You win!" if winner is human else "Agent wins!")
            return 0
        if board.is_full():
            _print_board(board, args.robot_view)
            print("Draw: the board is full.")
            return 0
        mover = mover.opponent


def cmd_experiment(args) -> int:
    if args.kind == "variants":
        report = run_variant_experiment(
            n_patterns=args.n, games_per=args.games, seed=args.seed, workers=args.workers
        )
    else:
        report = run_ablation(games_per=args.games, seed=args.seed, workers=args.workers)
    out = Path(args.out)
    write_report(report, out.with_suffix(".json"), out.with_suffix(".csv"))
    print(report.summary())
    print(f"report -> {out.with_suffix('.json')} and {out.with_suffix('.csv')}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        rules_dir=args.rules_dir,
        transcripts_dir=args.transcripts_dir,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="winteach", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    teach = sub.add_parser("teach", help="teach a win condition")
    teach.add_argument("--oracle", metavar="RULE_JSON", help="simulated teacher from a ground-truth rule file")
    teach.add_argument("--interactive", action="store_true", help="answer the questions yourself in the terminal")
    teach.add_argument("--demo", metavar="BOARD_JSON", help="demonstration board for interactive mode")
    teach.add_argument("--winner", type=int, default=1, choices=(1, 2))
    teach.add_argument("--budget", type=int, default=15)
    teach.add_argument("--seed", type=int, default=0)
    teach.add_argument("--out", default="learned_rule.json")
    teach.add_argument("--transcript", help="write the session transcript (JSON lines)")
    teach.add_argument("--robot-view", action="store_true")
    teach.set_defaults(func=cmd_teach)

    play = sub.add_parser("play", help="play against the agent in the terminal")
    play.add_argument("--rule", required=True, metavar="RULE_JSON")
    play.add_argument("--depth", type=int, default=2)
    play.add_argument("--first", choices=("human", "agent"), default="human")
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--robot-view", action="store_true")
    play.set_defaults(func=cmd_play)

    exp = sub.add_parser("experiment", help="run the recognition experiments")
    exp.add_argument("kind", choices=("variants", "ablation"))
    exp.add_argument("--n", type=int, default=50, help="number of random patterns (variants)")
    exp.add_argument("--games", type=int, default=None)
    exp.add_argument("--seed", type=int, default=7)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--out", default="report")
    exp.set_defaults(func=cmd_experiment)

    env = os.environ
    serve = sub.add_parser("serve", help="serve the HTTP API (and UI when built)")
    serve.add_argument("--host", default=env.get("WINTEACH_HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(env.get("WINTEACH_PORT", "8000")))
    serve.add_argument("--rules-dir", default=env.get("WINTEACH_RULES_DIR", "rules"))
    serve.add_argument("--transcripts-dir", default=env.get("WINTEACH_TRANSCRIPTS_DIR"))
    serve.add_argument("--static-dir", default=env.get("WINTEACH_STATIC_DIR"))
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "experiment" and args.games is None:
            args.games = 10 if args.kind == "variants" else 30
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:  # runtime failures: bad files, IO errors
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

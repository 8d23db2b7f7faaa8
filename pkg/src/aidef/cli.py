"""Command line entry point.

Exit codes: 0 ok, 2 world assumption check failed, 3 protocol violation,
4 I/O or trace format error. ``AIDEF_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import TextIO

from .miner import dump_rules, load_rules, mine_implications
from .protocol import (
    Accepted,
    DuplicateIncorrectMove,
    ProtocolError,
    SchemaViolation,
    Session,
    check_world_assumptions,
)
from .runner import AgentViolation, make_agent, replay, report_success, run_episode
from .signals import NOTHING, UNDEF
from .trace import TraceError, read_trace, write_trace
from .worlds import UnknownWorld, make_world

EXIT_OK, EXIT_ASSUMPTION, EXIT_PROTOCOL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("aidef")


def _cmd_run(args: argparse.Namespace) -> int:
    world = make_world(args.world)
    rules = load_rules(Path(args.rules).read_text()) if args.rules else []
    agent_seed = args.seed if args.agent_seed is None else args.agent_seed
    agent = make_agent(args.agent, world, agent_seed, rules)
    life = run_episode(world, agent, args.steps, args.seed)
    write_trace(life, args.out)
    status = f"died at t={life.death.t}" if life.death else "alive"
    print(f"{len(life)} steps in {world.id} ({status}); trace written to {args.out}")
    print(f"success: {report_success(life).final}")
    return EXIT_OK


def _cmd_mine(args: argparse.Namespace) -> int:
    life = read_trace(args.trace)
    rules = mine_implications(
        life,
        max_atoms=args.max_atoms,
        min_support=args.min_support,
        max_violation_rate=args.max_violation_rate,
        next_inputs=args.next_inputs,
    )
    text = dump_rules(rules)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{len(rules)} rules written to {args.out}")
    else:
        sys.stdout.write(text)
    for rule in rules[: args.show]:
        log.info("%s", rule)
    return EXIT_OK


def _cmd_check_world(args: argparse.Namespace) -> int:
    world = make_world(args.world)
    report = check_world_assumptions(world, range(args.seeds), args.trials, args.horizon)
    print(json.dumps(report.to_json(), indent=2))
    print(f"{report.attempts} attempts, {report.incorrect} incorrect", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_ASSUMPTION


def _cmd_replay(args: argparse.Namespace) -> int:
    life = read_trace(args.trace)
    report = replay(life)
    for m in report.mismatches:
        print(m)
    print(f"replayed {report.steps}/{len(life)} steps: {'ok' if report.ok else 'MISMATCH'}")
    return EXIT_OK if report.ok else EXIT_PROTOCOL


def _cmd_score(args: argparse.Namespace) -> int:
    report = report_success(
        read_trace(args.trace), tail_fraction=args.tail_fraction, epsilon=args.epsilon
    )
    print(json.dumps(report.to_json(), indent=2) if args.json else report.render())
    return EXIT_OK


def _fmt(v: object) -> str:
    return v.value if v is UNDEF or v is NOTHING else str(v)


def play(world_id: str, seed: int, stdin: TextIO, stdout: TextIO, out: str | None = None) -> int:
    """Let a human act as the device, one output vector per line."""
    world = make_world(world_id)
    session = Session(world, seed, metadata={"agent": "human", "agent_seed": None})
    inputs = ", ".join(s.name for s in world.schema.inputs)
    outputs = " ".join(s.name for s in world.schema.outputs)
    print(f"world {world.id}; inputs: {inputs}; type '{outputs}' or 'q' to stop", file=stdout)
    reward = None
    while not session.complete:
        shown = " ".join(_fmt(v) for v in session.observation)
        extra = f"  reward: {' '.join(_fmt(v) for v in reward)}" if reward else ""
        print(f"t={session.t}  input: {shown}{extra}", file=stdout)
        if session.tried_incorrect:
            print(f"  refused: {sorted(session.tried_incorrect)}", file=stdout)
        stdout.write("> ")
        stdout.flush()
        line = stdin.readline()
        if not line or line.strip() in ("q", "quit"):
            break
        try:
            move = tuple(int(x) for x in line.split())
            outcome = session.attempt(move)
        except (ValueError, SchemaViolation, DuplicateIncorrectMove) as exc:
            print(f"  rejected input: {exc}", file=stdout)
            continue
        if isinstance(outcome, Accepted):
            reward = outcome.reward
        else:
            print("  incorrect move", file=stdout)
    print(f"{session.t} steps; success: {report_success(session.life).final}", file=stdout)
    if out:
        write_trace(session.life, out)
    return EXIT_OK


def _cmd_play(args: argparse.Namespace) -> int:
    return play(args.world, args.seed, sys.stdin, sys.stdout, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aidef", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one episode and write its trace")
    p.add_argument("--world", required=True, help="ttt-eye or tm:<seed>:<max_states>")
    p.add_argument("--agent", choices=("random", "miner"), default="random")
    p.add_argument("--rules", help="rules.jsonl for the miner agent")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agent-seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("mine", help="mine incorrect-move rules from a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--max-atoms", type=int, default=2)
    p.add_argument("--min-support", type=int, default=20)
    p.add_argument("--max-violation-rate", type=float, default=0.0)
    p.add_argument("--next-inputs", action="store_true", help="also mine next-input rules (experimental)")
    p.add_argument("--show", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("check-world", help="fuzz a world against the incorrect-move assumptions")
    p.add_argument("--world", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seeds", type=int, default=4)
    p.add_argument("--horizon", type=int, default=200)
    p.set_defaults(func=_cmd_check_world)

    p = sub.add_parser("replay", help="re-run a trace against a fresh world")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("score", help="success of the life in a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--tail-fraction", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("play", help="act as the device yourself")
    p.add_argument("--world", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the resulting trace here")
    p.set_defaults(func=_cmd_play)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("AIDEF_LOG", "WARNING").upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AgentViolation, ProtocolError) as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (TraceError, OSError, UnknownWorld) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Running episodes, replaying traces and scoring lives."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .agents import Agent, MinerGuidedAgent, NoUntriedMoves, RandomAgent
from .life import DeathReport, Life
from .miner import Implication, Window
from .protocol import Accepted, ProtocolError, Session, World
from .success import (
    RewardStream,
    SuccessValue,
    success_finite,
    success_limit_estimate,
    success_series,
)
from .worlds import make_world

log = logging.getLogger(__name__)


class AgentViolation(ProtocolError):
    """The agent re-proposed a move already refused in the current state."""


def session_window(session: Session) -> Window:
    schema = session.world.schema
    if not session.life.steps:
        return Window(schema, session.observation)
    prev = session.life.steps[-1]
    return Window(schema, session.observation, prev.input, prev.output, prev.reward)


def run_episode(
    world: World,
    agent: Agent,
    max_steps: int,
    seed: int = 0,
    config: dict | None = None,
) -> Life:
    """Let ``agent`` live in ``world`` for up to ``max_steps`` accepted moves.

    Stops early when the world ends the life or when the agent runs out of
    untried moves; the latter is recorded as death.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    meta = {"agent": agent.id, "agent_seed": agent.seed, "max_steps": max_steps}
    if config:
        meta["config"] = dict(config)
    session = Session(world, seed, metadata=meta)
    while session.t < max_steps and not session.complete:
        tried = session.tried_incorrect
        try:
            out = agent.decide(session_window(session), tried)
        except NoUntriedMoves:
            session.life.death = DeathReport(session.t, len(tried))
            log.info("%s died at t=%d after %d refused moves", world.id, session.t, len(tried))
            break
        if tuple(out) in tried:
            raise AgentViolation(f"agent {agent.id} repeated refused move {tuple(out)} at t={session.t}")
        session.attempt(out)
    return session.life


def make_agent(
    name: str, world: World, seed: int, rules: Sequence[Implication] = (), **kw
) -> Agent:
    if name == "random":
        return RandomAgent(world.schema, seed, **kw)
    if name == "miner":
        return MinerGuidedAgent(world.schema, list(rules), seed, **kw)
    raise ValueError(f"unknown agent {name!r}")


def run_episodes(
    world_id: str,
    agent_name: str,
    seeds: Sequence[int],
    max_steps: int,
    rules: Sequence[Implication] = (),
    workers: int = 4,
) -> list[Life]:
    """One episode per seed on worker threads; results in seed order."""

    def one(seed: int) -> Life:
        world = make_world(world_id)
        return run_episode(world, make_agent(agent_name, world, seed, rules), max_steps, seed)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, sorted(seeds)))


@dataclass
class ReplayReport:
    steps: int = 0
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def replay(life: Life, world_factory: Callable[[str], World] = make_world) -> ReplayReport:
    """Feed a trace's moves to a fresh world and check it answers the same.

    Every refused attempt must be refused again, every accepted move accepted
    with the recorded reward, and every recorded input must match the view.
    """
    world = world_factory(life.metadata["world"])
    session = Session(world, life.metadata.get("world_seed", 0))
    report = ReplayReport()
    for step in life.steps:
        if session.observation != step.input:
            report.mismatches.append(f"t={step.t}: input {step.input} recorded, world shows {session.observation}")
        try:
            for bad in step.incorrect:
                if isinstance(session.attempt(bad), Accepted):
                    report.mismatches.append(f"t={step.t}: refused move {bad} was accepted on replay")
                    return report
            outcome = session.attempt(step.output)
        except ProtocolError as exc:
            report.mismatches.append(f"t={step.t}: {exc}")
            return report
        if not isinstance(outcome, Accepted):
            report.mismatches.append(f"t={step.t}: accepted move {step.output} is incorrect on replay")
            return report
        if outcome.reward != step.reward:
            report.mismatches.append(f"t={step.t}: reward {step.reward} recorded, replay gave {outcome.reward}")
        report.steps += 1
    return report


@dataclass
class SuccessReport:
    final: SuccessValue
    limit: SuccessValue
    steps: int
    checkpoints: list[tuple[int, SuccessValue]]

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "final": self.final.to_json(),
            "limit": self.limit.to_json(),
            "checkpoints": [{"t": t, "success": v.to_json()} for t, v in self.checkpoints],
        }

    def render(self) -> str:
        lines = [f"steps: {self.steps}", f"success: {self.final}", f"limit estimate: {self.limit}"]
        for t, v in self.checkpoints:
            lines.append(f"  t={t:>8}  {v}")
        return "\n".join(lines)


def report_success(
    life: Life, tail_fraction: float = 0.5, epsilon: float = 1e-6, checkpoints: int = 10
) -> SuccessReport:
    stream = RewardStream(tuple(life.rewards), life.schema.rewards)
    final = success_finite(stream)
    series = success_series(stream)
    limit = success_limit_estimate(series, tail_fraction, epsilon) if series else final
    n = len(series)
    marks = sorted({max(1, round(n * (i + 1) / checkpoints)) for i in range(checkpoints)}) if n else []
    return SuccessReport(final, limit, n, [(t, series[t - 1]) for t in marks])

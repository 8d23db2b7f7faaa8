from fractions import Fraction

import pytest

from aidef.agents import MinerGuidedAgent, NoUntriedMoves, RandomAgent
from aidef.life import DeathReport, Life, Step
from aidef.miner import Atom, Implication, Window, mine_implications, predict_incorrect
from aidef.protocol import output_space
from aidef.runner import (
    AgentViolation,
    make_agent,
    replay,
    report_success,
    run_episode,
    run_episodes,
)
from aidef.signals import NOTHING
from aidef.success import Exact, Interval
from aidef.trace import dumps_life
from aidef.worlds import make_world
from aidef.worlds.tictactoe import SCHEMA, TicTacToeWorld, TttState
from aidef.worlds.turing import BLANK, RIGHT, STAY, TmRule, TmSpec, TuringWorld

IDLE = (0, 0, 0, 0)
CROSS_RULE = Implication(
    frozenset({Atom("cell", 0, "!=", 0), Atom("put_cross", 0, "=", 1)}), support=50, violations=0
)


def dead_world():
    spin = TmRule(0, RIGHT, 0)
    return TuringWorld(TmSpec(((spin, spin, spin),), move_width=2), world_id="dead")


# --- random agent ---


def test_random_agent_starts_idle():
    agent = RandomAgent(SCHEMA, seed=9)
    assert agent.decide(Window(SCHEMA, (0,)), frozenset()) == IDLE


def test_random_agent_tries_single_deviations_first():
    agent = RandomAgent(SCHEMA, seed=1, deviation_weight=1.0)
    w = Window(SCHEMA, (0,))
    tried = {agent.decide(w, frozenset())}
    singles = set(agent.single)
    assert len(singles) == 2 + 2 + 1 + 1
    for _ in singles:
        move = agent.decide(w, frozenset(tried))
        assert move in singles
        tried.add(move)
    move = agent.decide(w, frozenset(tried))
    assert sum(a != b for a, b in zip(move, IDLE)) >= 2


def test_random_agent_never_repeats():
    agent = RandomAgent(SCHEMA, seed=4)
    w = Window(SCHEMA, (0,))
    tried = set()
    for _ in range(36):
        move = agent.decide(w, frozenset(tried))
        assert move not in tried
        tried.add(move)
    with pytest.raises(NoUntriedMoves):
        agent.decide(w, frozenset(tried))


# --- miner-guided agent ---


def test_miner_agent_filters_cross_on_occupied():
    agent = MinerGuidedAgent(SCHEMA, [CROSS_RULE], seed=0)
    w = Window(SCHEMA, (1,))
    for _ in range(50):
        assert agent.decide(w, frozenset())[2] == 0


def test_miner_agent_epsilon_zero_never_doomed():
    agent = MinerGuidedAgent(SCHEMA, [CROSS_RULE], seed=3, mobility_weight=0.0, epsilon=0.0)
    w = Window(SCHEMA, (2,))
    tried = set()
    while True:
        move = agent.decide(w, frozenset(tried))
        tried.add(move)
        if predict_incorrect([CROSS_RULE], w, move):
            break
    # doomed moves only once everything else was tried
    assert len(tried) == 18 + 1


def test_miner_agent_epsilon_one_tests_rules():
    agent = MinerGuidedAgent(SCHEMA, [CROSS_RULE], seed=3, epsilon=1.0)
    assert agent.decide(Window(SCHEMA, (1,)), frozenset())[2] == 1


def test_miner_agent_without_rules_is_random():
    a = MinerGuidedAgent(SCHEMA, [], seed=6)
    b = RandomAgent(SCHEMA, seed=6)
    w = Window(SCHEMA, (0,))
    tried = set()
    for _ in range(10):
        move = a.decide(w, frozenset(tried))
        assert move == b.decide(w, frozenset(tried))
        tried.add(move)


def test_miner_agent_exhausted():
    agent = MinerGuidedAgent(SCHEMA, [CROSS_RULE], seed=0)
    with pytest.raises(NoUntriedMoves):
        agent.decide(Window(SCHEMA, (0,)), frozenset(output_space(SCHEMA)))


def test_miner_agent_skips_predicted_refusals():
    world = TicTacToeWorld()
    source = run_episode(world, RandomAgent(SCHEMA, seed=42), 2000, seed=42)
    rules = mine_implications(source)

    def crosses_on_occupied(life):
        return sum(s.input[0] != 0 and bad[2] == 1 for s in life.steps for bad in s.incorrect)

    random_life = run_episode(world, RandomAgent(SCHEMA, seed=7), 500, seed=7)
    miner_life = run_episode(world, MinerGuidedAgent(SCHEMA, rules, seed=7), 500, seed=7)
    assert crosses_on_occupied(random_life) > 0
    assert crosses_on_occupied(miner_life) == 0


# --- run_episode ---


def test_episode_deterministic():
    world = TicTacToeWorld()
    a = run_episode(world, RandomAgent(SCHEMA, seed=42), 100, seed=42)
    b = run_episode(world, RandomAgent(SCHEMA, seed=42), 100, seed=42)
    assert dumps_life(a) == dumps_life(b)
    assert a.metadata == {
        "world": "ttt-eye", "world_seed": 42, "agent": "random", "agent_seed": 42, "max_steps": 100
    }


def test_single_step_episode():
    life = run_episode(TicTacToeWorld(), RandomAgent(SCHEMA, seed=0), 1)
    assert len(life) == 1 and life.steps[0].output == IDLE


def test_max_steps_must_be_positive():
    with pytest.raises(ValueError):
        run_episode(TicTacToeWorld(), RandomAgent(SCHEMA), 0)


def test_dead_world_life():
    world = dead_world()
    life = run_episode(world, make_agent("random", world, 0), 50)
    assert len(life) == 0 and life.death is not None
    assert life.death.tried == 4


def test_death_after_some_steps():
    # two states that answer at once, then a state that never halts
    def answer(q):
        return tuple(TmRule(sym, STAY, q + 1, halt=True) for sym in (0, 1, BLANK))

    spin = TmRule(0, RIGHT, 2)
    spec = TmSpec((answer(0), answer(1), (spin, spin, spin)), move_width=1)
    world = TuringWorld(spec, world_id="doomed")
    life = run_episode(world, make_agent("random", world, 0), 50)
    assert len(life) == 2 and life.death == DeathReport(2, 2)


def test_agent_violation():
    class Stubborn:
        id, seed = "stubborn", 0

        def decide(self, window, tried):
            return (0, 0, 1, 0)

    # a cross already under the eye, so the stubborn move is refused
    class Preset(TicTacToeWorld):
        def initial_state(self, seed):
            return TttState(board=(0,) * 4 + (1,) + (0,) * 4)

    with pytest.raises(AgentViolation):
        run_episode(Preset(), Stubborn(), 10)


def test_run_episodes_in_seed_order():
    lives = run_episodes("ttt-eye", "random", [3, 1, 2], 30, workers=3)
    assert [l.metadata["world_seed"] for l in lives] == [1, 2, 3]
    assert dumps_life(lives[0]) == dumps_life(run_episode(TicTacToeWorld(), RandomAgent(SCHEMA, 1), 30, 1))


def test_make_agent_unknown():
    with pytest.raises(ValueError):
        make_agent("oracle", TicTacToeWorld(), 0)


# --- replay ---


def test_replay_reproduces():
    life = run_episode(TicTacToeWorld(), RandomAgent(SCHEMA, seed=8), 300, seed=8)
    report = replay(life)
    assert report.ok and report.steps == 300


def test_replay_tm_world():
    world = make_world("tm:5:3")
    life = run_episode(world, make_agent("random", world, 2), 200, seed=2)
    assert replay(life).ok


def test_replay_detects_tampering():
    life = run_episode(TicTacToeWorld(), RandomAgent(SCHEMA, seed=8), 50, seed=8)
    i = next(i for i, s in enumerate(life.steps) if s.incorrect)
    s = life.steps[i]
    life.steps[i] = Step(s.t, s.input, s.incorrect[1:], s.incorrect[0], s.reward)
    report = replay(life)
    assert not report.ok and "incorrect on replay" in report.mismatches[0]


# --- report_success ---


def rewards_life(values):
    life = Life(SCHEMA)
    for t, r in enumerate(values):
        life.append(Step(t, (0,), (), IDLE, (r,)))
    return life


def test_empty_life_scores_zero():
    report = report_success(Life(SCHEMA))
    assert report.final.coords == (Exact(0),) and report.steps == 0


def test_all_losses():
    report = report_success(rewards_life([NOTHING, 0] * 20))
    assert report.final.coords == (Exact(0.0),)


def test_alternating_wins_and_losses():
    report = report_success(rewards_life([2, 0] * 500), epsilon=0.01)
    assert report.final.coords == (Exact(1.0),)
    limit = report.limit.coords[0]
    # tail prefix means lie in [1, 502/501]
    assert isinstance(limit, Exact)
    assert limit.mean == pytest.approx(float((1 + Fraction(502, 501)) / 2), abs=1e-12)


def test_tight_epsilon_gives_interval():
    report = report_success(rewards_life([2, 0] * 500), epsilon=1e-6)
    assert isinstance(report.limit.coords[0], Interval)


def test_report_render_and_json():
    report = report_success(rewards_life([1, 2, NOTHING]), checkpoints=3)
    assert [t for t, _ in report.checkpoints] == [1, 2, 3]
    assert report.to_json()["final"] == {"coords": [{"exact": 1.5}]}
    assert report.render().splitlines()[1] == "success: (1.5)"

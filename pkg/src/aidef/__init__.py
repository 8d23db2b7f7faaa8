"""Agent/world simulation with incorrect moves, prioritized success and rule mining."""

from .agents import MinerGuidedAgent, NoUntriedMoves, RandomAgent
from .life import DeathReport, Life, Revision, Step
from .miner import Atom, Implication, Window, evaluate_implication, mine_implications, predict_incorrect
from .protocol import (
    Accepted,
    Capabilities,
    Rejected,
    Session,
    World,
    check_world_assumptions,
    legal_moves,
    session_attempt,
)
from .runner import replay, report_success, run_episode, run_episodes
from .signals import NOTHING, UNDEF, SignalSpec, VectorSchema, nothing_vector, shift_signal, validate_value
from .success import (
    Comparison,
    Exact,
    Interval,
    RewardStream,
    SuccessValue,
    compare_success,
    emulate_two_priorities,
    success_finite,
    success_limit_estimate,
    success_series,
)
from .trace import read_trace, write_trace

__version__ = "0.1.0"

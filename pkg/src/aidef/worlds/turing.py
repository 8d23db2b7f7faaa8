"""Worlds generated by Turing machines.

Encoding used here (fixed so that runs are reproducible):

* the device's move is ``move_width`` bits written on the tape starting at the
  head, after which the machine runs from its current control state;
* the machine answers by taking a transition flagged ``halt``; the
  observation is then read from ``obs_width`` cells starting at the head
  (symbol 1 reads as 1, anything else as 0) and the reward from the next two
  cells: ``(1, 0)`` victory, ``(0, 1)`` loss, ``(1, 1)`` draw, otherwise
  Nothing;
* a machine that does not halt within ``budget`` micro-steps is deadlocked:
  every tape write made for that move is undone, head and control are put
  back, and the move counts as incorrect.

A concrete reward ends the current game. A game reaching ``cap`` steps is
closed with an injected draw while the machine itself is left alone; a life is
``games_per_life`` games.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from ..protocol import Accepted, Capabilities, LifeComplete, Rejected, World
from ..signals import BOOL, NOTHING, VectorSchema, input_signal, output_signal, reward_signal

BLANK = 2
SYMBOLS = (0, 1, BLANK)
LEFT, STAY, RIGHT = -1, 0, 1

LOSS, DRAW, VICTORY = 0, 1, 2
_REWARD_CELLS = {(1, 0): VICTORY, (0, 1): LOSS, (1, 1): DRAW}

DEADLOCK_BUDGET = 800
GAME_CAP = 1000
GAMES_PER_LIFE = 100


@dataclass(frozen=True)
class TmRule:
    write: int
    move: int
    next: int
    halt: bool = False


@dataclass(frozen=True)
class TmSpec:
    """Total transition table: ``table[state][symbol]`` for every symbol."""

    table: tuple
    move_width: int = 2
    obs_width: int = 1

    def __post_init__(self) -> None:
        table = tuple(tuple(row) for row in self.table)
        object.__setattr__(self, "table", table)
        if not table:
            raise ValueError("a machine needs at least one state")
        for q, row in enumerate(table):
            if len(row) != len(SYMBOLS):
                raise ValueError(f"state {q} does not cover all {len(SYMBOLS)} symbols")
            for rule in row:
                if rule.write not in SYMBOLS or rule.move not in (LEFT, STAY, RIGHT):
                    raise ValueError(f"bad rule {rule} in state {q}")
                if not 0 <= rule.next < len(table):
                    raise ValueError(f"rule {rule} jumps outside 0..{len(table) - 1}")
        if self.move_width < 1 or self.obs_width < 0:
            raise ValueError("move_width must be >= 1 and obs_width >= 0")

    @property
    def n_states(self) -> int:
        return len(self.table)

    def to_json(self) -> dict:
        return {
            "states": self.n_states,
            "move_width": self.move_width,
            "obs_width": self.obs_width,
            "table": [[[r.write, r.move, r.next, int(r.halt)] for r in row] for row in self.table],
        }

    @classmethod
    def from_json(cls, doc: dict) -> TmSpec:
        table = [[TmRule(w, m, n, bool(h)) for w, m, n, h in row] for row in doc["table"]]
        return cls(tuple(table), doc["move_width"], doc["obs_width"])


@dataclass
class TmWorldState:
    tape: dict = field(default_factory=dict)  # position -> symbol, blanks absent
    head: int = 0
    control: int = 0
    game_step_counter: int = 0
    game_counter: int = 0

    def config_bytes(self) -> bytes:
        """Canonical encoding of tape, head and control only."""
        cells = sorted(self.tape.items())
        parts = [struct.pack(">qqI", self.head, self.control, len(cells))]
        parts.extend(struct.pack(">qB", pos, sym) for pos, sym in cells)
        return b"".join(parts)

    def to_bytes(self) -> bytes:
        return self.config_bytes() + struct.pack(">II", self.game_step_counter, self.game_counter)


def read_window(state: TmWorldState, spec: TmSpec) -> tuple[tuple, object]:
    base = state.head
    obs = tuple(1 if state.tape.get(base + i) == 1 else 0 for i in range(spec.obs_width))
    cells = tuple(
        1 if state.tape.get(base + spec.obs_width + i) == 1 else 0 for i in range(2)
    )
    return obs, _REWARD_CELLS.get(cells, NOTHING)


def _run(state: TmWorldState, spec: TmSpec, move: tuple, budget: int) -> tuple[bool, list]:
    """Write the move and run; returns (halted, undo journal)."""
    tape = state.tape
    journal: list[tuple[int, int]] = []

    def write(pos: int, sym: int) -> None:
        old = tape.get(pos, BLANK)
        if old == sym:
            return
        journal.append((pos, old))
        if sym == BLANK:
            del tape[pos]
        else:
            tape[pos] = sym

    for i, bit in enumerate(move):
        write(state.head + i, int(bit))
    head, q = state.head, state.control
    table = spec.table
    for _ in range(budget):
        rule = table[q][tape.get(head, BLANK)]
        write(head, rule.write)
        head += rule.move
        q = rule.next
        if rule.halt:
            state.head, state.control = head, q
            return True, journal
    return False, journal


def _undo(state: TmWorldState, journal: list, head: int, control: int) -> None:
    for pos, old in reversed(journal):
        if old == BLANK:
            state.tape.pop(pos, None)
        else:
            state.tape[pos] = old
    state.head, state.control = head, control


def tm_attempt(
    state: TmWorldState, spec: TmSpec, move: tuple, budget: int = DEADLOCK_BUDGET
) -> Accepted | Rejected:
    """Feed one move to the machine, rolling the tape back on deadlock."""
    if len(move) != spec.move_width:
        raise ValueError(f"move has {len(move)} bits, machine expects {spec.move_width}")
    head, control = state.head, state.control
    halted, journal = _run(state, spec, move, budget)
    if not halted:
        _undo(state, journal, head, control)
        return Rejected()
    obs, reward = read_window(state, spec)
    state.game_step_counter += 1
    if reward is not NOTHING:
        state.game_counter += 1
        state.game_step_counter = 0
    return Accepted(obs, (reward,))


def tm_halts(state: TmWorldState, spec: TmSpec, move: tuple, budget: int = DEADLOCK_BUDGET) -> bool:
    """Dry run: would ``move`` be accepted? The state is always restored."""
    head, control = state.head, state.control
    halted, journal = _run(state, spec, move, budget)
    _undo(state, journal, head, control)
    return halted


def tm_game_cap(
    state: TmWorldState, cap: int = GAME_CAP, games_per_life: int = GAMES_PER_LIFE
) -> tuple | None:
    """Close an over-long game with a draw; the machine itself is untouched."""
    if state.game_counter >= games_per_life:
        raise LifeComplete(f"all {games_per_life} games played")
    if state.game_step_counter < cap:
        return None
    state.game_step_counter = 0
    state.game_counter += 1
    return (DRAW,)


def random_tm_spec(
    seed: int,
    max_states: int,
    move_width: int = 2,
    obs_width: int = 1,
    halt_prob: float = 0.35,
) -> TmSpec:
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    table = [
        [
            TmRule(
                rng.choice(SYMBOLS),
                rng.choice((LEFT, STAY, RIGHT)),
                rng.randrange(n),
                rng.random() < halt_prob,
            )
            for _ in SYMBOLS
        ]
        for _ in range(n)
    ]
    return TmSpec(tuple(table), move_width, obs_width)


def tm_schema(spec: TmSpec) -> VectorSchema:
    return VectorSchema(
        inputs=tuple(input_signal(f"obs{i}", BOOL) for i in range(spec.obs_width)),
        outputs=tuple(output_signal(f"move{i}", BOOL) for i in range(spec.move_width)),
        rewards=(reward_signal("reward", 2),),
    )


class TuringWorld(World):
    capabilities = Capabilities(guarantees_nonempty_correct=False, guarantees_monotone_incorrect=True)

    def __init__(
        self,
        spec: TmSpec,
        world_id: str = "tm",
        budget: int = DEADLOCK_BUDGET,
        cap: int = GAME_CAP,
        games_per_life: int = GAMES_PER_LIFE,
    ):
        self.spec = spec
        self.id = world_id
        self.schema = tm_schema(spec)
        self.budget = budget
        self.cap = cap
        self.games_per_life = games_per_life

    @classmethod
    def random(cls, seed: int, max_states: int, **kw) -> TuringWorld:
        return cls(random_tm_spec(seed, max_states), world_id=f"tm:{seed}:{max_states}", **kw)

    def initial_state(self, seed: int) -> TmWorldState:
        return TmWorldState()

    def view(self, state: TmWorldState) -> tuple:
        return read_window(state, self.spec)[0]

    def correct(self, state: TmWorldState, output: tuple) -> bool:
        return tm_halts(state, self.spec, output, self.budget)

    def attempt(self, state: TmWorldState, output: tuple) -> tuple[TmWorldState, tuple | None]:
        outcome = tm_attempt(state, self.spec, output, self.budget)
        return state, (outcome.reward if isinstance(outcome, Accepted) else None)

    def transition(self, state: TmWorldState, output: tuple) -> tuple[TmWorldState, tuple]:
        state, reward = self.attempt(state, output)
        if reward is None:
            raise ValueError(f"move {output} deadlocks; transition needs a correct move")
        return state, reward

    def after_step(self, state: TmWorldState) -> tuple[TmWorldState, tuple | None]:
        if self.life_complete(state):  # the step just closed the last game
            return state, None
        return state, tm_game_cap(state, self.cap, self.games_per_life)

    def life_complete(self, state: TmWorldState) -> bool:
        return state.game_counter >= self.games_per_life

    def serialize_state(self, state: TmWorldState) -> bytes:
        return state.to_bytes()

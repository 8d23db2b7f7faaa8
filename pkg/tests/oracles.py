"""Independent reference computations the suite checks the package against.

Nothing here imports the code under test's algorithms; only its data types.
"""

from fractions import Fraction
import itertools

from aidef.signals import NOTHING

EMPTY, X, O = 0, 1, 2


def mean_oracle(values, i):
    """Exact mean of coordinate ``i`` over non-Nothing entries, 0 if none."""
    total = Fraction(0)
    count = 0
    for vec in values:
        if vec[i] != NOTHING and vec[i] is not NOTHING:
            total += Fraction(vec[i])
            count += 1
    return total / count if count else Fraction(0)


def exact_prefix_means(values):
    out = []
    total = Fraction(0)
    for n, v in enumerate(values, start=1):
        total += v
        out.append(total / n)
    return out


def doubling_blocks(n):
    """Blocks of length 1, 2, 4, ... alternating between 2 and 0."""
    out = []
    j = 0
    while len(out) < n:
        out.extend([2 if j % 2 == 0 else 0] * (2**j))
        j += 1
    return out[:n]


def ttt_legal_oracle(board, eye, game_over):
    """Legal four-part moves, written straight from the rules of the eye world.

    A move ``(vertical, horizontal, put_cross, new_game)`` is legal when the
    eye stays on the 3x3 board and a cross goes only onto an empty cell of a
    game still in play.
    """
    legal = set()
    r, c = eye
    for v, h, p, g in itertools.product(range(3), range(3), range(2), range(2)):
        nr = r + (-1 if v == 1 else 1 if v == 2 else 0)
        nc = c + (-1 if h == 1 else 1 if h == 2 else 0)
        if not (0 <= nr <= 2 and 0 <= nc <= 2):
            continue
        if p == 1 and (game_over or board[r * 3 + c] != EMPTY):
            continue
        legal.add((v, h, p, g))
    return legal

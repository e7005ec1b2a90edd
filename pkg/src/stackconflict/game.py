"""Two-player matrix games and their Stackelberg solutions.

Rewards are stored as a float array of shape ``(M, N, 2)`` together with a
boolean mask of the same shape flagging catastrophic cells. Flagged entries
are never used in arithmetic; every comparison ranks them below all finite
rewards.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import AssumptionViolated, NoFiniteCell

NEG_INF_TOKEN = "-inf"


class PlayerId(enum.IntEnum):
    ROW = 0
    COL = 1

    @property
    def other(self) -> "PlayerId":
        return PlayerId(1 - self)


@dataclass(frozen=True, eq=False)
class BimatrixGame:
    """M x N game with a reward pair per cell.

    ``payoffs[m, n, p]`` is player ``p``'s reward when the row player picks
    action ``m`` and the column player picks ``n``. Where ``sentinel[m, n, p]``
    is set the reward is "minus infinity" and the stored float is ignored.
    """

    row_actions: tuple
    col_actions: tuple
    payoffs: np.ndarray
    sentinel: np.ndarray

    def __post_init__(self):
        payoffs = np.array(self.payoffs, dtype=float)
        sentinel = np.array(self.sentinel, dtype=bool)
        if payoffs.ndim != 3 or payoffs.shape[2] != 2:
            raise ValueError(f"payoffs must have shape (M, N, 2), got {payoffs.shape}")
        if sentinel.shape != payoffs.shape:
            raise ValueError("sentinel mask must match payoff shape")
        m, n, _ = payoffs.shape
        if m < 1 or n < 1:
            raise ValueError("a game needs at least one action per player")
        payoffs[sentinel] = 0.0
        if not np.all(np.isfinite(payoffs)):
            raise ValueError("non-finite reward outside the sentinel mask")
        row_actions = tuple(self.row_actions) if self.row_actions else tuple(f"A{i + 1}" for i in range(m))
        col_actions = tuple(self.col_actions) if self.col_actions else tuple(f"B{j + 1}" for j in range(n))
        if len(row_actions) != m or len(col_actions) != n:
            raise ValueError("action label count does not match the reward grid")
        payoffs.setflags(write=False)
        sentinel.setflags(write=False)
        object.__setattr__(self, "payoffs", payoffs)
        object.__setattr__(self, "sentinel", sentinel)
        object.__setattr__(self, "row_actions", row_actions)
        object.__setattr__(self, "col_actions", col_actions)

    @classmethod
    def from_pairs(cls, pairs, row_actions=None, col_actions=None) -> "BimatrixGame":
        """Build a game from nested ``(r_row, r_col)`` pairs; ``-inf`` marks a sentinel."""
        arr = np.array(pairs, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError("pairs must be an M x N grid of reward pairs")
        if np.any(np.isnan(arr)) or np.any(arr == np.inf):
            raise ValueError("rewards must be finite or -inf")
        sentinel = arr == -np.inf
        return cls(row_actions or (), col_actions or (), np.where(sentinel, 0.0, arr), sentinel)

    @property
    def shape(self) -> tuple[int, int]:
        return self.payoffs.shape[0], self.payoffs.shape[1]

    def reward(self, m: int, n: int, player: PlayerId) -> float:
        """Reward as a plain float (``-inf`` for sentinels); for display and tests."""
        if self.sentinel[m, n, player]:
            return -math.inf
        return float(self.payoffs[m, n, player])

    def to_pairs(self) -> list:
        m, n = self.shape
        return [[(self.reward(i, j, PlayerId.ROW), self.reward(i, j, PlayerId.COL)) for j in range(n)]
                for i in range(m)]

    def transpose(self) -> "BimatrixGame":
        """Swap the roles of the two players."""
        payoffs = self.payoffs.transpose(1, 0, 2)[:, :, ::-1]
        sentinel = self.sentinel.transpose(1, 0, 2)[:, :, ::-1]
        return BimatrixGame(self.col_actions, self.row_actions, payoffs, sentinel)

    def __eq__(self, other):
        if not isinstance(other, BimatrixGame):
            return NotImplemented
        return (self.row_actions == other.row_actions and self.col_actions == other.col_actions
                and np.array_equal(self.sentinel, other.sentinel)
                and np.array_equal(self.payoffs, other.payoffs))

    def __repr__(self):
        return f"BimatrixGame(rows={self.row_actions}, cols={self.col_actions}, rewards={self.to_pairs()})"


@dataclass(frozen=True)
class Equilibrium:
    leader: PlayerId
    row_action: int
    col_action: int
    leader_value: float
    follower_value: float

    @property
    def cell(self) -> tuple[int, int]:
        return self.row_action, self.col_action

    def labels(self, game: BimatrixGame) -> tuple[str, str]:
        return game.row_actions[self.row_action], game.col_actions[self.col_action]


@dataclass(frozen=True)
class ConflictVerdict:
    row_led: Equilibrium
    col_led: Equilibrium

    @property
    def in_conflict(self) -> bool:
        return self.row_led.cell != self.col_led.cell


def _key(game: BimatrixGame, m: int, n: int, player: PlayerId) -> tuple[int, float]:
    # (0, 0.0) for a sentinel sorts below every (1, value)
    if game.sentinel[m, n, player]:
        return (0, 0.0)
    return (1, float(game.payoffs[m, n, player]))


def _follower_response(game: BimatrixGame, leader: PlayerId, leader_action: int) -> int:
    """Follower best response to a fixed leader action, ties broken in the leader's favour."""
    follower = leader.other
    n_responses = game.shape[follower]

    def cell(k):
        return (leader_action, k) if leader is PlayerId.ROW else (k, leader_action)

    best = None
    best_key = None
    for k in range(n_responses):
        m, n = cell(k)
        key = (_key(game, m, n, follower), _key(game, m, n, leader))
        if best_key is None or key > best_key:
            best, best_key = k, key
    return best


def solve_stackelberg(game: BimatrixGame, leader: PlayerId) -> Equilibrium:
    """Pure-strategy Stackelberg equilibrium with the given leader.

    The follower best-responds to each leader action (strong Stackelberg:
    indifference resolved in the leader's favour); the leader picks the action
    with the highest resulting reward, lowest index on ties.
    """
    leader = PlayerId(leader)
    n_leader = game.shape[leader]
    best_cell = None
    best_key = None
    for a in range(n_leader):
        r = _follower_response(game, leader, a)
        m, n = (a, r) if leader is PlayerId.ROW else (r, a)
        key = _key(game, m, n, leader)
        if best_key is None or key > best_key:
            best_cell, best_key = (m, n), key
    m, n = best_cell
    if game.sentinel[m, n, leader]:
        raise NoFiniteCell("every leader action ends in a catastrophic cell after the follower responds")
    return Equilibrium(
        leader=leader,
        row_action=m,
        col_action=n,
        leader_value=game.reward(m, n, leader),
        follower_value=game.reward(m, n, leader.other),
    )


def detect_conflict(game: BimatrixGame) -> ConflictVerdict:
    """Solve with each player as leader and compare the two joint actions."""
    return ConflictVerdict(
        row_led=solve_stackelberg(game, PlayerId.ROW),
        col_led=solve_stackelberg(game, PlayerId.COL),
    )


def reward_gaps(game: BimatrixGame) -> tuple[float, float]:
    """Preference margins ``(A, B)`` of a 2x2 game with anti-diagonal optima.

    Requires the row player's best cell at (A2, B1) and the column player's
    at (A1, B2), each strictly preferred over the other three cells.
    ``A = r_row(A2,B1) - r_row(A1,B2)`` and ``B = r_col(A1,B2) - r_col(A2,B1)``.
    """
    if game.shape != (2, 2):
        raise AssumptionViolated(f"reward gaps need a 2x2 game, got {game.shape}")
    row, col = PlayerId.ROW, PlayerId.COL
    for m, n, p in ((1, 0, row), (0, 1, row), (0, 1, col), (1, 0, col)):
        if game.sentinel[m, n, p]:
            raise AssumptionViolated(f"anti-diagonal cell ({m + 1},{n + 1}) must be finite")

    def check(best, others, player, name):
        b = _key(game, *best, player)
        for cell in others:
            if not b > _key(game, *cell, player):
                raise AssumptionViolated(
                    f"{name}: r{best[0] + 1}{best[1] + 1}{player + 1} > "
                    f"r{cell[0] + 1}{cell[1] + 1}{player + 1} fails")

    check((1, 0), [(0, 1), (0, 0), (1, 1)], row, "row preference")
    check((0, 1), [(1, 0), (0, 0), (1, 1)], col, "column preference")
    a = game.reward(1, 0, row) - game.reward(0, 1, row)
    b = game.reward(0, 1, col) - game.reward(1, 0, col)
    return a, b


# canonical example games

LANE_CHANGE_GAME = BimatrixGame.from_pairs(
    [[(-math.inf, -math.inf), (0.0, 1.0)],
     [(1.0, 0.0), (-math.inf, -math.inf)]],
    row_actions=("LCB", "LCA"),
    col_actions=("GW", "C"),
)

INTERSECTION_GAME = BimatrixGame.from_pairs(
    [[(-math.inf, -math.inf), (0.0, 1.0)],
     [(1.0, 0.0), (-math.inf, -math.inf)]],
    row_actions=("GW", "C"),
    col_actions=("GW", "C"),
)


# plain-text format

def _parse_value(token: str) -> float:
    token = token.strip()
    if token.lower() == NEG_INF_TOKEN:
        return -math.inf
    value = float(token)
    if not math.isfinite(value):
        raise ValueError(f"reward {token!r} is not finite; only {NEG_INF_TOKEN!r} is allowed")
    return value


def parse_game(text: str) -> BimatrixGame:
    """Parse the plain-text game format.

    The first non-blank line is ``M N``; optional ``rows:`` / ``cols:`` lines
    carry action labels; then M lines of N whitespace-separated ``r1,r2``
    cells. ``#`` starts a comment.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty game file")
    try:
        m, n = (int(t) for t in lines[0].split())
    except ValueError:
        raise ValueError(f"first line must be 'M N', got {lines[0]!r}") from None
    rows = cols = None
    body = []
    for ln in lines[1:]:
        low = ln.lower()
        if low.startswith("rows:"):
            rows = tuple(ln[5:].split())
        elif low.startswith("cols:"):
            cols = tuple(ln[5:].split())
        else:
            body.append(ln)
    if len(body) != m:
        raise ValueError(f"expected {m} reward rows, found {len(body)}")
    pairs = []
    for i, ln in enumerate(body):
        cells = ln.split()
        if len(cells) != n:
            raise ValueError(f"row {i + 1}: expected {n} cells, found {len(cells)}")
        row = []
        for cell in cells:
            parts = cell.split(",")
            if len(parts) != 2:
                raise ValueError(f"row {i + 1}: cell {cell!r} is not 'r1,r2'")
            row.append((_parse_value(parts[0]), _parse_value(parts[1])))
        pairs.append(row)
    return BimatrixGame.from_pairs(pairs, rows, cols)


def format_game(game: BimatrixGame) -> str:
    def fmt(v):
        return NEG_INF_TOKEN if v == -math.inf else repr(float(v))

    m, n = game.shape
    out = [f"{m} {n}", "rows: " + " ".join(game.row_actions), "cols: " + " ".join(game.col_actions)]
    for row in game.to_pairs():
        out.append(" ".join(f"{fmt(a)},{fmt(b)}" for a, b in row))
    return "\n".join(out) + "\n"


def load_game(path) -> BimatrixGame:
    return parse_game(Path(path).read_text(encoding="utf-8"))

"""Game play over learned rules: random and depth-limited minimax agents.

Terminal values are signed by side (win for the mover's side positive) and
shaded slightly by ply so a win now beats a win later and a loss later
beats a loss now. Non-terminal leaves use the partial-completion heuristic:
the best fraction of my rule already satisfied minus the opponent's best
fraction, each counting only placements not blocked by a foreign chip.
Heuristic magnitudes stay below 1, so they never outrank a real terminal.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .board import Board, PlayerId
from .win_rule import WinRule


class AgentError(Exception):
    pass


class NoLegalMove(AgentError):
    """choose_move was asked to move on a full board."""


class Policy(str, enum.Enum):
    RANDOM = "random"
    MINIMAX = "minimax"


@dataclass(frozen=True)
class AgentConfig:
    policy: Policy = Policy.MINIMAX
    depth: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.policy is Policy.MINIMAX and self.depth < 1:
            raise ValueError("minimax depth must be >= 1")


_WIN = 10.0
_LOSS = -10.0
_PLY_SHADE = 0.01


def _value_after_move(
    board: Board,
    just_moved: PlayerId,
    me: PlayerId,
    my_rule: WinRule,
    opp_rule: WinRule,
    depth_left: int,
    ply: int,
) -> float:
    if just_moved is me:
        if my_rule.detect(board, me):
            return _WIN - _PLY_SHADE * ply
    else:
        if opp_rule.detect(board, just_moved):
            return _LOSS + _PLY_SHADE * ply
    if board.is_full():
        return 0.0
    if depth_left == 0:
        return my_rule.completion(board, me) - opp_rule.completion(board, me.opponent)
    mover = just_moved.opponent
    values = (
        _value_after_move(
            board.apply_action(mover, a), mover, me, my_rule, opp_rule, depth_left - 1, ply + 1
        )
        for a in board.legal_actions()
    )
    return max(values) if mover is me else min(values)


def choose_move(
    board: Board,
    me: PlayerId,
    my_rule: WinRule,
    opp_rule: WinRule,
    cfg: AgentConfig,
    rng: random.Random | None = None,
) -> int:
    """Pick a column for `me`; ties break toward the lowest column index."""
    legal = board.legal_actions()
    if not legal:
        raise NoLegalMove("no legal column on a full board")
    if cfg.policy is Policy.RANDOM:
        rng = rng if rng is not None else random.Random(cfg.seed)
        return rng.choice(legal)
    best_action, best_value = legal[0], float("-inf")
    for a in legal:
        child = board.apply_action(me, a)
        v = _value_after_move(child, me, me, my_rule, opp_rule, cfg.depth - 1, 1)
        if v > best_value:
            best_action, best_value = a, v
    return best_action


@dataclass(frozen=True)
class GameOutcome:
    winner: PlayerId | None  # None means draw
    fired_rule: str | None  # "p1" or "p2": which side's rule detected
    ply: int

    @property
    def is_draw(self) -> bool:
        return self.winner is None


@dataclass(frozen=True)
class GameRecord:
    moves: tuple[int, ...]
    outcome: GameOutcome
    boards: tuple[Board, ...] | None = None


def play_game(
    rule_p1: WinRule,
    rule_p2: WinRule,
    cfg1: AgentConfig,
    cfg2: AgentConfig,
    record_boards: bool = False,
) -> GameRecord:
    """Alternating play from P1; after every move both rules are checked for
    both players (mover first) and the game ends at the first detection or
    when the board fills."""
    rules = {PlayerId.P1: rule_p1, PlayerId.P2: rule_p2}
    cfgs = {PlayerId.P1: cfg1, PlayerId.P2: cfg2}
    rngs = {p: random.Random(cfgs[p].seed) for p in PlayerId}
    board = Board.empty()
    mover = PlayerId.P1
    moves: list[int] = []
    boards: list[Board] = [board]
    for ply in range(1, 43):
        a = choose_move(
            board, mover, rules[mover], rules[mover.opponent], cfgs[mover], rng=rngs[mover]
        )
        board = board.apply_action(mover, a)
        moves.append(a)
        if record_boards:
            boards.append(board)
        for p in (mover, mover.opponent):
            for tag, rule in (("p1", rule_p1), ("p2", rule_p2)):
                if rule.detect(board, p):
                    return GameRecord(
                        tuple(moves),
                        GameOutcome(winner=p, fired_rule=tag, ply=ply),
                        tuple(boards) if record_boards else None,
                    )
        mover = mover.opponent
    return GameRecord(
        tuple(moves),
        GameOutcome(winner=None, fired_rule=None, ply=len(moves)),
        tuple(boards) if record_boards else None,
    )


# -- position generators for the forced-win / forced-block properties --------

def positions_with_immediate_win(
    rule: WinRule, n: int, seed: int
) -> list[tuple[Board, PlayerId]]:
    """Seeded random-play positions where the mover can win this move."""
    out: list[tuple[Board, PlayerId]] = []
    game = 0
    while len(out) < n:
        rng = random.Random(f"winpos:{seed}:{game}")
        game += 1
        board = Board.empty()
        mover = PlayerId.P1
        while True:
            legal = board.legal_actions()
            if not legal:
                break
            if any(rule.detect(board.apply_action(mover, a), mover) for a in legal):
                out.append((board, mover))
                break
            board = board.apply_action(mover, rng.choice(legal))
            mover = mover.opponent
    return out[:n]


def positions_with_forced_block(
    rule: WinRule, n: int, seed: int
) -> list[tuple[Board, PlayerId, int]]:
    """Positions where the mover cannot win, the opponent threatens to, and
    exactly one move denies every immediate opponent win. Threats and blocks
    are established exhaustively, two plies deep, straight from detect()."""
    out: list[tuple[Board, PlayerId, int]] = []
    game = 0
    while len(out) < n:
        rng = random.Random(f"blockpos:{seed}:{game}")
        game += 1
        board = Board.empty()
        mover = PlayerId.P1
        while True:
            legal = board.legal_actions()
            if not legal:
                break
            if any(rule.detect(board.apply_action(mover, a), mover) for a in legal):
                break  # game over next move; start a fresh game
            opp = mover.opponent
            threatened = any(
                rule.detect(board.apply_action(opp, b), opp) for b in legal
            )
            if threatened:
                blocks = []
                for a in legal:
                    after = board.apply_action(mover, a)
                    if not any(
                        rule.detect(after.apply_action(opp, b), opp)
                        for b in after.legal_actions()
                    ):
                        blocks.append(a)
                if len(blocks) == 1:
                    out.append((board, mover, blocks[0]))
                    if len(out) >= n:
                        return out
            board = board.apply_action(mover, rng.choice(legal))
            mover = opp
    return out

"""Extensive-form branches: demo parsing, manipulation, and board conversion.

A Branch is a single alternating move sequence. A move's action may be
unknown (None): the demonstration only shows the chips the teacher placed,
so turn slots without a visible chip stay unknown and drop no chip when the
branch is replayed onto a board.
"""
from __future__ import annotations

from dataclasses import dataclass

from .board import Board, ColumnFull, PlayerId, COLS


class GameTreeError(Exception):
    """Base class for branch-level failures."""


class MalformedBranch(GameTreeError):
    """Move sequence breaks the alternation invariant."""


class UnorderableDemo(GameTreeError):
    """No gravity-consistent move ordering exists for a demo board."""


class OutOfRange(GameTreeError):
    """A translated action would leave columns 0-6."""


class IllegalInsertion(GameTreeError):
    """Insertion would break alternation or overflow a column."""


class NoSuchAction(GameTreeError):
    """The player has no known move with the requested action."""


class IllegalReplay(GameTreeError):
    """Replaying the branch drops a chip into a full column."""


@dataclass(frozen=True)
class Move:
    player: PlayerId
    action: int | None  # None marks an unknown move: no chip is dropped

    @property
    def is_known(self) -> bool:
        return self.action is not None


@dataclass(frozen=True)
class GameSkeleton:
    """Pre-win game structure: two players in strict alternation."""

    num_players: int = 2
    alternating: bool = True
    first_player: PlayerId = PlayerId.P1

    def __post_init__(self) -> None:
        assert self.num_players == 2 and self.alternating

    def player_at(self, index: int) -> PlayerId:
        return self.first_player if index % 2 == 0 else self.first_player.opponent


DEFAULT_SKELETON = GameSkeleton()


@dataclass(frozen=True)
class Branch:
    skeleton: GameSkeleton
    moves: tuple[Move, ...] = ()

    def __post_init__(self) -> None:
        for i, m in enumerate(self.moves):
            if m.player is not self.skeleton.player_at(i):
                raise MalformedBranch(f"move {i} belongs to {m.player.name}, slot does not")

    def known_actions(self, player: PlayerId) -> tuple[int, ...]:
        return tuple(m.action for m in self.moves if m.player is player and m.is_known)

    def to_json(self) -> dict:
        return {
            "first_player": int(self.skeleton.first_player),
            "moves": [{"p": int(m.player), "a": m.action} for m in self.moves],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "Branch":
        sk = GameSkeleton(first_player=PlayerId(payload["first_player"]))
        moves = tuple(Move(PlayerId(m["p"]), m["a"]) for m in payload["moves"])
        return cls(sk, moves)


def to_board(branch: Branch) -> Board:
    """Replay the known moves in order, skipping unknown ones."""
    board = Board.empty()
    for m in branch.moves:
        if m.is_known:
            try:
                board = board.apply_action(m.player, m.action)
            except ColumnFull as exc:
                raise IllegalReplay(str(exc)) from exc
    return board


def _validate_replay(branch: Branch) -> Branch:
    to_board(branch)
    return branch


def branch_from_demo(
    board: Board, winner: PlayerId, skeleton: GameSkeleton = DEFAULT_SKELETON
) -> Branch:
    """Order a demo board's chips into an alternating branch.

    The winner's chips are taken column-major bottom-up, interleaving columns
    only when a chip still needs support; the opponent's visible support
    chips fill opponent slots the same way; any turn slot with nothing to
    place stays unknown. Gravity-consistent boards always order: the lowest
    unplaced chip of any column is placeable on its owner's next turn, so the
    loop below places at least one chip per round.
    """
    stacks: list[list[PlayerId]] = []
    for c in range(COLS):
        stacks.append([PlayerId(board.cell(c, r)) for r in range(board.heights[c])])
    remaining = sum(len(s) for s in stacks)
    cursor = [0] * COLS  # next unplaced chip per column, from the bottom

    moves: list[Move] = []
    idle_rounds = 0
    while remaining:
        turn = skeleton.player_at(len(moves))
        placed = None
        for c in range(COLS):
            if cursor[c] < len(stacks[c]) and stacks[c][cursor[c]] is turn:
                placed = c
                break
        if placed is None:
            moves.append(Move(turn, None))
            idle_rounds += 1
            if idle_rounds > 2:  # both players stuck: cannot happen, see above
                raise UnorderableDemo("no placeable chip for either player")
            continue
        moves.append(Move(turn, placed))
        cursor[placed] += 1
        remaining -= 1
        idle_rounds = 0

    branch = Branch(skeleton, tuple(moves))
    assert to_board(branch).occupied == board.occupied
    return branch


def translate(branch: Branch, player: PlayerId, offset: int) -> Branch:
    """Shift all known actions of `player` by `offset` columns."""
    moves = []
    for m in branch.moves:
        if m.player is player and m.is_known:
            a = m.action + offset
            if not 0 <= a < COLS:
                raise OutOfRange(f"action {m.action}{offset:+d} leaves columns 0-6")
            moves.append(Move(player, a))
        else:
            moves.append(m)
    return _validate_replay(Branch(branch.skeleton, tuple(moves)))


def add_action(branch: Branch, action: int, player: PlayerId, position: int) -> Branch:
    """Insert a known move for `player` at turn slot `position`.

    An unknown slot owned by the player is filled in place; a slot holding a
    known move gets the new move spliced in front of it together with an
    unknown opponent slot, so alternation is preserved; positions past the
    end are reached by padding unknown slots.
    """
    if not 0 <= action < COLS:
        raise IllegalInsertion(f"action {action} outside 0-6")
    if position < 0:
        raise IllegalInsertion("negative position")
    if branch.skeleton.player_at(position) is not player:
        raise IllegalInsertion(f"slot {position} is not {player.name}'s turn")
    moves = list(branch.moves)
    new = Move(player, action)
    if position < len(moves):
        if not moves[position].is_known:
            moves[position] = new
        else:
            moves[position:position] = [new, Move(player.opponent, None)]
    else:
        while len(moves) < position:
            moves.append(Move(branch.skeleton.player_at(len(moves)), None))
        moves.append(new)
    try:
        return _validate_replay(Branch(branch.skeleton, tuple(moves)))
    except IllegalReplay as exc:
        raise IllegalInsertion(str(exc)) from exc


def remove_action(branch: Branch, action: int, player: PlayerId) -> Branch:
    """Remove the player's last known move with `action`.

    The freed slot becomes unknown, which keeps every other chip where the
    demonstration put it; trailing unknown slots are dropped.
    """
    moves = list(branch.moves)
    for i in range(len(moves) - 1, -1, -1):
        m = moves[i]
        if m.player is player and m.action == action:
            moves[i] = Move(player, None)
            break
    else:
        raise NoSuchAction(f"{player.name} has no known move in column {action}")
    while moves and not moves[-1].is_known:
        moves.pop()
    return Branch(branch.skeleton, tuple(moves))


def prepend_filler_layer(
    branch: Branch, filler_cols: tuple[int, ...], filler_player: PlayerId
) -> Branch:
    """Lay one filler chip at the bottom of each given column before the
    branch's own moves, lifting everything the branch replays by one row."""
    moves: list[Move] = []
    other = filler_player.opponent
    for c in filler_cols:
        if branch.skeleton.player_at(len(moves)) is not filler_player:
            moves.append(Move(other, None))
        moves.append(Move(filler_player, c))
    tail_start = branch.skeleton.player_at(len(moves))
    if branch.moves and branch.moves[0].player is not tail_start:
        moves.append(Move(tail_start, None))
    moves.extend(branch.moves)
    return _validate_replay(Branch(branch.skeleton, tuple(moves)))

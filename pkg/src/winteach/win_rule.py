"""Win conditions: a normalized relative cell pattern plus generalization flags.

A rule matches a board when the pattern, placed at some permitted anchor,
is satisfied. The flags widen or narrow what "satisfied" means:

- h_translate / v_translate: the anchor may move along columns / rows.
- exclusive: pattern cells must hold the winning player's own chips
  (otherwise any chip satisfies a pattern cell).
- monotone: extra winner chips outside the pattern do not invalidate a win
  (otherwise the winner's chips must not stray outside the matched cells).
- rigid: the relative geometry is fixed; when False, matching degrades to
  per-column chip counts over the pattern's column window.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .board import Board, PlayerId, COLS, ROWS, bit_index

_COLUMN_MASK = tuple(
    sum(1 << bit_index(c, r) for r in range(ROWS)) for c in range(COLS)
)


@dataclass(frozen=True)
class RelPattern:
    """Non-empty set of (dcol, drow) offsets with min dcol = min drow = 0."""

    cells: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("pattern needs at least one cell")
        dcs = [dc for dc, _ in self.cells]
        drs = [dr for _, dr in self.cells]
        if min(dcs) != 0 or min(drs) != 0:
            raise ValueError("pattern offsets must be normalized to min 0")
        if max(dcs) >= COLS or max(drs) >= ROWS:
            raise ValueError("pattern does not fit a 7x6 board")

    @classmethod
    def normalize(cls, cells: Iterable[tuple[int, int]]) -> tuple["RelPattern", tuple[int, int]]:
        """Shift arbitrary coordinates to a normalized pattern.

        Returns the pattern and the (min col, min row) shift that anchors it
        back onto the original cells.
        """
        pts = set(cells)
        if not pts:
            raise ValueError("pattern needs at least one cell")
        c0 = min(c for c, _ in pts)
        r0 = min(r for _, r in pts)
        return cls(frozenset((c - c0, r - r0) for c, r in pts)), (c0, r0)

    @property
    def size(self) -> int:
        return len(self.cells)

    @cached_property
    def sorted_cells(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.cells))

    @property
    def max_dc(self) -> int:
        return max(dc for dc, _ in self.cells)

    @property
    def max_dr(self) -> int:
        return max(dr for _, dr in self.cells)

    @cached_property
    def col_counts(self) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        for dc, _ in self.cells:
            counts[dc] = counts.get(dc, 0) + 1
        return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class WinRule:
    pattern: RelPattern
    anchor0: tuple[int, int]
    h_translate: bool = False
    v_translate: bool = False
    exclusive: bool = False
    monotone: bool = False
    rigid: bool = False

    def __post_init__(self) -> None:
        c, r = self.anchor0
        if not (0 <= c <= COLS - 1 - self.pattern.max_dc and 0 <= r <= ROWS - 1 - self.pattern.max_dr):
            raise ValueError(f"anchor {self.anchor0} does not keep the pattern in-bounds")

    # -- anchor machinery ---------------------------------------------------

    @cached_property
    def anchor_list(self) -> tuple[tuple[int, int], ...]:
        cols = range(COLS - self.pattern.max_dc) if self.h_translate else (self.anchor0[0],)
        rows = range(ROWS - self.pattern.max_dr) if self.v_translate else (self.anchor0[1],)
        return tuple((c, r) for c in cols for r in rows)

    @cached_property
    def _anchored(self) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
        out = []
        for ac, ar in self.anchor_list:
            cells = tuple((ac + dc, ar + dr) for dc, dr in self.pattern.sorted_cells)
            mask = 0
            for c, r in cells:
                mask |= 1 << bit_index(c, r)
            out.append((mask, cells))
        return tuple(out)

    @cached_property
    def _window_cols(self) -> tuple[int, ...]:
        if self.h_translate:
            return tuple(range(COLS - self.pattern.max_dc))
        return (self.anchor0[0],)

    # -- detection ----------------------------------------------------------

    def detect(self, board: Board, player: PlayerId) -> bool:
        mine = board.mask_of(player)
        base = mine if self.exclusive else board.occupied
        if self.rigid:
            for mask, _ in self._anchored:
                if base & mask == mask:
                    if self.monotone or mine & ~mask == 0:
                        return True
            return False
        for start in self._window_cols:
            if all(
                (base & _COLUMN_MASK[start + dc]).bit_count() >= need
                for dc, need in self.pattern.col_counts
            ):
                if self.monotone or mine.bit_count() == self.pattern.size:
                    return True
        return False

    def matched_cells(self, board: Board, player: PlayerId) -> tuple[tuple[int, int], ...] | None:
        """Cells of the first satisfied placement, for win highlighting."""
        mine = board.mask_of(player)
        base = mine if self.exclusive else board.occupied
        if self.rigid:
            for mask, cells in self._anchored:
                if base & mask == mask and (self.monotone or mine & ~mask == 0):
                    return cells
            return None
        for start in self._window_cols:
            if all(
                (base & _COLUMN_MASK[start + dc]).bit_count() >= need
                for dc, need in self.pattern.col_counts
            ):
                if not self.monotone and mine.bit_count() != self.pattern.size:
                    continue
                cells = []
                for dc, need in self.pattern.col_counts:
                    col = start + dc
                    found = 0
                    for r in range(ROWS):
                        if base & (1 << bit_index(col, r)):
                            cells.append((col, r))
                            found += 1
                            if found == need:
                                break
                return tuple(cells)
        return None

    def completion(self, board: Board, player: PlayerId) -> float:
        """Best fraction of the pattern already satisfied for `player`,
        counting only placements that are still completable (no foreign chip
        sitting on an unmatched pattern cell). Drives the minimax heuristic."""
        mine = board.mask_of(player)
        base = mine if self.exclusive else board.occupied
        best = 0.0
        if self.rigid:
            occupied = board.occupied
            for mask, _ in self._anchored:
                hit = base & mask
                if occupied & mask != hit:  # a blocking chip occupies a pattern cell
                    continue
                best = max(best, hit.bit_count() / self.pattern.size)
        else:
            for start in self._window_cols:
                got = sum(
                    min((base & _COLUMN_MASK[start + dc]).bit_count(), need)
                    for dc, need in self.pattern.col_counts
                )
                best = max(best, got / self.pattern.size)
        return best

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "cells": [list(c) for c in self.pattern.sorted_cells],
            "anchor0": list(self.anchor0),
            "h_translate": self.h_translate,
            "v_translate": self.v_translate,
            "exclusive": self.exclusive,
            "monotone": self.monotone,
            "rigid": self.rigid,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "WinRule":
        pattern = RelPattern(frozenset((int(c), int(r)) for c, r in payload["cells"]))
        return cls(
            pattern=pattern,
            anchor0=(int(payload["anchor0"][0]), int(payload["anchor0"][1])),
            h_translate=bool(payload["h_translate"]),
            v_translate=bool(payload["v_translate"]),
            exclusive=bool(payload["exclusive"]),
            monotone=bool(payload["monotone"]),
            rigid=bool(payload["rigid"]),
        )

    def canonical_bytes(self) -> bytes:
        return (json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n").encode()


def rule_id(rule: WinRule) -> str:
    return hashlib.sha256(rule.canonical_bytes()).hexdigest()[:12]


# -- canonical Connect Four rules -------------------------------------------

CANONICAL_NAMES = ("column", "row", "diagonal", "anti_diagonal")

_CANONICAL_CELLS = {
    "column": [(0, r) for r in range(4)],
    "row": [(c, 0) for c in range(4)],
    "diagonal": [(i, i) for i in range(4)],
    "anti_diagonal": [(i, 3 - i) for i in range(4)],
}


def canonical_rules() -> list[WinRule]:
    """The four fully generalized 4-in-a-line rules."""
    return [
        WinRule(
            pattern=RelPattern(frozenset(_CANONICAL_CELLS[name])),
            anchor0=(0, 0),
            h_translate=True,
            v_translate=True,
            exclusive=True,
            monotone=True,
            rigid=True,
        )
        for name in CANONICAL_NAMES
    ]


# -- construction and comparison helpers ------------------------------------

def board_with_pattern(
    pattern: RelPattern, anchor: tuple[int, int], winner: PlayerId = PlayerId.P1
) -> Board:
    """One anchored placement: winner chips on the pattern cells, opponent
    chips filling every unsupported cell beneath them."""
    ac, ar = anchor
    winner_cells = {(ac + dc, ar + dr) for dc, dr in pattern.cells}
    if any(not (0 <= c < COLS and 0 <= r < ROWS) for c, r in winner_cells):
        raise ValueError(f"anchor {anchor} pushes the pattern out of bounds")
    mask_w = mask_o = 0
    for c, r in winner_cells:
        mask_w |= 1 << bit_index(c, r)
    tops: dict[int, int] = {}
    for c, r in winner_cells:
        tops[c] = max(tops.get(c, -1), r)
    for c, top in tops.items():
        for r in range(top):
            if (c, r) not in winner_cells:
                mask_o |= 1 << bit_index(c, r)
    if winner is PlayerId.P1:
        return Board(mask_w, mask_o)
    return Board(mask_o, mask_w)


def _random_prefix_board(rng: random.Random) -> Board:
    board = Board.empty()
    player = PlayerId.P1
    for _ in range(rng.randint(0, 42)):
        legal = board.legal_actions()
        if not legal:
            break
        board = board.apply_action(player, rng.choice(legal))
        player = player.opponent
    return board


def equivalent(a: WinRule, b: WinRule, budget: int = 1000, seed: int = 0) -> bool:
    """Behavioral equality check: agreement on every sampled random-play
    board and on every single anchored placement of either rule's pattern."""
    for rule in (a, b):
        p = rule.pattern
        for ac in range(COLS - p.max_dc):
            for ar in range(ROWS - p.max_dr):
                board = board_with_pattern(p, (ac, ar))
                for player in PlayerId:
                    if a.detect(board, player) != b.detect(board, player):
                        return False
    rng = random.Random(seed)
    for _ in range(budget):
        board = _random_prefix_board(rng)
        for player in PlayerId:
            if a.detect(board, player) != b.detect(board, player):
                return False
    return True

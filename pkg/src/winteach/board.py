"""7x6 vertical board: gravity placement, serialization, perspective mirroring.

Column 0 is leftmost in the engine's canonical ("robot") frame and row 0 is
the bottom row. The CLI and the web UI render the mirrored ("human") frame,
where column c maps to 6 - c. Everything downstream works in the canonical
frame; mirroring happens exactly once at the presentation boundary.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

COLS = 7
ROWS = 6
CELL_COUNT = COLS * ROWS


class BoardError(Exception):
    """Base class for board-level failures."""


class ColumnFull(BoardError):
    """A chip was dropped into a column that already holds six."""


class InvalidBoard(BoardError):
    """Cell data is malformed or not gravity-consistent."""


class PlayerId(enum.IntEnum):
    P1 = 1
    P2 = 2

    @property
    def opponent(self) -> "PlayerId":
        return PlayerId.P2 if self is PlayerId.P1 else PlayerId.P1

    @property
    def color(self) -> str:
        # The demonstrating player plays yellow, the other side red.
        return "yellow" if self is PlayerId.P1 else "red"


def bit_index(col: int, row: int) -> int:
    return row * COLS + col

def _bit(col: int, row: int) -> int:
    return 1 << bit_index(col, row)


_COLUMN_MASK = tuple(sum(_bit(c, r) for r in range(ROWS)) for c in range(COLS))
# _COLUMN_PREFIX[c][h] is the mask of the lowest h cells of column c.
_COLUMN_PREFIX = tuple(
    tuple(sum(_bit(c, r) for r in range(h)) for h in range(ROWS + 1))
    for c in range(COLS)
)


@dataclass(frozen=True)
class Board:
    """Immutable 7x6 position, one occupancy bitmask per player.

    Bit ``row * 7 + col`` is set when that cell holds a chip. Construction
    validates gravity, so every Board in circulation is consistent and safe
    to share between threads.
    """

    mask1: int = 0
    mask2: int = 0

    def __post_init__(self) -> None:
        if self.mask1 & self.mask2:
            raise InvalidBoard("both players occupy the same cell")
        occupied = self.mask1 | self.mask2
        if occupied >> CELL_COUNT:
            raise InvalidBoard("chip outside the 7x6 board")
        for c in range(COLS):
            col_bits = occupied & _COLUMN_MASK[c]
            if col_bits != _COLUMN_PREFIX[c][col_bits.bit_count()]:
                raise InvalidBoard(f"floating chip in column {c}")

    @classmethod
    def empty(cls) -> "Board":
        return cls(0, 0)

    @property
    def occupied(self) -> int:
        return self.mask1 | self.mask2

    @cached_property
    def heights(self) -> tuple[int, ...]:
        occ = self.occupied
        return tuple((occ & _COLUMN_MASK[c]).bit_count() for c in range(COLS))

    def mask_of(self, player: PlayerId) -> int:
        return self.mask1 if player is PlayerId.P1 else self.mask2

    def cell(self, col: int, row: int) -> int:
        """0 empty, 1 P1 chip, 2 P2 chip."""
        b = _bit(col, row)
        if self.mask1 & b:
            return 1
        if self.mask2 & b:
            return 2
        return 0

    def apply_action(self, player: PlayerId, action: int) -> "Board":
        """Drop a chip for `player` into column `action`; returns the new board."""
        if not 0 <= action < COLS:
            raise ValueError(f"column {action} outside 0-6")
        row = self.heights[action]
        if row >= ROWS:
            raise ColumnFull(f"column {action} already holds {ROWS} chips")
        b = _bit(action, row)
        if player is PlayerId.P1:
            return Board(self.mask1 | b, self.mask2)
        return Board(self.mask1, self.mask2 | b)

    def legal_actions(self) -> tuple[int, ...]:
        return tuple(c for c in range(COLS) if self.heights[c] < ROWS)

    def is_full(self) -> bool:
        return self.occupied.bit_count() == CELL_COUNT

    def chip_count(self, player: PlayerId) -> int:
        return self.mask_of(player).bit_count()

    def cells_of(self, player: PlayerId) -> frozenset[tuple[int, int]]:
        mask = self.mask_of(player)
        out = []
        while mask:
            low = mask & -mask
            i = low.bit_length() - 1
            out.append((i % COLS, i // COLS))
            mask ^= low
        return frozenset(out)

    def mirror(self) -> "Board":
        """Reflect left-right: column c maps to 6 - c, rows unchanged."""

        def flip(mask: int) -> int:
            out = 0
            while mask:
                low = mask & -mask
                i = low.bit_length() - 1
                out |= _bit(COLS - 1 - i % COLS, i // COLS)
                mask ^= low
            return out

        return Board(flip(self.mask1), flip(self.mask2))

    def to_cells(self) -> list[list[int]]:
        """Row-major cells, bottom row first: cells[row][col] in {0, 1, 2}."""
        return [[self.cell(c, r) for c in range(COLS)] for r in range(ROWS)]

    @classmethod
    def from_cells(cls, cells: list[list[int]]) -> "Board":
        """Parse the JSON encoding, rejecting malformed or floating layouts."""
        if not isinstance(cells, list) or len(cells) != ROWS:
            raise InvalidBoard("expected 6 rows")
        mask1 = mask2 = 0
        for r, row in enumerate(cells):
            if not isinstance(row, list) or len(row) != COLS:
                raise InvalidBoard("expected 7 columns per row")
            for c, v in enumerate(row):
                if v == 1:
                    mask1 |= _bit(c, r)
                elif v == 2:
                    mask2 |= _bit(c, r)
                elif v != 0:
                    raise InvalidBoard(f"cell value {v!r} not in 0/1/2")
        return cls(mask1, mask2)  # gravity checked in __post_init__

    def to_json(self) -> dict:
        return {"cells": self.to_cells()}

    @classmethod
    def from_json(cls, payload: dict) -> "Board":
        if not isinstance(payload, dict) or "cells" not in payload:
            raise InvalidBoard('expected {"cells": [[...]x6]}')
        return cls.from_cells(payload["cells"])

    def render(self, human_view: bool = True) -> str:
        """ASCII picture for the terminal, top row first."""
        b = self.mirror() if human_view else self
        glyphs = {0: ".", 1: "Y", 2: "R"}
        lines = []
        for r in range(ROWS - 1, -1, -1):
            lines.append(" ".join(glyphs[b.cell(c, r)] for c in range(COLS)))
        lines.append(" ".join(str(c) for c in range(COLS)))
        return "\n".join(lines)

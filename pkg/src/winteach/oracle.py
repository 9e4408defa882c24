"""Simulated teacher: demonstrates a ground-truth rule and answers questions.

The oracle answers from rule semantics rather than a scripted list, so the
learner's question wording and order can evolve without breaking tests.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .board import Board, PlayerId, COLS
from .learner import AblationConfig, Question, teach
from .win_rule import RelPattern, WinRule, board_with_pattern


@dataclass(frozen=True)
class GroundTruth:
    rule: WinRule
    rng_seed: int


def demonstrate_at(rule: WinRule, anchor: tuple[int, int]) -> tuple[Board, PlayerId]:
    """Demonstration board for one explicit anchoring of the rule's pattern."""
    board = board_with_pattern(rule.pattern, anchor, PlayerId.P1)
    return board, PlayerId.P1


def demonstrate(gt: GroundTruth) -> tuple[Board, PlayerId]:
    """Seeded demonstration: winner chips on one valid anchoring of the
    pattern, opponent chips supporting them from below.

    Translatable rules are demonstrated at the bottom row in a random valid
    column, like the paper's figures; pinned rules are demonstrated at their
    own anchor so the rule recognizes its own demonstration.
    """
    rng = random.Random(gt.rng_seed)
    if gt.rule.h_translate:
        col = rng.choice(range(COLS - gt.rule.pattern.max_dc))
    else:
        col = gt.rule.anchor0[0]
    row = 0 if gt.rule.v_translate else gt.rule.anchor0[1]
    board, winner = demonstrate_at(gt.rule, (col, row))
    assert gt.rule.detect(board, winner)
    return board, winner


def answer(gt: GroundTruth, q: Question) -> bool:
    return gt.rule.detect(q.hypothetical, q.winner)


_BOX = 4  # random patterns grow inside a 4x4 box, like the paper's figures


def random_pattern(seed: int, min_cells: int = 2, max_cells: int = 5) -> GroundTruth:
    """Seeded random win pattern with every generalization flag set.

    Cells grow by 8-neighbor adjacency inside a small box, which keeps the
    shapes compact enough to be reachable in random play.
    """
    if not 1 <= min_cells <= max_cells <= 10:
        raise ValueError("need 1 <= min_cells <= max_cells <= 10")
    rng = random.Random(f"pattern:{seed}")
    n = rng.randint(min_cells, max_cells)
    cells = {(rng.randrange(_BOX), rng.randrange(_BOX))}
    while len(cells) < n:
        frontier = sorted(
            {
                (c + dc, r + dr)
                for c, r in cells
                for dc in (-1, 0, 1)
                for dr in (-1, 0, 1)
                if 0 <= c + dc < _BOX and 0 <= r + dr < _BOX
            }
            - cells
        )
        cells.add(rng.choice(frontier))
    pattern, _ = RelPattern.normalize(cells)
    rule = WinRule(
        pattern=pattern,
        anchor0=(0, 0),
        h_translate=True,
        v_translate=True,
        exclusive=True,
        monotone=True,
        rigid=True,
    )
    return GroundTruth(rule=rule, rng_seed=seed)


class NoisyOracle:
    """Flips each truthful answer with probability `flip_p`; for robustness
    experiments only, never part of acceptance."""

    def __init__(self, gt: GroundTruth, flip_p: float, seed: int = 0):
        self.gt = gt
        self.flip_p = flip_p
        self._rng = random.Random(f"noise:{seed}")

    def __call__(self, q: Question) -> bool:
        truthful = answer(self.gt, q)
        if self._rng.random() < self.flip_p:
            return not truthful
        return truthful


def teach_with_oracle(
    gt: GroundTruth, config: AblationConfig | None = None, budget: int = 15
) -> tuple[WinRule, list[dict]]:
    """Closed teaching loop: oracle demonstrates, learner asks, oracle answers."""
    board, winner = demonstrate(gt)
    return teach(board, winner, lambda q: answer(gt, q), config=config, budget=budget)

import random

import pytest
from hypothesis import settings

from winteach.board import Board, PlayerId

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")


def random_playout(seed, plies=None) -> Board:
    """Gravity-consistent board from a seeded random play prefix."""
    rng = random.Random(seed)
    if plies is None:
        plies = rng.randint(1, 42)
    board = Board.empty()
    player = PlayerId.P1
    for _ in range(plies):
        legal = board.legal_actions()
        if not legal:
            break
        board = board.apply_action(player, rng.choice(legal))
        player = player.opponent
    return board


@pytest.fixture
def fig_demo_board() -> Board:
    """Column-win demonstration: four P1 chips stacked in column 5."""
    board = Board.empty()
    for _ in range(4):
        board = board.apply_action(PlayerId.P1, 5)
    return board

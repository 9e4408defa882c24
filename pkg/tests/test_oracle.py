import pytest

from winteach.board import Board, PlayerId
from winteach.learner import Question, QuestionCategory
from winteach.oracle import (
    GroundTruth,
    NoisyOracle,
    answer,
    demonstrate,
    demonstrate_at,
    random_pattern,
    teach_with_oracle,
)
from winteach.win_rule import RelPattern, WinRule, canonical_rules, equivalent

P1, P2 = PlayerId.P1, PlayerId.P2
COLUMN_RULE = canonical_rules()[0]


def question_with(board: Board) -> Question:
    return Question(
        id=0,
        category=QuestionCategory.P1_COUNT,
        dimension="remove_one",
        hypothetical=board,
        prompt="Is this a win for yellow?",
        winner=P1,
    )


def test_demonstrate_column_rule_at_anchor_five(fig_demo_board):
    board, winner = demonstrate_at(COLUMN_RULE, (5, 0))
    assert winner is P1
    assert board == fig_demo_board


def test_demonstrate_floating_pattern_builds_supports():
    pattern = RelPattern(frozenset({(0, 0), (1, 0), (2, 0)}))
    rule = WinRule(pattern, (0, 0), True, True, True, True, True)
    board, winner = demonstrate_at(rule, (2, 2))
    assert board.cells_of(P1) == frozenset({(2, 2), (3, 2), (4, 2)})
    assert board.chip_count(P2) == 6
    assert rule.detect(board, winner)


def test_demonstrate_single_cell_needs_no_support():
    rule = WinRule(RelPattern(frozenset({(0, 0)})), (0, 0), True, True, True, True, True)
    board, _ = demonstrate_at(rule, (0, 0))
    assert board.chip_count(P1) == 1 and board.chip_count(P2) == 0


def test_demonstrate_is_seeded_and_valid():
    for seed in range(30):
        gt = random_pattern(seed)
        board_a, winner = demonstrate(gt)
        board_b, _ = demonstrate(gt)
        assert board_a == board_b
        assert gt.rule.detect(board_a, winner)


def test_demonstrate_respects_pinned_anchor():
    rule = WinRule(
        RelPattern(frozenset({(0, 0), (0, 1)})),
        anchor0=(4, 2),
        h_translate=False,
        v_translate=False,
        exclusive=True,
        monotone=True,
        rigid=True,
    )
    board, winner = demonstrate(GroundTruth(rule=rule, rng_seed=1))
    assert rule.detect(board, winner)


def test_answer_rejects_changed_action_board():
    # one winner action changed from column 5 to column 3
    board = Board.empty()
    for col in (5, 5, 5, 3):
        board = board.apply_action(P1, col)
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    assert answer(gt, question_with(board)) is False


def test_answer_accepts_translated_column(fig_demo_board):
    board = Board.empty()
    for _ in range(4):
        board = board.apply_action(P1, 6)
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    assert answer(gt, question_with(board)) is True


def test_answer_accepts_own_demonstration():
    for seed in range(10):
        gt = random_pattern(seed)
        board, _ = demonstrate(gt)
        assert answer(gt, question_with(board)) is True


def test_answer_agrees_with_detect_on_any_board():
    gt = random_pattern(17)
    from conftest import random_playout

    for seed in range(50):
        board = random_playout(seed)
        assert answer(gt, question_with(board)) == gt.rule.detect(board, P1)


def test_random_pattern_deterministic():
    assert random_pattern(9).rule == random_pattern(9).rule


def test_random_pattern_respects_bounds():
    for seed in range(50):
        gt = random_pattern(seed, min_cells=1, max_cells=10)
        assert 1 <= gt.rule.pattern.size <= 10
        assert gt.rule.pattern.max_dc < 7 and gt.rule.pattern.max_dr < 6


def test_random_pattern_rejects_bad_bounds():
    with pytest.raises(ValueError):
        random_pattern(0, min_cells=0, max_cells=3)
    with pytest.raises(ValueError):
        random_pattern(0, min_cells=4, max_cells=11)


def test_fifty_seeds_give_fifty_patterns():
    patterns = [random_pattern(seed).rule.pattern for seed in range(50)]
    assert len(patterns) == 50


def test_closed_loop_learns_equivalent_rules():
    for seed in range(20):
        gt = random_pattern(seed, min_cells=1, max_cells=6)
        learned, _ = teach_with_oracle(gt)
        assert equivalent(learned, gt.rule, budget=400, seed=seed), gt.rule.pattern.sorted_cells


def test_noisy_oracle_flips_answers():
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    board, _ = demonstrate(gt)
    q = question_with(board)
    truthful = answer(gt, q)
    noisy = NoisyOracle(gt, flip_p=1.0, seed=4)
    assert noisy(q) is (not truthful)
    honest = NoisyOracle(gt, flip_p=0.0, seed=4)
    assert honest(q) is truthful

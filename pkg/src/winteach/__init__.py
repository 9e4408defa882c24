"""Learn Connect-Four-style win conditions from a single demonstration plus
a short yes/no question session, then detect them and play with minimax."""

from .board import Board, ColumnFull, InvalidBoard, PlayerId
from .game_tree import Branch, GameSkeleton, Move, branch_from_demo, to_board
from .learner import (
    AblationConfig,
    Hypothesis,
    Question,
    QuestionCategory,
    finalize,
    ingest_answer,
    ingest_demonstration,
    init_session,
    next_question,
    teach,
)
from .oracle import GroundTruth, demonstrate, random_pattern, teach_with_oracle
from .win_rule import RelPattern, WinRule, canonical_rules, equivalent, rule_id

__version__ = "0.1.0"

__all__ = [
    "AblationConfig",
    "Board",
    "Branch",
    "ColumnFull",
    "GameSkeleton",
    "GroundTruth",
    "Hypothesis",
    "InvalidBoard",
    "Move",
    "PlayerId",
    "Question",
    "QuestionCategory",
    "RelPattern",
    "WinRule",
    "branch_from_demo",
    "canonical_rules",
    "demonstrate",
    "equivalent",
    "finalize",
    "ingest_answer",
    "ingest_demonstration",
    "init_session",
    "next_question",
    "random_pattern",
    "rule_id",
    "teach",
    "teach_with_oracle",
    "to_board",
]

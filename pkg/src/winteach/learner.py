"""Active learning of a win condition from one demonstration.

The session ingests a demonstrated board, then walks a fixed general-to-
specific question order, showing the teacher one hypothetical board at a
time and asking "Is this a win?". Each question probes one generalization
dimension; each answer pins that dimension down. Categories, in order:

- winner's chip count: remove-one, add-superset
- winner's placement: perturb-one, translate-all
- opponent actions: collide-in-pattern, opponent-elsewhere, plus two
  clarifiers scheduled when the collide question is answered No
- either player's filler actions: beneath, elsewhere, interposed

Every hypothetical is built by manipulating the demonstration's branch and
replaying it onto a board. Dimensions whose question cannot be constructed
for a given pattern (or that fall to an ablation or the question budget)
stay unresolved and finalize to the most conservative expressible value.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from .board import Board, PlayerId, COLS, ROWS
from .game_tree import (
    Branch,
    GameSkeleton,
    GameTreeError,
    add_action,
    branch_from_demo,
    prepend_filler_layer,
    remove_action,
    to_board,
    translate,
)
from .win_rule import RelPattern, WinRule


class LearnerError(Exception):
    """Base class for teaching-session failures."""


class UnsupportedSkeleton(LearnerError):
    """Only two-player strictly alternating games are supported."""


class EmptyDemonstration(LearnerError):
    """The demonstrated board holds no chip for the claimed winner."""


class BudgetExhausted(LearnerError):
    """The question budget ran out with dimensions still unresolved."""


class StaleQuestion(LearnerError):
    """The answered question does not match the session's current state."""


class QuestionCategory(str, enum.Enum):
    P1_COUNT = "p1_count"
    P1_TRANSLATE = "p1_translate"
    P2_ACTIONS = "p2_actions"
    EITHER_ACTIONS = "either_actions"


# Question dimensions, one per hypothetical construction.
REMOVE_ONE = "remove_one"
ADD_SUPERSET = "add_superset"
PERTURB_ONE = "perturb_one"
TRANSLATE_ALL = "translate_all"
COLLIDE_IN_PATTERN = "collide_in_pattern"
OPPONENT_ELSEWHERE = "opponent_elsewhere"
COLLIDE_CONFIRM = "collide_confirm"
OPPONENT_ON_TOP = "opponent_on_top"
FILLER_BENEATH = "filler_beneath"
FILLER_ELSEWHERE = "filler_elsewhere"
FILLER_INTERPOSED = "filler_interposed"

ORDER: tuple[tuple[QuestionCategory, str], ...] = (
    (QuestionCategory.P1_COUNT, REMOVE_ONE),
    (QuestionCategory.P1_COUNT, ADD_SUPERSET),
    (QuestionCategory.P1_TRANSLATE, PERTURB_ONE),
    (QuestionCategory.P1_TRANSLATE, TRANSLATE_ALL),
    (QuestionCategory.P2_ACTIONS, COLLIDE_IN_PATTERN),
    (QuestionCategory.P2_ACTIONS, OPPONENT_ELSEWHERE),
    (QuestionCategory.P2_ACTIONS, COLLIDE_CONFIRM),
    (QuestionCategory.P2_ACTIONS, OPPONENT_ON_TOP),
    (QuestionCategory.EITHER_ACTIONS, FILLER_BENEATH),
    (QuestionCategory.EITHER_ACTIONS, FILLER_ELSEWHERE),
    (QuestionCategory.EITHER_ACTIONS, FILLER_INTERPOSED),
)

# Dimensions that pin a rule flag: flag name and its value on a Yes answer.
# The interposed filler resolves rigidity because its construction preserves
# per-column counts: it is the one board that separates geometric matching
# from count matching. The remaining dimensions are confirmations; their
# answers are recorded but the finalized rule carries no extra field.
_DIM_FLAG: dict[str, tuple[str, bool]] = {
    ADD_SUPERSET: ("monotone", True),
    TRANSLATE_ALL: ("h_translate", True),
    COLLIDE_IN_PATTERN: ("exclusive", False),
    FILLER_BENEATH: ("v_translate", True),
    FILLER_INTERPOSED: ("rigid", False),
}

_CLARIFIERS = frozenset({COLLIDE_CONFIRM, OPPONENT_ON_TOP})

_FLAG_NAMES = ("h_translate", "v_translate", "exclusive", "monotone", "rigid")

# Dimensions never asked because the teacher was unavailable (budget ran out,
# or no informative board could be built) stay at the narrowest value the
# demonstration itself witnessed.
_CIRCUMSTANCE_DEFAULTS = {
    "h_translate": False,
    "v_translate": False,
    "exclusive": True,
    "monotone": False,
    "rigid": True,
}


@dataclass(frozen=True)
class Question:
    id: int
    category: QuestionCategory
    dimension: str
    hypothetical: Board
    prompt: str
    winner: PlayerId


@dataclass(frozen=True)
class AblationConfig:
    enabled: frozenset[QuestionCategory]

    @classmethod
    def all_enabled(cls) -> "AblationConfig":
        return cls(frozenset(QuestionCategory))

    @classmethod
    def without(cls, category: QuestionCategory) -> "AblationConfig":
        return cls(frozenset(QuestionCategory) - {category})


@dataclass(frozen=True)
class Hypothesis:
    skeleton: GameSkeleton
    winner: PlayerId
    demo_board: Board
    demo_branch: Branch
    pattern: RelPattern
    anchor0: tuple[int, int]
    config: "AblationConfig"
    resolved: dict[str, bool] = field(default_factory=dict)
    records: dict[str, bool] = field(default_factory=dict)
    asked: int = 0
    budget: int = 15
    collide_no: bool = False


def init_session(num_players_answer: int, alternating_answer: bool) -> GameSkeleton:
    """Build the game skeleton from the two pre-win questions."""
    if num_players_answer != 2 or not alternating_answer:
        raise UnsupportedSkeleton(
            f"need 2 alternating players, got {num_players_answer}, alternating={alternating_answer}"
        )
    return GameSkeleton()


def ingest_demonstration(
    skeleton: GameSkeleton,
    board: Board,
    winner: PlayerId,
    budget: int = 15,
    config: "AblationConfig | None" = None,
) -> Hypothesis:
    cells = board.cells_of(winner)
    if not cells:
        raise EmptyDemonstration(f"{winner.name} has no chip on the demonstrated board")
    pattern, anchor0 = RelPattern.normalize(cells)
    resolved: dict[str, bool] = {}
    # Geometry already saturates the board in these directions: nothing to ask.
    if pattern.max_dc == COLS - 1:
        resolved["h_translate"] = False
    if pattern.max_dr == ROWS - 1:
        resolved["v_translate"] = False
    return Hypothesis(
        skeleton=skeleton,
        winner=winner,
        demo_board=board,
        demo_branch=branch_from_demo(board, winner, skeleton),
        pattern=pattern,
        anchor0=anchor0,
        config=config or AblationConfig.all_enabled(),
        resolved=resolved,
        budget=budget,
    )


# -- hypothetical board construction -----------------------------------------

def _probe_rule(h: Hypothesis) -> WinRule:
    # Fully generalized version of the demo pattern: subtractive questions
    # must show boards this rule rejects, or the question proves nothing.
    return WinRule(
        pattern=h.pattern,
        anchor0=h.anchor0,
        h_translate=True,
        v_translate=True,
        exclusive=True,
        monotone=True,
        rigid=True,
    )


def _anchored_cells(h: Hypothesis) -> frozenset[tuple[int, int]]:
    ac, ar = h.anchor0
    return frozenset((ac + dc, ar + dr) for dc, dr in h.pattern.cells)


def _pattern_cols(h: Hypothesis) -> tuple[int, ...]:
    return tuple(sorted({c for c, _ in _anchored_cells(h)}))


def _append(branch: Branch, player: PlayerId, action: int) -> Branch:
    pos = len(branch.moves)
    if branch.skeleton.player_at(pos) is not player:
        pos += 1
    return add_action(branch, action, player, pos)


def _last_action(h: Hypothesis) -> int:
    for m in reversed(h.demo_branch.moves):
        if m.player is h.winner and m.is_known:
            return m.action
    raise AssertionError("demonstration branch lost the winner's moves")


def _build_remove_one(h: Hypothesis) -> Board | None:
    return to_board(remove_action(h.demo_branch, _last_action(h), h.winner))


def _build_add_superset(h: Hypothesis) -> Board | None:
    pattern_cols = set(_pattern_cols(h))
    candidates = [c for c in range(COLS) if c not in pattern_cols]
    candidates += [c for c in range(COLS) if c in pattern_cols]
    for c in candidates:
        if h.demo_board.heights[c] >= ROWS:
            continue
        try:
            return to_board(_append(h.demo_branch, h.winner, c))
        except GameTreeError:
            continue
    return None


def _build_perturb_one(h: Hypothesis) -> Board | None:
    last = _last_action(h)
    probe = _probe_rule(h)
    base = (h.anchor0[0] + 3) % COLS
    targets: list[int] = []
    for delta in range(COLS):
        for t in (base + delta, base - delta):
            if 0 <= t < COLS and t != last and t not in targets:
                targets.append(t)
    removed = remove_action(h.demo_branch, last, h.winner)
    for t in targets:
        try:
            board = to_board(_append(removed, h.winner, t))
        except GameTreeError:
            continue
        if board != h.demo_board and not probe.detect(board, h.winner):
            return board
    return None


def _build_translate_all(h: Hypothesis) -> Board | None:
    # Support chips shift along with the winner's moves: the question asks
    # whether the pattern may sit at other columns, so it must arrive intact.
    right = (COLS - 1 - h.pattern.max_dc) - h.anchor0[0]
    offsets = [off for off in (right, -h.anchor0[0]) if off != 0]
    for off in offsets:
        try:
            branch = translate(h.demo_branch, h.winner, off)
            branch = translate(branch, h.winner.opponent, off)
            return to_board(branch)
        except GameTreeError:
            continue
    return None


def _collide_candidates(h: Hypothesis, limit: int) -> list[Board]:
    """Boards where an opponent chip sits on a demonstrated pattern cell.

    Inserting an opponent move below the winner's chips shifts the column
    upward, so some pattern cell ends up opponent-held while staying
    occupied; the probe check rejects boards where the displaced winner
    chips accidentally re-form the pattern elsewhere.
    """
    probe = _probe_rule(h)
    anchored = _anchored_cells(h)
    opp = h.winner.opponent
    boards: list[Board] = []
    for s in range(len(h.demo_branch.moves)):
        if h.skeleton.player_at(s) is not opp:
            continue
        for c in _pattern_cols(h):
            try:
                board = to_board(add_action(h.demo_branch, c, opp, s))
            except GameTreeError:
                continue
            if board == h.demo_board or board in boards:
                continue
            cells = {(col, row): board.cell(col, row) for col, row in anchored}
            if any(v == 0 for v in cells.values()):
                continue
            if not any(v == int(opp) for v in cells.values()):
                continue
            if probe.detect(board, h.winner):
                continue
            boards.append(board)
            if len(boards) >= limit:
                return boards
    return boards


def _build_collide(h: Hypothesis) -> Board | None:
    boards = _collide_candidates(h, 1)
    return boards[0] if boards else None


def _build_collide_confirm(h: Hypothesis) -> Board | None:
    boards = _collide_candidates(h, 2)
    return boards[1] if len(boards) > 1 else None


def _build_opp_elsewhere(h: Hypothesis) -> Board | None:
    pattern_cols = set(_pattern_cols(h))
    anchored = _anchored_cells(h)
    opp = h.winner.opponent
    candidates = [c for c in range(COLS) if c not in pattern_cols]
    candidates += [c for c in range(COLS) if c in pattern_cols]
    for c in candidates:
        if h.demo_board.heights[c] >= ROWS or (c, h.demo_board.heights[c]) in anchored:
            continue
        try:
            return to_board(_append(h.demo_branch, opp, c))
        except GameTreeError:
            continue
    return None


def _build_on_top(h: Hypothesis) -> Board | None:
    anchored = _anchored_cells(h)
    opp = h.winner.opponent
    for c in _pattern_cols(h):
        if h.demo_board.heights[c] >= ROWS or (c, h.demo_board.heights[c]) in anchored:
            continue
        try:
            return to_board(_append(h.demo_branch, opp, c))
        except GameTreeError:
            continue
    return None


def _build_filler_beneath(h: Hypothesis) -> Board | None:
    cols = tuple(c for c in range(COLS) if h.demo_board.heights[c] > 0)
    try:
        return to_board(prepend_filler_layer(h.demo_branch, cols, h.winner.opponent))
    except GameTreeError:
        return None


def _build_filler_elsewhere(h: Hypothesis) -> Board | None:
    pattern_cols = set(_pattern_cols(h))
    anchored = _anchored_cells(h)
    opp = h.winner.opponent
    candidates = [c for c in range(COLS) if c not in pattern_cols]
    candidates += [c for c in range(COLS) if c in pattern_cols]
    for c in candidates:
        height = h.demo_board.heights[c]
        if height + 2 > ROWS:
            continue
        if (c, height) in anchored or (c, height + 1) in anchored:
            continue
        try:
            branch = _append(h.demo_branch, opp, c)
            return to_board(_append(branch, h.winner, c))
        except GameTreeError:
            continue
    return None


def _build_interposed(h: Hypothesis) -> Board | None:
    if h.pattern.size < 2:
        return None
    probe = _probe_rule(h)
    cols = _pattern_cols(h)
    opp = h.winner.opponent
    if len(cols) >= 2:
        # Lift a single pattern column: per-column counts survive, the
        # relative geometry does not.
        for c in cols:
            try:
                board = to_board(prepend_filler_layer(h.demo_branch, (c,), opp))
            except GameTreeError:
                continue
            if board != h.demo_board and not probe.detect(board, h.winner):
                return board
        return None
    # Single-column pattern: split it between the last two winner chips.
    c = cols[0]
    winner_slots = [
        i
        for i, m in enumerate(h.demo_branch.moves)
        if m.player is h.winner and m.action == c
    ]
    if len(winner_slots) < 2:
        return None
    for j in reversed(winner_slots[1:]):
        try:
            board = to_board(add_action(h.demo_branch, c, opp, j - 1))
        except GameTreeError:
            continue
        if board != h.demo_board and not probe.detect(board, h.winner):
            return board
    return None


_BUILDERS: dict[str, Callable[[Hypothesis], Board | None]] = {
    REMOVE_ONE: _build_remove_one,
    ADD_SUPERSET: _build_add_superset,
    PERTURB_ONE: _build_perturb_one,
    TRANSLATE_ALL: _build_translate_all,
    COLLIDE_IN_PATTERN: _build_collide,
    OPPONENT_ELSEWHERE: _build_opp_elsewhere,
    COLLIDE_CONFIRM: _build_collide_confirm,
    OPPONENT_ON_TOP: _build_on_top,
    FILLER_BENEATH: _build_filler_beneath,
    FILLER_ELSEWHERE: _build_filler_elsewhere,
    FILLER_INTERPOSED: _build_interposed,
}


# -- the question/answer loop -------------------------------------------------

def next_question(h: Hypothesis, config: AblationConfig | None = None) -> Question | None:
    """The next unresolved question in protocol order, or None when done."""
    config = config or h.config
    for category, dim in ORDER:
        if category not in config.enabled:
            continue
        if dim in h.records:
            continue
        flag = _DIM_FLAG.get(dim)
        if flag is not None and flag[0] in h.resolved:
            continue
        if dim in _CLARIFIERS and not h.collide_no:
            continue
        board = _BUILDERS[dim](h)
        if board is None:
            continue
        if h.asked >= h.budget:
            raise BudgetExhausted(f"{h.asked} questions asked, budget {h.budget}")
        return Question(
            id=h.asked,
            category=category,
            dimension=dim,
            hypothetical=board,
            prompt=f"Is this a win for {h.winner.color}?",
            winner=h.winner,
        )
    return None


def ingest_answer(h: Hypothesis, q: Question, answer: bool) -> Hypothesis:
    if q.id != h.asked or q.dimension in h.records:
        raise StaleQuestion(f"question {q.id} ({q.dimension}) is not the pending one")
    records = dict(h.records)
    records[q.dimension] = bool(answer)
    resolved = dict(h.resolved)
    flag = _DIM_FLAG.get(q.dimension)
    if flag is not None and flag[0] not in resolved:
        name, yes_value = flag
        resolved[name] = yes_value if answer else not yes_value
    return replace(
        h,
        records=records,
        resolved=resolved,
        asked=h.asked + 1,
        collide_no=h.collide_no or (q.dimension == COLLIDE_IN_PATTERN and not answer),
    )


def _first_witnessed_cell(h: Hypothesis) -> tuple[int, int]:
    """Landing cell of the winner's first demonstrated move."""
    board = Board.empty()
    for m in h.demo_branch.moves:
        if not m.is_known:
            continue
        board = board.apply_action(m.player, m.action)
        if m.player is h.winner:
            return (m.action, board.heights[m.action] - 1)
    raise AssertionError("demonstration branch lost the winner's moves")


def finalize(h: Hypothesis) -> WinRule:
    """Assemble the rule from the resolved dimensions.

    Dimensions the protocol never got to (budget ran out, or no informative
    board could be built) keep the narrowest value the demonstration itself
    witnessed. Dimensions belonging to a disabled question category degrade
    instead by facet: with the winner-side categories silenced the rule
    cannot bind the winner's required contribution and collapses to the
    first witnessed chip; with the opponent category silenced it cannot
    exclude opponent chips from pattern cells; with the filler category
    silenced neither elevation nor internal geometry was ever confirmed, so
    matching falls back to anchored per-column counts.
    """
    flags = dict(h.resolved)
    pattern, anchor0 = h.pattern, h.anchor0
    disabled = set(QuestionCategory) - h.config.enabled

    def fill(values: dict[str, bool]) -> None:
        for name, value in values.items():
            flags.setdefault(name, value)

    if QuestionCategory.P1_COUNT in disabled or QuestionCategory.P1_TRANSLATE in disabled:
        pattern = RelPattern(frozenset({(0, 0)}))
        anchor0 = _first_witnessed_cell(h)
        fill({"monotone": True, "h_translate": True, "v_translate": True, "rigid": True})
    if QuestionCategory.P2_ACTIONS in disabled:
        fill({"exclusive": False})
    if QuestionCategory.EITHER_ACTIONS in disabled:
        fill({"v_translate": False, "rigid": False})
    fill(_CIRCUMSTANCE_DEFAULTS)
    return WinRule(
        pattern=pattern, anchor0=anchor0, **{name: flags[name] for name in _FLAG_NAMES}
    )


def teach(
    board: Board,
    winner: PlayerId,
    answer_fn: Callable[[Question], bool],
    config: AblationConfig | None = None,
    budget: int = 15,
    skeleton: GameSkeleton | None = None,
) -> tuple[WinRule, list[dict]]:
    """Run a full teaching session; returns the rule and its transcript."""
    config = config or AblationConfig.all_enabled()
    skeleton = skeleton or init_session(2, True)
    h = ingest_demonstration(skeleton, board, winner, budget=budget, config=config)
    events: list[dict] = [
        {
            "event": "demo",
            "board": board.to_cells(),
            "winner": int(winner),
            "budget": budget,
            "enabled": sorted(c.value for c in config.enabled),
        }
    ]
    while True:
        try:
            q = next_question(h, config)
        except BudgetExhausted:
            break
        if q is None:
            break
        answer = bool(answer_fn(q))
        events.append(
            {
                "event": "question",
                "id": q.id,
                "category": q.category.value,
                "dimension": q.dimension,
                "board": q.hypothetical.to_cells(),
                "prompt": q.prompt,
            }
        )
        events.append({"event": "answer", "id": q.id, "value": answer})
        h = ingest_answer(h, q, answer)
    rule = finalize(h)
    events.append({"event": "final_rule", "rule": rule.to_json()})
    return rule, events


# -- transcripts ---------------------------------------------------------------

def write_transcript(events: Iterable[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


def read_transcript(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def replay_transcript(events: list[dict]) -> WinRule:
    """Re-run a recorded session, checking every generated question against
    the recording; returns the finalized rule."""
    demo = events[0]
    assert demo["event"] == "demo"
    config = AblationConfig(
        frozenset(QuestionCategory(v) for v in demo.get("enabled", []))
        or frozenset(QuestionCategory)
    )
    answers = {e["id"]: e["value"] for e in events if e["event"] == "answer"}
    recorded = {e["id"]: e for e in events if e["event"] == "question"}
    h = ingest_demonstration(
        GameSkeleton(),
        Board.from_cells(demo["board"]),
        PlayerId(demo["winner"]),
        budget=demo.get("budget", 15),
        config=config,
    )
    while True:
        try:
            q = next_question(h, config)
        except BudgetExhausted:
            break
        if q is None:
            break
        rec = recorded.get(q.id)
        if rec is None or rec["dimension"] != q.dimension or rec["board"] != q.hypothetical.to_cells():
            raise StaleQuestion(f"transcript diverges at question {q.id}")
        h = ingest_answer(h, q, answers[q.id])
    return finalize(h)

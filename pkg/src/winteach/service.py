"""HTTP API for teaching and play sessions, plus flat-file rule persistence.

Perspective contract: every board, column index, and cell coordinate that
crosses this API is in the human (mirrored) frame. The engine works in its
canonical frame; this module applies the mirror exactly once in each
direction at the boundary.

Session state lives in memory with transcript journaling to disk; finished
rules persist as content-addressed JSON files and survive restarts.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import learner
from .agent import AgentConfig, Policy, choose_move
from .board import Board, COLS, InvalidBoard, PlayerId
from .learner import AblationConfig, Hypothesis, Question
from .win_rule import WinRule, rule_id as compute_rule_id


class ServiceError(Exception):
    status_code = 400


class WrongState(ServiceError):
    status_code = 409


class StaleQuestionError(ServiceError):
    status_code = 409


class UnknownSession(ServiceError):
    status_code = 404


class UnknownRule(ServiceError):
    status_code = 404


class IllegalColumn(ServiceError):
    status_code = 400


class NotYourTurn(ServiceError):
    status_code = 409


class RuleStore:
    """Directory of WinRule JSON files keyed by content hash."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def save(self, rule: WinRule) -> str:
        rid = compute_rule_id(rule)
        path = self.root / f"{rid}.json"
        with self._lock:
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_bytes(rule.canonical_bytes())
                tmp.replace(path)
        return rid

    def load(self, rid: str) -> WinRule:
        path = self.root / f"{rid}.json"
        if not path.is_file():
            raise UnknownRule(f"no rule {rid!r}")
        import json

        return WinRule.from_json(json.loads(path.read_text()))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))


@dataclass
class TeachingSession:
    id: str
    budget: int
    state: str = "awaiting_demo"  # awaiting_demo | awaiting_answer | done
    hypothesis: Hypothesis | None = None
    question: Question | None = None
    rule_id: str | None = None
    rule: WinRule | None = None
    events: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class PlaySession:
    id: str
    board: Board
    human: PlayerId
    rule_human: WinRule
    rule_agent: WinRule
    agent_cfg: AgentConfig
    status: str = "in_progress"  # in_progress | won | draw
    winner: str | None = None  # "human" | "agent"
    winning_cells: tuple | None = None
    last_agent_column: int | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _mirror_cells_payload(board: Board) -> list[list[int]]:
    return board.mirror().to_cells()


def _mirror_coords(cells) -> list[list[int]]:
    return [[COLS - 1 - c, r] for c, r in cells]


class TeachCreate(BaseModel):
    num_players: int = 2
    alternating: bool = True
    budget: int = Field(default=15, ge=1)


class DemoSubmit(BaseModel):
    board: dict
    winner: int = 1


class AnswerSubmit(BaseModel):
    question_id: int
    answer: bool


class PlayCreate(BaseModel):
    rule_id: str
    human_first: bool = True
    depth: int = Field(default=2, ge=1)
    agent_seed: int = 0
    agent_rule_id: str | None = None


class MoveSubmit(BaseModel):
    column: int


def create_app(
    rules_dir: Path | str = "rules",
    transcripts_dir: Path | str | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="winteach")
    store = RuleStore(Path(rules_dir))
    transcripts = Path(transcripts_dir) if transcripts_dir else None
    if transcripts:
        transcripts.mkdir(parents=True, exist_ok=True)
    teaching: dict[str, TeachingSession] = {}
    playing: dict[str, PlaySession] = {}

    @app.exception_handler(ServiceError)
    async def _service_error(_: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(learner.LearnerError)
    async def _learner_error(_: Request, exc: learner.LearnerError):
        code = 409 if isinstance(exc, learner.StaleQuestion) else 400
        return JSONResponse(
            status_code=code,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(InvalidBoard)
    async def _board_error(_: Request, exc: InvalidBoard):
        return JSONResponse(
            status_code=400, content={"error": "InvalidBoard", "detail": str(exc)}
        )

    def _teaching(session_id: str) -> TeachingSession:
        try:
            return teaching[session_id]
        except KeyError:
            raise UnknownSession(f"no teaching session {session_id!r}") from None

    def _playing(session_id: str) -> PlaySession:
        try:
            return playing[session_id]
        except KeyError:
            raise UnknownSession(f"no play session {session_id!r}") from None

    def _question_payload(s: TeachingSession) -> dict:
        q = s.question
        return {
            "id": q.id,
            "category": q.category.value,
            "dimension": q.dimension,
            "prompt": q.prompt,
            "board": {"cells": _mirror_cells_payload(q.hypothetical)},
            "asked": s.hypothesis.asked,
            "budget": s.budget,
        }

    def _teach_state(s: TeachingSession) -> dict:
        out = {"session_id": s.id, "state": s.state, "budget": s.budget}
        if s.state == "awaiting_answer":
            out["question"] = _question_payload(s)
        if s.state == "done":
            out["rule_id"] = s.rule_id
            out["rule"] = s.rule.to_json()
            out["questions_used"] = s.hypothesis.asked if s.hypothesis else 0
        return out

    def _advance(s: TeachingSession) -> None:
        """Move to the next question or finalize the rule."""
        try:
            q = learner.next_question(s.hypothesis)
        except learner.BudgetExhausted:
            q = None
        if q is not None:
            s.question = q
            s.state = "awaiting_answer"
            s.events.append(
                {
                    "event": "question",
                    "id": q.id,
                    "category": q.category.value,
                    "dimension": q.dimension,
                    "board": q.hypothetical.to_cells(),
                    "prompt": q.prompt,
                }
            )
            return
        s.rule = learner.finalize(s.hypothesis)
        s.rule_id = store.save(s.rule)
        s.question = None
        s.state = "done"
        s.events.append({"event": "final_rule", "rule": s.rule.to_json()})
        if transcripts:
            learner.write_transcript(s.events, transcripts / f"{s.id}.jsonl")

    @app.post("/teach")
    def create_teaching_session(body: TeachCreate):
        learner.init_session(body.num_players, body.alternating)  # validates
        sid = uuid.uuid4().hex[:12]
        teaching[sid] = TeachingSession(id=sid, budget=body.budget)
        return {"session_id": sid, "state": "awaiting_demo", "budget": body.budget}

    @app.post("/teach/{session_id}/demo")
    def submit_demonstration(session_id: str, body: DemoSubmit):
        s = _teaching(session_id)
        with s.lock:
            if s.state != "awaiting_demo":
                raise WrongState(f"session is {s.state}")
            board = Board.from_json(body.board).mirror()  # human -> canonical
            winner = PlayerId(body.winner)
            s.hypothesis = learner.ingest_demonstration(
                learner.init_session(2, True), board, winner, budget=s.budget
            )
            s.events.append(
                {
                    "event": "demo",
                    "board": board.to_cells(),
                    "winner": int(winner),
                    "budget": s.budget,
                    "enabled": sorted(c.value for c in s.hypothesis.config.enabled),
                }
            )
            _advance(s)
            return _teach_state(s)

    @app.post("/teach/{session_id}/answer")
    def submit_answer(session_id: str, body: AnswerSubmit):
        s = _teaching(session_id)
        with s.lock:
            if s.state != "awaiting_answer":
                raise WrongState(f"session is {s.state}")
            if s.question is None or body.question_id != s.question.id:
                raise StaleQuestionError(
                    f"question {body.question_id} is not the outstanding one"
                )
            s.events.append(
                {"event": "answer", "id": s.question.id, "value": bool(body.answer)}
            )
            s.hypothesis = learner.ingest_answer(s.hypothesis, s.question, body.answer)
            _advance(s)
            return _teach_state(s)

    @app.get("/teach/{session_id}")
    def get_teaching_session(session_id: str):
        return _teach_state(_teaching(session_id))

    @app.get("/rules")
    def list_rules():
        return {"rules": store.list_ids()}

    @app.get("/rules/{rid}")
    def get_rule(rid: str):
        return store.load(rid).to_json()

    def _play_state(s: PlaySession) -> dict:
        return {
            "session_id": s.id,
            "board": {"cells": _mirror_cells_payload(s.board)},
            "status": s.status,
            "winner": s.winner,
            "your_turn": s.status == "in_progress",
            "last_agent_column": (
                None if s.last_agent_column is None else COLS - 1 - s.last_agent_column
            ),
            "winning_cells": (
                None if s.winning_cells is None else _mirror_coords(s.winning_cells)
            ),
            "legal_columns": (
                sorted(COLS - 1 - c for c in s.board.legal_actions())
                if s.status == "in_progress"
                else []
            ),
        }

    def _check_end(s: PlaySession, mover: PlayerId) -> bool:
        """Detection pass after a move: mover's win first, then opponent's."""
        for p in (mover, mover.opponent):
            for rule in (s.rule_human, s.rule_agent):
                cells = rule.matched_cells(s.board, p)
                if cells is not None:
                    s.status = "won"
                    s.winner = "human" if p is s.human else "agent"
                    s.winning_cells = cells
                    return True
        if s.board.is_full():
            s.status = "draw"
            return True
        return False

    def _agent_move(s: PlaySession) -> None:
        agent = s.human.opponent
        col = choose_move(s.board, agent, s.rule_agent, s.rule_human, s.agent_cfg)
        s.board = s.board.apply_action(agent, col)
        s.last_agent_column = col
        _check_end(s, agent)

    @app.post("/play")
    def create_play_session(body: PlayCreate):
        rule = store.load(body.rule_id)
        agent_rule = store.load(body.agent_rule_id) if body.agent_rule_id else rule
        sid = uuid.uuid4().hex[:12]
        s = PlaySession(
            id=sid,
            board=Board.empty(),
            human=PlayerId.P1 if body.human_first else PlayerId.P2,
            rule_human=rule,
            rule_agent=agent_rule,
            agent_cfg=AgentConfig(
                policy=Policy.MINIMAX, depth=body.depth, seed=body.agent_seed
            ),
        )
        playing[sid] = s
        if not body.human_first:
            _agent_move(s)
        return _play_state(s)

    @app.post("/play/{session_id}/move")
    def submit_move(session_id: str, body: MoveSubmit):
        s = _playing(session_id)
        with s.lock:
            if s.status != "in_progress":
                raise WrongState(f"game is {s.status}")
            if not 0 <= body.column < COLS:
                raise IllegalColumn(f"column {body.column} outside 0-6")
            col = COLS - 1 - body.column  # human -> canonical
            if col not in s.board.legal_actions():
                raise IllegalColumn(f"column {body.column} is full")
            s.board = s.board.apply_action(s.human, col)
            if not _check_end(s, s.human):
                _agent_move(s)
            return _play_state(s)

    @app.get("/play/{session_id}")
    def get_play_session(session_id: str):
        return _play_state(_playing(session_id))

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app

import json

import pytest
from fastapi.testclient import TestClient

from winteach.board import Board, PlayerId
from winteach.learner import teach
from winteach.oracle import GroundTruth, answer as oracle_answer
from winteach.service import create_app
from winteach.win_rule import RelPattern, WinRule, canonical_rules, rule_id

P1, P2 = PlayerId.P1, PlayerId.P2
COLUMN_RULE = canonical_rules()[0]


@pytest.fixture
def api(tmp_path):
    app = create_app(rules_dir=tmp_path / "rules", transcripts_dir=tmp_path / "transcripts")
    with TestClient(app) as client:
        client.rules_dir = tmp_path / "rules"
        yield client


def human_cells(board: Board) -> dict:
    return {"cells": board.mirror().to_cells()}


def canonical_board(payload: dict) -> Board:
    return Board.from_cells(payload["cells"]).mirror()


def put_rule(api, rule: WinRule) -> str:
    rid = rule_id(rule)
    (api.rules_dir / f"{rid}.json").write_bytes(rule.canonical_bytes())
    return rid


def drive_teaching(api, demo: Board, gt: GroundTruth, budget: int = 15) -> dict:
    """Full teaching conversation through the API, oracle answering."""
    sid = api.post("/teach", json={"budget": budget}).json()["session_id"]
    state = api.post(
        f"/teach/{sid}/demo", json={"board": human_cells(demo), "winner": 1}
    ).json()
    while state["state"] == "awaiting_answer":
        q = state["question"]
        board = canonical_board(q["board"])
        value = gt.rule.detect(board, P1)
        state = api.post(
            f"/teach/{sid}/answer", json={"question_id": q["id"], "answer": value}
        ).json()
    state["session_id"] = sid
    return state


def test_create_teaching_session(api):
    body = api.post("/teach", json={}).json()
    assert body["state"] == "awaiting_demo"
    assert body["budget"] == 15


def test_create_rejects_unsupported_skeleton(api):
    resp = api.post("/teach", json={"num_players": 3})
    assert resp.status_code == 400
    assert resp.json()["error"] == "UnsupportedSkeleton"


def test_session_ids_are_distinct(api):
    a = api.post("/teach", json={}).json()["session_id"]
    b = api.post("/teach", json={}).json()["session_id"]
    assert a != b


def test_full_teaching_flow_matches_direct_run(api, fig_demo_board):
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    state = drive_teaching(api, fig_demo_board, gt)
    assert state["state"] == "done"
    assert state["questions_used"] == 11

    direct_rule, _ = teach(fig_demo_board, P1, lambda q: oracle_answer(gt, q))
    assert state["rule"] == direct_rule.to_json()
    stored = (api.rules_dir / f"{state['rule_id']}.json").read_bytes()
    assert stored == direct_rule.canonical_bytes()


def test_first_question_is_count_probe_in_human_view(api, fig_demo_board):
    sid = api.post("/teach", json={}).json()["session_id"]
    state = api.post(
        f"/teach/{sid}/demo", json={"board": human_cells(fig_demo_board), "winner": 1}
    ).json()
    q = state["question"]
    assert q["category"] == "p1_count"
    assert q["dimension"] == "remove_one"
    shown = Board.from_cells(q["board"]["cells"])
    # canonical column 5 renders at human column 1; three chips remain
    assert shown.cells_of(P1) == frozenset({(1, 0), (1, 1), (1, 2)})


def test_mirror_applied_exactly_once(api, fig_demo_board):
    sid = api.post("/teach", json={}).json()["session_id"]
    state = api.post(
        f"/teach/{sid}/demo", json={"board": human_cells(fig_demo_board), "winner": 1}
    ).json()
    board = canonical_board(state["question"]["board"])
    assert board.cells_of(P1) == frozenset({(5, 0), (5, 1), (5, 2)})


def test_demo_to_wrong_state_rejected(api, fig_demo_board):
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    state = drive_teaching(api, fig_demo_board, gt)
    resp = api.post(
        f"/teach/{state['session_id']}/demo",
        json={"board": human_cells(fig_demo_board), "winner": 1},
    )
    assert resp.status_code == 409
    assert resp.json()["error"] == "WrongState"


def test_invalid_board_rejected(api):
    sid = api.post("/teach", json={}).json()["session_id"]
    cells = [[0] * 7 for _ in range(6)]
    cells[3][2] = 1  # floating chip
    resp = api.post(f"/teach/{sid}/demo", json={"board": {"cells": cells}, "winner": 1})
    assert resp.status_code == 400
    assert resp.json()["error"] == "InvalidBoard"


def test_empty_demo_rejected(api):
    sid = api.post("/teach", json={}).json()["session_id"]
    resp = api.post(
        f"/teach/{sid}/demo",
        json={"board": {"cells": [[0] * 7 for _ in range(6)]}, "winner": 1},
    )
    assert resp.status_code == 400
    assert resp.json()["error"] == "EmptyDemonstration"


def test_stale_question_id_rejected(api, fig_demo_board):
    sid = api.post("/teach", json={}).json()["session_id"]
    api.post(f"/teach/{sid}/demo", json={"board": human_cells(fig_demo_board), "winner": 1})
    resp = api.post(f"/teach/{sid}/answer", json={"question_id": 99, "answer": True})
    assert resp.status_code == 409


def test_unknown_session_404(api):
    assert api.get("/teach/nope").status_code == 404
    assert api.post("/play", json={"rule_id": "nope"}).status_code == 404


def test_budget_exhaustion_returns_final_rule(api, fig_demo_board):
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    state = drive_teaching(api, fig_demo_board, gt, budget=3)
    assert state["state"] == "done"
    assert state["questions_used"] == 3
    assert state["rule"]["monotone"] is True
    assert state["rule"]["h_translate"] is False


def test_rules_listing_and_fetch(api, fig_demo_board):
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    state = drive_teaching(api, fig_demo_board, gt)
    rid = state["rule_id"]
    assert rid in api.get("/rules").json()["rules"]
    assert api.get(f"/rules/{rid}").json() == state["rule"]
    assert api.get("/rules/missing").status_code == 404


def one_cell_rule() -> WinRule:
    return WinRule(
        pattern=RelPattern(frozenset({(0, 0)})),
        anchor0=(0, 0),
        h_translate=True,
        v_translate=True,
        exclusive=True,
        monotone=True,
        rigid=True,
    )


def test_play_human_win_with_highlight(api):
    rid = put_rule(api, one_cell_rule())
    state = api.post("/play", json={"rule_id": rid, "human_first": True}).json()
    assert state["status"] == "in_progress"
    assert Board.from_cells(state["board"]["cells"]) == Board.empty()
    state = api.post(f"/play/{state['session_id']}/move", json={"column": 3}).json()
    assert state["status"] == "won"
    assert state["winner"] == "human"
    assert state["winning_cells"] == [[3, 0]]


def test_play_agent_first_wins_instantly(api):
    rid = put_rule(api, one_cell_rule())
    state = api.post("/play", json={"rule_id": rid, "human_first": False}).json()
    assert state["status"] == "won"
    assert state["winner"] == "agent"
    assert state["last_agent_column"] is not None


def test_play_move_into_full_column_rejected(api):
    tall = WinRule(
        pattern=RelPattern(frozenset((0, r) for r in range(6))),
        anchor0=(0, 0),
        h_translate=True,
        v_translate=True,
        exclusive=True,
        monotone=True,
        rigid=True,
    )
    rid = put_rule(api, tall)
    state = api.post("/play", json={"rule_id": rid, "human_first": True}).json()
    sid = state["session_id"]
    for _ in range(3):  # human + agent replies fill column 6 in pairs
        state = api.post(f"/play/{sid}/move", json={"column": 6}).json()
        if 6 not in state["legal_columns"]:
            break
    if state["status"] == "in_progress" and 6 not in state["legal_columns"]:
        resp = api.post(f"/play/{sid}/move", json={"column": 6})
        assert resp.status_code == 400
        assert resp.json()["error"] == "IllegalColumn"


def test_play_draw_by_column_copy(api):
    tall = WinRule(
        pattern=RelPattern(frozenset((0, r) for r in range(6))),
        anchor0=(0, 0),
        h_translate=True,
        v_translate=True,
        exclusive=True,
        monotone=True,
        rigid=True,
    )
    rid = put_rule(api, tall)
    state = api.post("/play", json={"rule_id": rid, "human_first": True}).json()
    sid = state["session_id"]
    column = 0
    for _ in range(21):
        state = api.post(f"/play/{sid}/move", json={"column": column}).json()
        if state["status"] != "in_progress":
            break
        column = state["last_agent_column"]
        if column not in state["legal_columns"]:
            column = state["legal_columns"][0]
    assert state["status"] == "draw"
    board = Board.from_cells(state["board"]["cells"])
    assert board.is_full()


def test_move_after_game_over_rejected(api):
    rid = put_rule(api, one_cell_rule())
    state = api.post("/play", json={"rule_id": rid, "human_first": True}).json()
    sid = state["session_id"]
    api.post(f"/play/{sid}/move", json={"column": 0})
    resp = api.post(f"/play/{sid}/move", json={"column": 1})
    assert resp.status_code == 409


def test_get_play_state(api):
    rid = put_rule(api, one_cell_rule())
    sid = api.post("/play", json={"rule_id": rid, "human_first": True}).json()["session_id"]
    state = api.get(f"/play/{sid}").json()
    assert state["status"] == "in_progress"
    assert state["legal_columns"] == list(range(7))


def test_transcript_journaled_on_completion(api, tmp_path, fig_demo_board):
    gt = GroundTruth(rule=COLUMN_RULE, rng_seed=0)
    state = drive_teaching(api, fig_demo_board, gt)
    path = tmp_path / "transcripts" / f"{state['session_id']}.jsonl"
    events = [json.loads(line) for line in path.read_text().splitlines()]
    assert events[0]["event"] == "demo"
    assert events[-1]["event"] == "final_rule"
    assert events[-1]["rule"] == state["rule"]

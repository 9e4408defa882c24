"""Experiment harness: variant recognition and question-type ablation.

Every game gets its own seed derived from the experiment seed, so results
are reproducible byte for byte and independent of execution order or worker
count. Scoring replays a fixed random move sequence and compares the ply at
which the learned rule first fires (for either player) against the ply at
which the ground-truth rule first fires. A game counts as correct only on
an exact match; firing early, late, or never is a miss, and draws (the
ground truth never fires) are excluded from the accuracy denominator.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import random
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

from .board import Board, PlayerId
from .learner import AblationConfig, QuestionCategory
from .oracle import GroundTruth, random_pattern, teach_with_oracle
from .win_rule import CANONICAL_NAMES, WinRule, canonical_rules

ABLATION_GROUPS: tuple[tuple[str, QuestionCategory], ...] = (
    ("p1_count", QuestionCategory.P1_COUNT),
    ("p1_translate", QuestionCategory.P1_TRANSLATE),
    ("p2_actions", QuestionCategory.P2_ACTIONS),
    ("either_actions", QuestionCategory.EITHER_ACTIONS),
)


def derive_seed(*parts) -> int:
    data = ":".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


def first_fire_plies(
    learned: WinRule, gt_rule: WinRule, seed: int
) -> tuple[int | None, int | None]:
    """(ground-truth first-detection ply, learned first-detection ply) over
    one seeded random-vs-random game played out to a full board."""
    rng = random.Random(seed)
    board = Board.empty()
    mover = PlayerId.P1
    gt_ply = learned_ply = None
    for ply in range(1, 43):
        board = board.apply_action(mover, rng.choice(board.legal_actions()))
        if learned_ply is None and (
            learned.detect(board, PlayerId.P1) or learned.detect(board, PlayerId.P2)
        ):
            learned_ply = ply
        if gt_ply is None and (
            gt_rule.detect(board, PlayerId.P1) or gt_rule.detect(board, PlayerId.P2)
        ):
            gt_ply = ply
        if gt_ply is not None and learned_ply is not None:
            break
        mover = mover.opponent
    return gt_ply, learned_ply


def _score_cell(learned: WinRule, gt_rule: WinRule, game_seeds: list[int], workers: int) -> dict:
    if workers > 1:
        with Pool(workers) as pool:
            plies = pool.starmap(
                first_fire_plies, [(learned, gt_rule, s) for s in game_seeds]
            )
    else:
        plies = [first_fire_plies(learned, gt_rule, s) for s in game_seeds]
    draws = hits = missed = false_fires = 0
    for gt_ply, learned_ply in plies:
        if gt_ply is None:
            draws += 1
            if learned_ply is not None:
                false_fires += 1
        elif learned_ply == gt_ply:
            hits += 1
        elif learned_ply is not None and learned_ply < gt_ply:
            false_fires += 1
        else:
            missed += 1
    non_draws = len(game_seeds) - draws
    return {
        "games": len(game_seeds),
        "draws": draws,
        "hits": hits,
        "missed": missed,
        "false_fires": false_fires,
        "accuracy": (hits / non_draws) if non_draws else None,
    }


@dataclass
class ExperimentReport:
    kind: str
    seed: int
    params: dict
    rows: list[dict] = field(default_factory=list)
    totals: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "params": self.params,
            "rows": self.rows,
            "totals": self.totals,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_json_obj(), sort_keys=True, indent=2) + "\n").encode()

    def to_csv(self) -> str:
        columns = [
            "condition",
            "disabled_group",
            "games",
            "draws",
            "hits",
            "missed",
            "false_fires",
            "accuracy",
            "questions",
        ]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            out = dict(row)
            acc = out.get("accuracy")
            out["accuracy"] = "" if acc is None else f"{acc:.4f}"
            writer.writerow({k: out.get(k, "") for k in columns})
        return buf.getvalue()

    def cell(self, condition: str, disabled_group: str) -> dict:
        for row in self.rows:
            if row["condition"] == condition and row["disabled_group"] == disabled_group:
                return row
        raise KeyError((condition, disabled_group))

    def summary(self) -> str:
        if self.kind == "ablation":
            groups = ["none"] + [name for name, _ in ABLATION_GROUPS]
            width = max(len(g) for g in groups) + 2
            head = "disabled group".ljust(width) + "".join(
                f"{c:>15}" for c in CANONICAL_NAMES
            )
            lines = [head]
            for g in groups:
                cells = []
                for cond in CANONICAL_NAMES:
                    acc = self.cell(cond, g)["accuracy"]
                    cells.append("     n/a" if acc is None else f"{100 * acc:7.2f}%")
                lines.append(g.ljust(width) + "".join(f"{c:>15}" for c in cells))
            return "\n".join(lines)
        t = self.totals
        return (
            f"{t['patterns']} patterns x {t['games_per']} games: "
            f"{t['games']} games, {t['draws']} draws, "
            f"{t['hits']}/{t['non_draws']} non-draw games recognized exactly "
            f"(accuracy {t['accuracy']:.4f})"
        )


def run_variant_experiment(
    n_patterns: int = 50,
    games_per: int = 10,
    seed: int = 7,
    min_cells: int = 2,
    max_cells: int = 5,
    workers: int = 1,
) -> ExperimentReport:
    """Teach seeded random patterns through the oracle, then measure exact-ply
    recognition over seeded random-vs-random games."""
    report = ExperimentReport(
        kind="variants",
        seed=seed,
        params={
            "n_patterns": n_patterns,
            "games_per": games_per,
            "min_cells": min_cells,
            "max_cells": max_cells,
        },
    )
    for i in range(n_patterns):
        gt = random_pattern(derive_seed(seed, "pattern", i), min_cells, max_cells)
        learned, events = teach_with_oracle(gt)
        questions = sum(1 for e in events if e["event"] == "question")
        game_seeds = [derive_seed(seed, "variant-game", i, g) for g in range(games_per)]
        row = _score_cell(learned, gt.rule, game_seeds, workers)
        row.update(
            condition=f"pattern_{i:02d}",
            disabled_group="none",
            questions=questions,
            pattern_cells=[list(c) for c in gt.rule.pattern.sorted_cells],
        )
        report.rows.append(row)
    games = sum(r["games"] for r in report.rows)
    draws = sum(r["draws"] for r in report.rows)
    hits = sum(r["hits"] for r in report.rows)
    non_draws = games - draws
    report.totals = {
        "patterns": n_patterns,
        "games_per": games_per,
        "games": games,
        "draws": draws,
        "non_draws": non_draws,
        "hits": hits,
        "accuracy": (hits / non_draws) if non_draws else None,
        "max_questions": max(r["questions"] for r in report.rows),
    }
    return report


def run_ablation(games_per: int = 30, seed: int = 7, workers: int = 1) -> ExperimentReport:
    """Teach the four canonical conditions under the full protocol and under
    each single-category ablation, then score every cell like the variant
    experiment. The full-protocol baseline appears as disabled_group "none"."""
    report = ExperimentReport(
        kind="ablation", seed=seed, params={"games_per": games_per}
    )
    rules = dict(zip(CANONICAL_NAMES, canonical_rules()))
    groups: list[tuple[str, AblationConfig]] = [("none", AblationConfig.all_enabled())]
    groups += [(name, AblationConfig.without(cat)) for name, cat in ABLATION_GROUPS]
    for condition, rule in rules.items():
        for group_name, config in groups:
            gt = GroundTruth(rule=rule, rng_seed=derive_seed(seed, "demo", condition, group_name))
            learned, events = teach_with_oracle(gt, config=config)
            questions = sum(1 for e in events if e["event"] == "question")
            game_seeds = [
                derive_seed(seed, "ablation-game", condition, group_name, g)
                for g in range(games_per)
            ]
            row = _score_cell(learned, gt.rule, game_seeds, workers)
            row.update(condition=condition, disabled_group=group_name, questions=questions)
            report.rows.append(row)
    report.totals = {
        "conditions": len(rules),
        "groups": [g for g, _ in groups],
        "games": sum(r["games"] for r in report.rows),
    }
    return report


def write_report(report: ExperimentReport, json_path: Path, csv_path: Path | None = None) -> None:
    json_path = Path(json_path)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_bytes(report.to_json_bytes())
    if csv_path is not None:
        Path(csv_path).write_text(report.to_csv(), encoding="utf-8")

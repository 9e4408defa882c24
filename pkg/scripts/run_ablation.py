#!/usr/bin/env python3
"""Teach the four canonical win conditions with one question category
removed at a time and report per-cell detection accuracy (480 games at the
defaults, plus the full-protocol baseline row)."""
import argparse
from pathlib import Path

from winteach.experiments import run_ablation, write_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--games", type=int, default=30)
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--workers", type=int, default=1)
parser.add_argument("--out", default="ablation_report")
args = parser.parse_args()

report = run_ablation(games_per=args.games, seed=args.seed, workers=args.workers)
out = Path(args.out)
write_report(report, out.with_suffix(".json"), out.with_suffix(".csv"))
print(report.summary())

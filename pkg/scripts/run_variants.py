#!/usr/bin/env python3
"""Teach 50 seeded random win patterns and measure exact-ply recognition
over random-vs-random games (500 games at the defaults)."""
import argparse
from pathlib import Path

from winteach.experiments import run_variant_experiment, write_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--n", type=int, default=50)
parser.add_argument("--games", type=int, default=10)
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--workers", type=int, default=1)
parser.add_argument("--out", default="variants_report")
args = parser.parse_args()

report = run_variant_experiment(
    n_patterns=args.n, games_per=args.games, seed=args.seed, workers=args.workers
)
out = Path(args.out)
write_report(report, out.with_suffix(".json"), out.with_suffix(".csv"))
print(report.summary())

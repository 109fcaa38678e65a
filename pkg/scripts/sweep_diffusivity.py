#!/usr/bin/env python3
"""Damping-rate ledger: sweep the stress diffusivity mu at fixed smallness
and compare the fitted decay rate of ||grad u||_L2 against the transform's
damping rate lambda = K*alpha/(2*mu) per value.

Usage: python scripts/sweep_diffusivity.py [--values 0.5,1,2,4] [--out DIR]
"""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from oldroyd2d.config import load_config
from oldroyd2d.runner import sweep

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "b_small_data_decay.cfg"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--values", default="0.5,1.0,2.0,4.0")
    parser.add_argument("--out", default="out/mu_sweep")
    args = parser.parse_args()

    cfg = load_config(CONFIG)
    cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    values = [float(v) for v in args.values.split(",")]
    ok, csv_path = sweep(cfg, "model.mu", values)

    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            rate, lam = row["decay_rate"], row["lambda_theory"]
            ratio = abs(float(rate)) / float(lam) if rate and lam else float("nan")
            print(
                f"mu={row['value']:>6} rate={rate:>22} lambda={lam:>8} "
                f"|rate|/lambda={ratio:.3f}"
            )
    print(f"full table: {csv_path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

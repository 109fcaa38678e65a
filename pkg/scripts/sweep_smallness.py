#!/usr/bin/env python3
"""Smallness-threshold study: sweep the initial-data size delta on the
full-Q stock experiment and tabulate decay quality per value.

Usage: python scripts/sweep_smallness.py [--values 0.01,0.02,...] [--out DIR]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from oldroyd2d.config import load_config
from oldroyd2d.runner import sweep

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "b_small_data_decay.cfg"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--values", default="0.01,0.02,0.05,0.1,0.2,0.5,1.0")
    parser.add_argument("--out", default="out/delta_sweep")
    args = parser.parse_args()

    cfg = load_config(CONFIG)
    cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    values = [float(v) for v in args.values.split(",")]
    ok, csv_path = sweep(cfg, "initial.delta", values)
    print(csv_path.read_text())
    print(f"full table: {csv_path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run every stock experiment config and print a one-line summary each.

Usage: python scripts/run_stock_experiments.py [--only a,b,...] [--out DIR]
Output lands under out/ (or the --out root / OLDROYD2D_OUT).
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from oldroyd2d.config import load_config
from oldroyd2d.runner import run

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

STOCK = {
    "a": "a_large_data_q_zero.cfg",
    "b": "b_small_data_decay.cfg",
    "c": "c_max_principle_contrast.cfg",
    "d": "d_euler_sanity.cfg",
    "e": "e_stokes_toy.cfg",
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--only", default=",".join(STOCK),
                        help="comma list of experiment letters")
    parser.add_argument("--out", default=None, help="output root directory")
    args = parser.parse_args()

    failures = 0
    for key in args.only.split(","):
        key = key.strip()
        cfg = load_config(CONFIG_DIR / STOCK[key])
        if args.out:
            cfg = replace(
                cfg, output=replace(cfg.output, directory=str(Path(args.out) / f"stock_{key}"))
            )
        start = time.monotonic()
        result = run(cfg)
        elapsed = time.monotonic() - start
        if not result.ok:
            print(f"stock ({key}): FAILED after {elapsed:.0f}s: {result.error}")
            failures += 1
            continue
        s = result.summary
        fit = s.get("decay_grad_u_l2") or {}
        print(
            f"stock ({key}): {len(result.records)} records in {elapsed:.0f}s | "
            f"bkm={s['bkm_integral']:.3f} max|omega|_inf={s['max_omega_linf']:.3f} "
            f"decay_rate={fit.get('rate')} -> {result.out_dir}"
        )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

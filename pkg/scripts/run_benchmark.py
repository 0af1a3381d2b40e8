#!/usr/bin/env python3
"""Run the reference Burgers benchmark and print the error/timing table.

Usage:
    python scripts/run_benchmark.py [--config CFG] [--out report.csv] [--cache DIR]

Defaults reproduce the reference setup: nu=1e-3, 1024 elements, backward
Euler dt=1e-3 with 101 snapshots on [0, 1], forward Euler dt=1e-4 for the
reduced models, ranks r in {6, 10, 15}, truncation policies
{r, r+1, 2r, 3r, d}, linear ansatz, dynamics-consistent sign.
"""

import argparse
import sys
import time
from collections import defaultdict
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from burgers_rom.bench import BenchConfig, parse_config, run_pipeline


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", default="report.csv", help="report CSV path")
    parser.add_argument("--cache", default=None, help="snapshot cache directory")
    args = parser.parse_args()

    cfg = parse_config(args.config) if args.config else BenchConfig()
    cfg = replace(cfg, output_path=args.out, cache_dir=args.cache or cfg.cache_dir)

    print(f"full-order solve: {cfg.fom.n_elements} elements, nu={cfg.fom.nu}, "
          f"dt={cfg.fom.dt}, horizon {cfg.fom.t_end}")
    print(f"reduced models:   dt={cfg.rom_dt}, ranks {list(cfg.r_list)}, "
          f"policies {list(cfg.m_policies)}, {cfg.ansatz} ansatz, sign {cfg.closure_sign:+d}")
    tic = time.perf_counter()
    report = run_pipeline(cfg)
    print(f"pipeline finished in {time.perf_counter() - tic:.1f} s; "
          f"report written to {cfg.output_path}\n")

    # pivot into one line per (method, m policy), one error column per rank
    errors = defaultdict(dict)
    online = defaultdict(dict)
    for row in report.rows:
        key = (row.method, row.m_tag)
        errors[key][row.r] = row.error
        online[key][row.r] = row.online_s

    ranks = list(cfg.r_list)
    header = ["method", "space"] + [f"err r={r}" for r in ranks] + [f"online r={r} (s)" for r in ranks]
    widths = [8, 6] + [10] * (2 * len(ranks))
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for (method, tag), per_rank in errors.items():
        cells = [method.ljust(widths[0]), (tag if tag != "-" else "").ljust(widths[1])]
        cells += [f"{per_rank.get(r, float('nan')):.4f}".ljust(10) for r in ranks]
        cells += [f"{online[(method, tag)].get(r, float('nan')):.2f}".ljust(10) for r in ranks]
        print("  ".join(cells))


if __name__ == "__main__":
    main()

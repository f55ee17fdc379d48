"""Type 1 rate of the combined procedure under skew normal data at 100000 replicates.

    python3 scripts/full_scale_skew_null.py [--replicates N] [--workers W]
"""

import argparse
from dataclasses import replace

from pretestlab.config import load_text, parse_config
from pretestlab.engine import PROCEDURES, binomial_level_test, simulate_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicates", type=int, default=100_000)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    config = next(c for c in parse_config(load_text("table1")) if c.scenario_id == "skewnormal_null")
    res = simulate_scenario(replace(config, replicates=args.replicates), workers=args.workers)
    for proc in PROCEDURES:
        k = res.stats[proc].rejections
        p = binomial_level_test(k, res.replicates_used, 0.05, "greater")
        print(f"{proc:12} {k:6d}/{res.replicates_used} = {res.rate(proc):.4f}  P(X >= k | 0.05) = {p:.4g}")


if __name__ == "__main__":
    main()

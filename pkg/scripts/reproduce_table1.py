"""Reproduce the two-sample error-probability table and compare with the printed values.

    python3 scripts/reproduce_table1.py [--replicates N] [--workers W] [--out DIR]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from pretestlab.config import load_text, parse_config
from pretestlab.engine import PROCEDURES, simulate_scenario
from pretestlab.reports import emit_table

PRINTED = {
    "normal": {"welch": (0.0498, 0.0785), "wmw": (0.0475, 0.0924), "combined": (0.0512, 0.0782), "permutation": (0.0487, 0.0778)},
    "t3": {"welch": (0.0453, 0.4127), "wmw": (0.0482, 0.2585), "combined": (0.0515, 0.2700), "permutation": (0.0450, 0.4142)},
    "exponential": {"welch": (0.0474, 0.3389), "wmw": (0.0471, 0.4853), "combined": (0.0476, 0.4849), "permutation": (0.0455, 0.4472)},
    "skew normal": {"welch": (0.0493, 0.0868), "wmw": (0.0481, 0.0778), "combined": (0.0531, 0.0735), "permutation": (0.0478, 0.0777)},
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicates", type=int, default=20000)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="results/table1")
    args = ap.parse_args()

    results = {}
    for config in parse_config(load_text("table1")):
        res = simulate_scenario(replace(config, replicates=args.replicates), workers=args.workers)
        results[(res.label, res.hypothesis)] = res
        print(f"done {config.scenario_id}", flush=True)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ordered = list(results.values())
    (out / "results.csv").write_text(emit_table(ordered, "csv"))
    (out / "table.txt").write_text(emit_table(ordered, "text"))

    print(f"\n{'procedure':12} {'dist':12} {'type1':>7} {'printed':>8} {'type2':>7} {'printed':>8}")
    for label, procs in PRINTED.items():
        for proc in PROCEDURES:
            t1 = results[(label, "null")].rate(proc)
            t2 = results[(label, "alt")].type2(proc)
            p1, p2 = procs[proc]
            flag = "" if abs(t1 - p1) <= 0.010 and abs(t2 - p2) <= 0.015 else "  <-- outside tolerance"
            print(f"{proc:12} {label:12} {t1:7.4f} {p1:8.4f} {t2:7.4f} {p2:8.4f}{flag}")


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numeric/convergence error,
4 too many degenerate replicates.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import config_digest, load_text, normalize_mixture, parse_config, parse_lemma_inputs
from .engine import ScenarioConfig, convex_combination, simulate_scenario
from .errors import ConfigError, ConvergenceError, DegenerateThresholdError, DomainError
from .lambda_lab import DEFAULT_GRID, MixtureSpec, simulate_mixture, verify_lemma
from .reports import RunManifest, emit_power_curve, emit_sweep, emit_table, read_results

FULL_SCALE_REPLICATES = 100_000


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _load(path: str, replicates: int | None, kind: type):
    configs = [c for c in parse_config(load_text(path)) if isinstance(c, kind)]
    if not configs:
        what = "scenarios" if kind is ScenarioConfig else "mixtures"
        raise ConfigError(f"no {what} defined in {path}")
    if replicates is not None:
        configs = [replace(c, replicates=replicates) for c in configs]
    if kind is MixtureSpec:
        configs = [normalize_mixture(c) for c in configs]
    return configs


def _out_dir(args, config_path: str) -> Path:
    out = Path(args.out) if args.out else Path("results") / Path(config_path).stem
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finite(value):
    # JSON has no NaN; undetermined diagnostics become null
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _write_manifest(out: Path, configs, started: str, outputs: list[str], argv) -> None:
    seeds = sorted({c.master_seed for c in configs})
    manifest = RunManifest(config_digest(configs), __version__, seeds, started, _now(), outputs, list(argv))
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")


def cmd_simulate(args, argv) -> int:
    started = _now()
    replicates = FULL_SCALE_REPLICATES if args.full_scale else args.replicates
    configs = _load(args.config, replicates, ScenarioConfig)
    results = []
    for c in configs:
        if not args.quiet:
            print(f"simulating {c.scenario_id} ({c.replicates} replicates)", file=sys.stderr)
        results.append(simulate_scenario(c, workers=args.workers))
    out = _out_dir(args, args.config)
    outputs = []
    for fmt, name in (("csv", "results.csv"), ("json", "results.json"), ("text", "table.txt")):
        (out / name).write_text(emit_table(results, fmt), encoding="utf-8")
        outputs.append(str(out / name))
    _write_manifest(out, configs, started, outputs, argv)
    sys.stdout.write(emit_table(results, args.format))
    return 0


def cmd_mixture(args, argv) -> int:
    started = _now()
    specs = _load(args.config, args.replicates, MixtureSpec)
    out = _out_dir(args, args.config)
    outputs = []
    for spec in specs:
        if not args.quiet:
            print(f"sweeping {spec.mixture_id} ({spec.replicates} replicates per world)", file=sys.stderr)
        sweep = simulate_mixture(spec, workers=args.workers)
        csv_path = out / f"sweep_{spec.mixture_id}.csv"
        svg_path = out / f"sweep_{spec.mixture_id}.svg"
        csv_path.write_text(emit_sweep(sweep, "csv"), encoding="utf-8")
        emit_power_curve(sweep, svg_path)
        diag = _finite({
            "lambda_star": sweep.lambda_star,
            "gain": sweep.gain,
            "endpoint_inputs": vars(sweep.endpoint_inputs),
            "gaps": {k: vars(g) for k, g in sweep.diagnostics.gaps.items()},
            "delta_max": sweep.diagnostics.delta_max,
        })
        diag_path = out / f"diagnostics_{spec.mixture_id}.json"
        diag_path.write_text(json.dumps(diag, indent=2) + "\n", encoding="utf-8")
        outputs += [str(csv_path), str(svg_path), str(diag_path)]
        sys.stdout.write(emit_sweep(sweep, args.format))
        if sweep.lambda_star is not None:
            print(f"# lambda* = {sweep.lambda_star:.4f}" + (f", gain = {sweep.gain:.4f}" if sweep.gain is not None else ""))
    _write_manifest(out, specs, started, outputs, argv)
    return 0


def cmd_lemma(args, argv) -> int:
    inputs, grid = parse_lemma_inputs(load_text(args.inputs))
    report = verify_lemma(inputs, grid or DEFAULT_GRID)
    if args.json:
        sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
        return 0
    print(f"delta_theta = {float(inputs.delta_theta):.6f}")
    print(f"delta_q     = {float(inputs.delta_q):.6f}")
    if report.failed_assumptions:
        print("failed assumptions: " + ", ".join(f"({a})" for a in report.failed_assumptions))
    else:
        print("assumptions (I)-(III) hold")
    if report.lambda_star is not None:
        print(f"lambda*     = {float(report.lambda_star):.6f}")
    if report.gain is not None:
        print(f"gain        = {float(report.gain):.6f} (check error {float(report.gain_check_error):.2e})")
    if report.superior_interval is not None:
        lo, hi = report.superior_interval
        print(f"combined beats both main tests for lambda in ({float(lo):.4f}, {float(hi):.4f})")
    print("lambda  mc      au      combined")
    for k, lam in enumerate(report.grid):
        c = report.curves
        print(f"{lam:<7.3f} {float(c['mc'][k]):.4f}  {float(c['au'][k]):.4f}  {float(c['combined'][k]):.4f}")
    return 0


def _parse_weights(text: str) -> dict[str, float]:
    path = Path(text)
    if path.is_file():
        text = ",".join(
            line.split("#", 1)[0].strip() for line in path.read_text(encoding="utf-8").splitlines()
        )
    weights = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise ConfigError(f"weights: expected scenario_id=weight, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        try:
            weights[key] = float(value)
        except ValueError:
            raise ConfigError(f"weights.{key}: expected a number, got {value!r}") from None
    if not weights:
        raise ConfigError("weights: none given")
    return weights


def cmd_combine(args, argv) -> int:
    table = read_results(args.results)
    weights = _parse_weights(args.weights)
    missing = [k for k in weights if k not in table]
    if missing:
        raise ConfigError(f"weights: scenario {missing[0]!r} not in {args.results}")
    combined = convex_combination((table[k], w) for k, w in weights.items())
    rows = [{"procedure": p, "rate": r, "se": s, "type2": 1.0 - r} for p, (r, s) in combined.items()]
    if args.format == "json":
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        print("procedure,rate,se,type2")
        for row in rows:
            print(f"{row['procedure']},{row['rate']!r},{row['se']!r},{row['type2']!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pretestlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("-o", "--out", help="output directory (default results/<config stem>)")
        p.add_argument("-w", "--workers", type=int, default=None, help="worker processes (env PRETESTLAB_WORKERS)")
        p.add_argument("-r", "--replicates", type=int, default=None, help="override replicate counts")
        p.add_argument("-q", "--quiet", action="store_true")

    p = sub.add_parser("simulate", help="estimate error probabilities for each scenario")
    p.add_argument("config")
    run_flags(p)
    p.add_argument("--full-scale", action="store_true", help=f"use {FULL_SCALE_REPLICATES} replicates")
    p.add_argument("-f", "--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mixture", help="sweep power over the mixing weight lambda")
    p.add_argument("config")
    run_flags(p)
    p.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_mixture)

    p = sub.add_parser("lemma", help="analytic crossing point and gain report")
    p.add_argument("inputs")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("combine", help="convex combination of scenario rates")
    p.add_argument("results", help="results.csv or results.json from 'simulate'")
    p.add_argument("weights", help="'id=w,id=w,...' or a file with one id = w per line")
    p.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_combine)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, argv)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except DegenerateThresholdError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

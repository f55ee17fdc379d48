"""CSV / JSON / text tables and SVG power curves."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .engine import PROCEDURES, ScenarioResult
from .lambda_lab import MixtureSweep

__all__ = [
    "CSV_COLUMNS",
    "SWEEP_COLUMNS",
    "DISPLAY_NAMES",
    "result_rows",
    "emit_table",
    "read_results",
    "sweep_rows",
    "emit_sweep",
    "emit_power_curve",
    "RunManifest",
]

CSV_COLUMNS = (
    "scenario_id",
    "procedure",
    "hypothesis",
    "rate",
    "se",
    "ms_rate",
    "rate_given_pass",
    "rate_given_reject",
    "replicates",
    "seed",
)
SWEEP_COLUMNS = ("lambda", "procedure", "power", "se", "analytic_power")

DISPLAY_NAMES = {
    "welch": "Welch t",
    "wmw": "WMW",
    "combined": "Combined",
    "permutation": "Permutation",
    "mc": "MC (Welch t)",
    "au": "AU (WMW)",
}


def _num(value: float) -> float | None:
    return None if value is None or math.isnan(value) else float(value)


def result_rows(results: Sequence[ScenarioResult]) -> list[dict]:
    """One row per (scenario, procedure), scenarios in input order."""
    rows = []
    for res in results:
        for proc in PROCEDURES:
            if proc not in res.stats:
                continue
            rows.append(
                {
                    "scenario_id": res.scenario_id,
                    "procedure": proc,
                    "hypothesis": res.hypothesis,
                    "rate": _num(res.rate(proc)),
                    "se": _num(res.se(proc)),
                    "ms_rate": _num(res.ms_rate),
                    "rate_given_pass": _num(res.rate_given_pass(proc)),
                    "rate_given_reject": _num(res.rate_given_reject(proc)),
                    "replicates": res.replicates_used,
                    "seed": res.master_seed,
                }
            )
    return rows


def _csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in columns])
    return buf.getvalue()


def _fmt_rate(value: float | None) -> str:
    if value is None or math.isnan(value):
        return "-"
    text = f"{value:.4f}"
    return text[1:] if text.startswith("0.") else text


def _text_table(results: Sequence[ScenarioResult]) -> str:
    # one row per (procedure, distribution label): type 1 from the null
    # scenario, type 2 from the alternative
    labels: list[str] = []
    by_label: dict[str, dict[str, ScenarioResult]] = {}
    for res in results:
        if res.label not in by_label:
            labels.append(res.label)
            by_label[res.label] = {}
        by_label[res.label][res.hypothesis] = res
    header = ("Procedure", "Distribution", "Type 1 error prob.", "Type 2 error prob.")
    body = []
    for label in labels:
        group = by_label[label]
        for proc in PROCEDURES:
            null, alt = group.get("null"), group.get("alt")
            t1 = null.rate(proc) if null is not None and proc in null.stats else None
            t2 = alt.type2(proc) if alt is not None and proc in alt.stats else None
            body.append((DISPLAY_NAMES[proc], label, _fmt_rate(t1), _fmt_rate(t2)))
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(4)]
    lines = [" | ".join(c.ljust(w) for c, w in zip(header, widths)).rstrip()]
    previous = None
    for row in body:
        if previous is not None and row[1] != previous:
            lines.append("-+-".join("-" * w for w in widths))
        lines.append(" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        previous = row[1]
    return "\n".join(lines) + "\n"


def emit_table(results: Sequence[ScenarioResult], fmt: str = "text") -> str:
    """Render results as ``csv``, ``json`` or a ``text`` error-probability table.

    Row order is scenario order, then Welch, WMW, Combined, Permutation.
    """
    if not results:
        raise ValueError("no results to emit")
    if fmt == "csv":
        return _csv(result_rows(results), CSV_COLUMNS)
    if fmt == "json":
        return json.dumps(result_rows(results), indent=2) + "\n"
    if fmt == "text":
        return _text_table(results)
    raise ValueError(f"unknown format {fmt!r}")


def read_results(path: str | Path) -> dict[str, dict[str, tuple[float, float]]]:
    """Load emitted CSV or JSON results as scenario_id -> procedure -> (rate, se)."""
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    out: dict[str, dict[str, tuple[float, float]]] = {}
    for row in rows:
        se = row.get("se")
        se = 0.0 if se in (None, "") else float(se)
        out.setdefault(row["scenario_id"], {})[row["procedure"]] = (float(row["rate"]), se)
    return out


def sweep_rows(sweep: MixtureSweep) -> list[dict]:
    rows = []
    for k, lam in enumerate(sweep.lambdas):
        for proc in sweep.procedures:
            analytic = None if sweep.analytic is None else float(sweep.analytic[proc][k])
            rows.append(
                {
                    "lambda": float(lam),
                    "procedure": proc,
                    "power": float(sweep.power[proc][k]),
                    "se": float(sweep.se[proc][k]),
                    "analytic_power": analytic,
                }
            )
    return rows


def emit_sweep(sweep: MixtureSweep, fmt: str = "csv") -> str:
    rows = sweep_rows(sweep)
    if fmt == "csv":
        return _csv(rows, SWEEP_COLUMNS)
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


_COLORS = {"mc": "#1f77b4", "au": "#d62728", "combined": "#2ca02c"}
_FALLBACK_COLORS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def emit_power_curve(sweep: MixtureSweep, path: str | Path | None = None, overlays: bool = True) -> str:
    """SVG with one polyline per procedure (plus dashed analytic lines when
    ``overlays`` is set and the sweep carries them). Writes to ``path`` if given."""
    if len(sweep.lambdas) < 2:
        raise ValueError("a power curve needs at least two lambda points")
    width, height = 640, 420
    left, right, top, bottom = 70, 170, 40, 60
    pw, ph = width - left - right, height - top - bottom

    show_analytic = overlays and sweep.analytic is not None
    values = [v for p in sweep.procedures for v in sweep.power[p]]
    if show_analytic:
        values += [v for p in sweep.procedures for v in sweep.analytic[p]]
    lo = max(0.0, math.floor(min(values) * 10) / 10)
    hi = min(1.0, math.ceil(max(values) * 10) / 10)
    if hi <= lo:
        lo, hi = max(0.0, lo - 0.1), min(1.0, hi + 0.1)

    def sx(lam: float) -> float:
        return left + lam * pw

    def sy(p: float) -> float:
        return top + (1.0 - (p - lo) / (hi - lo)) * ph

    def points(ys) -> str:
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(sweep.lambdas, ys))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.2f}" y="22" text-anchor="middle" font-size="14">'
        f"Power across lambda ({sweep.mixture_id})</text>",
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(11):
        lam = i / 10
        out.append(f'<line x1="{sx(lam):.2f}" y1="{top + ph}" x2="{sx(lam):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(lam):.2f}" y="{top + ph + 18}" text-anchor="middle">{lam:.1f}</text>')
    steps = int(round((hi - lo) / 0.05))
    for i in range(steps + 1):
        p = lo + i * (hi - lo) / steps
        out.append(f'<line x1="{left - 5}" y1="{sy(p):.2f}" x2="{left}" y2="{sy(p):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(p) + 4:.2f}" text-anchor="end">{p:.2f}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 15}" text-anchor="middle">lambda</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.2f})">power</text>'
    )

    for i, proc in enumerate(sweep.procedures):
        color = _COLORS.get(proc, _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)])
        out.append(
            f'<polyline class="simulated" data-procedure="{proc}" fill="none" stroke="{color}" '
            f'stroke-width="2" points="{points(sweep.power[proc])}"/>'
        )
        if show_analytic:
            out.append(
                f'<polyline class="analytic" data-procedure="{proc}" fill="none" stroke="{color}" '
                f'stroke-width="1" stroke-dasharray="5,4" points="{points(sweep.analytic[proc])}"/>'
            )
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{DISPLAY_NAMES.get(proc, proc)}</text>')
    if show_analytic:
        ly = top + 10 + 20 * len(sweep.procedures)
        lx = left + pw + 15
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="black" stroke-dasharray="5,4"/>'
        )
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">analytic</text>')
    if sweep.lambda_star is not None and 0.0 <= sweep.lambda_star <= 1.0:
        x = sx(sweep.lambda_star)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#999999" stroke-dasharray="2,3"/>')
        out.append(f'<text x="{x:.2f}" y="{top - 5}" text-anchor="middle" fill="#555555">lambda*</text>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg


@dataclass
class RunManifest:
    config_digest: str
    tool_version: str
    master_seeds: list[int]
    started: str
    finished: str
    outputs: list[str] = field(default_factory=list)
    argv: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))

    def matches(self, configs) -> bool:
        from .config import config_digest

        return config_digest(configs) == self.config_digest

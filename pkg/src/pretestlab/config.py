"""Plain-text run configurations.

Documents are INI-style: an optional ``[run]`` section with defaults, then
``[scenario <id>]``, ``[mixture <id>]`` or ``[lemma]`` sections::

    [run]
    seed = 20240601
    replicates = 20000

    [scenario normal_null]
    label = normal
    hypothesis = null
    dist1 = normal(mu=1, sigma=1)
    dist2 = normal(mu=1, sigma=1)

    [mixture figure1]
    theta_dist1 = normal(mu=1)
    theta_dist2 = normal(mu=2)
    q_dist1 = shifted_t(df=3, mu=1)
    q_dist2 = shifted_t(df=3, mu=2)
    lambda_grid = 0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8 0.9 1

Unknown sections and keys are errors. Syntax errors carry the line number,
semantic errors the offending key path (``scenario.normal_null.dist1.df``).
"""

from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

from .combined import ProcedureConfig
from .distributions import KINDS, DistributionSpec
from .engine import ScenarioConfig
from .errors import ConfigError, DomainError
from .lambda_lab import LemmaInputs, MixtureSpec

__all__ = [
    "parse_config",
    "render_config",
    "config_digest",
    "parse_distribution",
    "render_distribution",
    "parse_lemma_inputs",
    "load_text",
    "BUILTIN_CONFIGS",
]

RunConfig = Union[ScenarioConfig, MixtureSpec]

_RUN_KEYS = {"seed", "replicates", "n1", "n2", "alpha_ms", "alpha", "permutation_b"}
_SCENARIO_KEYS = _RUN_KEYS | {"label", "hypothesis", "dist1", "dist2"}
_MIXTURE_KEYS = _RUN_KEYS | {
    "theta_dist1",
    "theta_dist2",
    "q_dist1",
    "q_dist2",
    "theta_id",
    "q_id",
    "lambda_grid",
}
_LEMMA_KEYS = {"p_mc_theta", "p_au_theta", "p_mc_q", "p_au_q", "alpha_ms", "alpha_ms_star", "lambda_grid"}
_DEFAULTS = {
    "seed": "0",
    "replicates": "20000",
    "n1": "20",
    "n2": "30",
    "alpha_ms": "0.05",
    "alpha": "0.05",
    "permutation_b": "999",
}
_KIND_ALIASES = {"t": "shifted_t", "skewnormal": "skew_normal", "exp": "exponential"}
_DIST_RE = re.compile(r"^\s*([A-Za-z_]+)\s*\((.*)\)\s*$")

BUILTIN_CONFIGS = ("table1", "figure1", "lemma_table1")


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None,
        inline_comment_prefixes=("#", ";"),
        strict=True,
        default_section="\x00unused",
    )
    return parser


def _read(text: str) -> configparser.ConfigParser:
    parser = _parser()
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}: expected a [section] header first") from exc
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"parse error at line {lineno}: {line.strip()!r}") from exc
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        where = f" at line {lineno}" if lineno else ""
        raise ConfigError(f"parse error{where}: {exc.message}") from exc
    return parser


def parse_distribution(text: str, path: str = "dist") -> DistributionSpec:
    """Parse ``kind(key=value, ...)``, e.g. ``shifted_t(df=3, mu=1)``."""
    m = _DIST_RE.match(text)
    if not m:
        raise ConfigError(f"{path}: expected 'kind(key=value, ...)', got {text!r}")
    kind = m.group(1).lower()
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ConfigError(f"{path}: unknown distribution kind {m.group(1)!r}")
    cls = KINDS[kind]
    allowed = set(cls.__dataclass_fields__)
    params = {}
    body = m.group(2).strip()
    for item in filter(None, (p.strip() for p in body.split(","))) if body else ():
        if "=" not in item:
            raise ConfigError(f"{path}: expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown parameter for {kind}")
        if key in params:
            raise ConfigError(f"{path}.{key}: given twice")
        params[key] = _float(value, f"{path}.{key}")
    if "mu" not in params:
        raise ConfigError(f"{path}.mu: required")
    try:
        return cls(**params)
    except DomainError as exc:
        bad = next((k for k in params if k in str(exc)), None)
        where = f"{path}.{bad}" if bad else path
        raise ConfigError(f"{where}: {exc}") from exc


def render_distribution(spec: DistributionSpec) -> str:
    params = ", ".join(f"{k}={float(v)!r}" for k, v in spec.params().items())
    return f"{spec.kind}({params})"


def _float(value: str, path: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None


def _int(value: str, path: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{path}: expected an integer, got {value!r}") from None


def _grid(value: str, path: str) -> tuple[float, ...]:
    parts = [p for p in re.split(r"[,\s]+", value.strip()) if p]
    return tuple(_float(p, path) for p in parts)


def _merged(parser: configparser.ConfigParser, section: str, allowed: set[str], path: str) -> dict[str, str]:
    values = dict(_DEFAULTS)
    if parser.has_section("run"):
        values.update(parser["run"])
    own = dict(parser[section])
    for key in own:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
    values.update(own)
    return values


def _procedure(values: dict[str, str], path: str) -> ProcedureConfig:
    try:
        return ProcedureConfig(
            alpha_ms=_float(values["alpha_ms"], f"{path}.alpha_ms"),
            alpha=_float(values["alpha"], f"{path}.alpha"),
        )
    except DomainError as exc:
        key = "alpha_ms" if "alpha_ms" in str(exc) else "alpha"
        raise ConfigError(f"{path}.{key}: {exc}") from exc


def _require(values: dict[str, str], key: str, path: str) -> str:
    if key not in values or not values[key].strip():
        raise ConfigError(f"{path}.{key}: required")
    return values[key]


def _semantic(path: str, fn):
    try:
        return fn()
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _scenario(parser, section: str, sid: str) -> ScenarioConfig:
    path = f"scenario.{sid}"
    v = _merged(parser, section, _SCENARIO_KEYS, path)
    dist1 = parse_distribution(_require(v, "dist1", path), f"{path}.dist1")
    dist2 = parse_distribution(_require(v, "dist2", path), f"{path}.dist2")
    return _semantic(
        path,
        lambda: ScenarioConfig(
            scenario_id=sid,
            dist1=dist1,
            dist2=dist2,
            n1=_int(v["n1"], f"{path}.n1"),
            n2=_int(v["n2"], f"{path}.n2"),
            replicates=_int(v["replicates"], f"{path}.replicates"),
            master_seed=_int(v["seed"], f"{path}.seed"),
            procedure=_procedure(v, path),
            permutation_B=_int(v["permutation_b"], f"{path}.permutation_b"),
            label=v.get("label", sid).strip(),
            hypothesis=v.get("hypothesis", "null").strip(),
        ),
    )


def _mixture(parser, section: str, mid: str) -> MixtureSpec:
    path = f"mixture.{mid}"
    v = _merged(parser, section, _MIXTURE_KEYS, path)
    common = dict(
        n1=_int(v["n1"], f"{path}.n1"),
        n2=_int(v["n2"], f"{path}.n2"),
        replicates=_int(v["replicates"], f"{path}.replicates"),
        master_seed=_int(v["seed"], f"{path}.seed"),
        procedure=_procedure(v, path),
        permutation_B=_int(v["permutation_b"], f"{path}.permutation_b"),
        hypothesis="alt",
    )
    worlds = {}
    for world in ("theta", "q"):
        d1 = parse_distribution(_require(v, f"{world}_dist1", path), f"{path}.{world}_dist1")
        d2 = parse_distribution(_require(v, f"{world}_dist2", path), f"{path}.{world}_dist2")
        wid = v.get(f"{world}_id", f"{mid}.{world}").strip()
        worlds[world] = _semantic(
            path, lambda: ScenarioConfig(scenario_id=wid, dist1=d1, dist2=d2, label=wid, **common)
        )
    grid = _grid(v["lambda_grid"], f"{path}.lambda_grid") if "lambda_grid" in v else None
    kwargs = {} if grid is None else {"lambda_grid": grid}
    try:
        return MixtureSpec(
            mixture_id=mid,
            p_theta=worlds["theta"],
            q=worlds["q"],
            replicates=common["replicates"],
            master_seed=common["master_seed"],
            **kwargs,
        )
    except DomainError as exc:
        key = "lambda_grid" if "lambda_grid" in str(exc) else ""
        raise ConfigError(f"{path}{'.' + key if key else ''}: {exc}") from exc


def parse_config(text: str) -> list[RunConfig]:
    """Parse a document into scenario and mixture configurations, in document order."""
    parser = _read(text)
    configs: list[RunConfig] = []
    seen: set[tuple[str, str]] = set()
    for section in parser.sections():
        head, _, name = section.strip().partition(" ")
        name = name.strip()
        if head == "run" and not name:
            for key in parser[section]:
                if key not in _RUN_KEYS:
                    raise ConfigError(f"run.{key}: unknown key")
            continue
        if head not in ("scenario", "mixture") or not name:
            raise ConfigError(f"unknown section [{section}]")
        if (head, name) in seen:
            raise ConfigError(f"{head}.{name}: defined twice")
        seen.add((head, name))
        if head == "scenario":
            configs.append(_scenario(parser, section, name))
        else:
            configs.append(_mixture(parser, section, name))
    if not configs:
        raise ConfigError("no scenarios defined")
    return configs


def _render_common(lines: list[str], c: ScenarioConfig) -> None:
    lines.append(f"n1 = {c.n1}")
    lines.append(f"n2 = {c.n2}")
    lines.append(f"alpha_ms = {c.procedure.alpha_ms!r}")
    lines.append(f"alpha = {c.procedure.alpha!r}")
    lines.append(f"permutation_b = {c.permutation_B}")


def render_config(configs: Iterable[RunConfig]) -> str:
    """Canonical document; ``parse_config(render_config(cs)) == cs``."""
    lines: list[str] = []
    for c in configs:
        if isinstance(c, ScenarioConfig):
            if not c.procedure.is_default_triple:
                raise ConfigError(f"scenario {c.scenario_id}: custom kernels cannot be rendered")
            lines.append(f"[scenario {c.scenario_id}]")
            lines.append(f"label = {c.label or c.scenario_id}")
            lines.append(f"hypothesis = {c.hypothesis}")
            lines.append(f"dist1 = {render_distribution(c.dist1)}")
            lines.append(f"dist2 = {render_distribution(c.dist2)}")
            lines.append(f"replicates = {c.replicates}")
            lines.append(f"seed = {c.master_seed}")
            _render_common(lines, c)
        else:
            t, q = c.p_theta, c.q
            lines.append(f"[mixture {c.mixture_id}]")
            lines.append(f"theta_id = {t.scenario_id}")
            lines.append(f"theta_dist1 = {render_distribution(t.dist1)}")
            lines.append(f"theta_dist2 = {render_distribution(t.dist2)}")
            lines.append(f"q_id = {q.scenario_id}")
            lines.append(f"q_dist1 = {render_distribution(q.dist1)}")
            lines.append(f"q_dist2 = {render_distribution(q.dist2)}")
            lines.append("lambda_grid = " + " ".join(repr(v) for v in c.lambda_grid))
            lines.append(f"replicates = {c.replicates}")
            lines.append(f"seed = {c.master_seed}")
            _render_common(lines, t)
        lines.append("")
    return "\n".join(lines)


def config_digest(configs: Iterable[RunConfig]) -> str:
    """SHA-256 of the canonical rendering."""
    return hashlib.sha256(render_config(configs).encode("utf-8")).hexdigest()


def normalize_mixture(spec: MixtureSpec) -> MixtureSpec:
    """Align the component scenarios' seed and replicate count with the mixture's."""
    return replace(spec, p_theta=spec.world("theta"), q=spec.world("q"))


def parse_lemma_inputs(text: str) -> tuple[LemmaInputs, tuple[float, ...] | None]:
    """Read a ``[lemma]`` section of six rates and an optional ``lambda_grid``."""
    parser = _read(text)
    if not parser.has_section("lemma"):
        raise ConfigError("no [lemma] section defined")
    extra = [s for s in parser.sections() if s != "lemma"]
    if extra:
        raise ConfigError(f"unknown section [{extra[0]}]")
    values = dict(parser["lemma"])
    for key in values:
        if key not in _LEMMA_KEYS:
            raise ConfigError(f"lemma.{key}: unknown key")
    rates = {}
    for key in sorted(_LEMMA_KEYS - {"lambda_grid"}):
        rates[key] = _float(_require(values, key, "lemma"), f"lemma.{key}")
    grid = _grid(values["lambda_grid"], "lemma.lambda_grid") if "lambda_grid" in values else None
    return _semantic("lemma", lambda: LemmaInputs(**rates)), grid


def load_text(name_or_path: str) -> str:
    """Read a config file, falling back to the built-in configs by name."""
    path = Path(name_or_path)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    stem = path.name[:-4] if path.name.endswith(".cfg") else path.name
    if stem in BUILTIN_CONFIGS and path.parent == Path("."):
        return resources.files("pretestlab").joinpath("configs", f"{stem}.cfg").read_text(encoding="utf-8")
    raise ConfigError(f"config file not found: {name_or_path}")

"""Parameter sweeps: INI configuration, grid expansion and ordered parallel evaluation.

Configuration layout (keys are referred to as ``section.key``)::

    [params]            fixed values for m_l, m_r, v_F, a, E
    [axis.E]            one section per swept parameter
    start = 2.0
    stop = 5.0
    count = 11
    spacing = linear    (or log)
    [sweep]
    windows = 4, 8, 16
    jobs = 1
    max_points = 1000000
    [quad]
    abs_tol, rel_tol, max_subdivisions
    [output]
    csv = results.csv
    json = results.jsonl
"""
from __future__ import annotations

import configparser
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import CSV_FIELDS, build_report, format_float, reports_to_csv
from .errors import ConfigError, DiracJumpError
from .medium import MediumParams, Regime
from .momentum_entropy import MOMENTUM_QUAD
from .quadrature import QuadSpec

PARAM_NAMES = ("m_l", "m_r", "v_F", "a", "E")
DEFAULT_WINDOWS = (4, 8, 16)
DEFAULT_GRID_CAP = 1_000_000


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        key = f"axis.{self.name}"
        if self.name not in PARAM_NAMES:
            raise ConfigError(f"{key}: unknown parameter (expected one of {', '.join(PARAM_NAMES)})")
        if self.count < 1:
            raise ConfigError(f"{key}.count must be >= 1, got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"{key}.spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigError(f"{key}: log spacing needs positive start and stop")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    fixed: dict[str, float]
    axes: tuple[Axis, ...] = ()
    windows: tuple[int, ...] = DEFAULT_WINDOWS
    quad: QuadSpec = MOMENTUM_QUAD
    jobs: int = 1
    max_points: int = DEFAULT_GRID_CAP
    csv_path: str | None = None
    json_path: str | None = None

    def __post_init__(self):
        swept = {ax.name for ax in self.axes}
        if len(swept) != len(self.axes):
            raise ConfigError("axis: a parameter is swept twice")
        missing = [n for n in PARAM_NAMES if n not in swept and n not in self.fixed]
        if missing:
            raise ConfigError(f"params.{missing[0]}: no fixed value and no axis")
        if not self.windows or any(n < 1 for n in self.windows):
            raise ConfigError("sweep.windows must list positive integers")
        if self.jobs < 1:
            raise ConfigError("sweep.jobs must be >= 1")

    @property
    def size(self) -> int:
        return math.prod(ax.count for ax in self.axes)

    def points(self):
        """Parameter dicts in row-major order over the axes as listed."""
        if self.size > self.max_points:
            raise ConfigError(f"sweep.max_points: grid has {self.size} points, cap is {self.max_points}")
        names = [ax.name for ax in self.axes]
        for combo in itertools.product(*(ax.values() for ax in self.axes)):
            values = dict(self.fixed)
            values.update({n: float(v) for n, v in zip(names, combo)})
            yield {n: values[n] for n in PARAM_NAMES}


def _number(raw: str, key: str, kind=float):
    try:
        value = kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def parse_windows(raw: str, key: str = "sweep.windows") -> tuple[int, ...]:
    parts = [p for p in raw.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"{key}: empty window list")
    windows = tuple(_number(p, key, int) for p in parts)
    if any(n < 1 for n in windows):
        raise ConfigError(f"{key}: window sizes must be positive integers, got {raw!r}")
    return windows


def load_config(path, overrides: dict | None = None) -> SweepConfig:
    """Read an INI sweep file; ``overrides`` (dotted keys) take precedence."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    flat = {f"{sec}.{key}": val for sec in parser.sections() for key, val in parser.items(sec)}
    flat.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(flat)


_KNOWN_SECTIONS = ("params", "sweep", "quad", "output")


def config_from_mapping(flat: dict[str, str]) -> SweepConfig:
    for key in flat:
        section, _, name = key.partition(".")
        if section.startswith("axis"):
            continue
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(f"{key}: unknown section {section!r}")
        allowed = {
            "params": PARAM_NAMES,
            "sweep": ("windows", "jobs", "max_points"),
            "quad": ("abs_tol", "rel_tol", "max_subdivisions"),
            "output": ("csv", "json"),
        }[section]
        if name not in allowed:
            raise ConfigError(f"{key}: unknown key")

    fixed = {k.split(".", 1)[1]: _number(v, k) for k, v in flat.items() if k.startswith("params.")}

    axes = []
    # axes vary in the order they are declared, the last one fastest
    axis_names = list(dict.fromkeys(k.split(".")[1] for k in flat if k.startswith("axis.")))
    for name in axis_names:
        prefix = f"axis.{name}."
        for req in ("start", "stop", "count"):
            if prefix + req not in flat:
                raise ConfigError(f"{prefix}{req}: missing")
        for key in flat:
            if key.startswith(prefix) and key[len(prefix):] not in ("start", "stop", "count", "spacing"):
                raise ConfigError(f"{key}: unknown key")
        axes.append(Axis(
            name,
            _number(flat[prefix + "start"], prefix + "start"),
            _number(flat[prefix + "stop"], prefix + "stop"),
            _number(flat[prefix + "count"], prefix + "count", int),
            flat.get(prefix + "spacing", "linear").strip(),
        ))

    quad_kwargs = {}
    if "quad.abs_tol" in flat:
        quad_kwargs["abs_tol"] = _number(flat["quad.abs_tol"], "quad.abs_tol")
    if "quad.rel_tol" in flat:
        quad_kwargs["rel_tol"] = _number(flat["quad.rel_tol"], "quad.rel_tol")
    if "quad.max_subdivisions" in flat:
        quad_kwargs["max_subdivisions"] = _number(flat["quad.max_subdivisions"], "quad.max_subdivisions", int)
    try:
        quad = QuadSpec(**{**_spec_kwargs(MOMENTUM_QUAD), **quad_kwargs})
    except DiracJumpError as exc:
        raise ConfigError(f"quad: {exc}") from None

    def out_path(key):
        raw = flat.get(key, "").strip()
        return raw or None

    return SweepConfig(
        fixed=fixed,
        axes=tuple(axes),
        windows=parse_windows(flat["sweep.windows"]) if "sweep.windows" in flat else DEFAULT_WINDOWS,
        quad=quad,
        jobs=_number(flat["sweep.jobs"], "sweep.jobs", int) if "sweep.jobs" in flat else 1,
        max_points=(_number(flat["sweep.max_points"], "sweep.max_points", int)
                    if "sweep.max_points" in flat else DEFAULT_GRID_CAP),
        csv_path=out_path("output.csv"),
        json_path=out_path("output.json"),
    )


def _spec_kwargs(spec: QuadSpec) -> dict:
    return {"abs_tol": spec.abs_tol, "rel_tol": spec.rel_tol, "max_subdivisions": spec.max_subdivisions}


@dataclass
class PointResult:
    index: int
    params: dict[str, float]
    rows: list[dict[str, str]]
    record: dict
    skipped: str | None = None
    sx_margin: float | None = None
    sum_violations: int = 0


def _skip_row(values: dict[str, float], reason: str) -> dict[str, str]:
    row = {k: "" for k in CSV_FIELDS}
    row.update({k: format_float(v) for k, v in values.items()})
    row["flags"] = f"status=skipped({reason})"
    return row


def evaluate_point(index: int, values: dict[str, float], windows, quad: QuadSpec) -> PointResult:
    """Build one report; invalid or failing points come back as skipped rows."""
    try:
        params = MediumParams(**values)
        if params.regime is not Regime.PROPAGATING:
            raise DiracJumpError(f"regime {params.regime.value}: no propagating transmitted wave")
        report = build_report(params, windows, quad)
    except DiracJumpError as exc:
        reason = str(exc).replace("\n", " ")
        record = {"params": values, "status": "skipped", "reason": reason}
        return PointResult(index, values, [_skip_row(values, reason)], record, skipped=reason)
    record = report.to_dict()
    record["status"] = "ok"
    violations = sum(not ok for ok in report.flags.sum_bound_ok.values())
    return PointResult(index, values, report.csv_rows(), record, sx_margin=report.sx_margin,
                       sum_violations=violations)


def _evaluate_star(args):
    return evaluate_point(*args)


@dataclass
class SweepSummary:
    count: int = 0
    skipped: int = 0
    sx_violations: int = 0
    sum_violations: int = 0
    min_sx_margin: float = math.inf
    results: list[PointResult] = field(default_factory=list)

    def lines(self) -> list[str]:
        margin = "n/a" if math.isinf(self.min_sx_margin) else f"{self.min_sx_margin:.6e}"
        return [
            f"points: {self.count}",
            f"skipped: {self.skipped}",
            f"S_x bound violations: {self.sx_violations}",
            f"S_x + S_p bound violations (point-window pairs): {self.sum_violations}",
            f"min S_x - paper_bound: {margin}",
        ]


def run_sweep(config: SweepConfig) -> SweepSummary:
    tasks = [(i, values, config.windows, config.quad) for i, values in enumerate(config.points())]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_evaluate_star, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs))))
    else:
        results = [_evaluate_star(t) for t in tasks]
    results.sort(key=lambda r: r.index)

    summary = SweepSummary(count=len(results), results=results)
    for res in results:
        if res.skipped is not None:
            summary.skipped += 1
            continue
        if res.sx_margin < -1e-9:
            summary.sx_violations += 1
        summary.min_sx_margin = min(summary.min_sx_margin, res.sx_margin)
        summary.sum_violations += res.sum_violations
    return summary


def sweep_csv(summary: SweepSummary) -> str:
    return reports_to_csv(row for res in summary.results for row in res.rows)


def sweep_json(summary: SweepSummary) -> str:
    return "".join(json.dumps(res.record) + "\n" for res in summary.results)


def write_outputs(summary: SweepSummary, config: SweepConfig) -> list[str]:
    written = []
    for path, text in ((config.csv_path, sweep_csv), (config.json_path, sweep_json)):
        if path is None:
            continue
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text(summary))
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc.strerror}") from None
        written.append(path)
    return written

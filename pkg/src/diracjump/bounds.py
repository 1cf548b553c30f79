"""Uncertainty report: S_x, S_p per window, the S_x lower bound and the BBM constant."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

from .errors import DiracJumpError
from .medium import MediumParams
from .momentum_entropy import MomentumDensity, momentum_integrals, windowed_ft
from .position_entropy import WindowSpec, entropy_position, position_density, sx_lower_bound
from .quadrature import QuadSpec
from .scattering import flux_residual, solve_amplitudes

__all__ = ["BBM_CONSTANT", "CSV_FIELDS", "EntropyReport", "ReportFlags", "WindowEntry",
           "build_report", "sx_lower_bound"]

BBM_CONSTANT = 1.0 + math.log(math.pi)
BOUND_SLACK = 1e-9

CSV_FIELDS = ("m_l", "m_r", "v_F", "a", "E", "N", "S_x", "S_p", "paper_bound", "sum",
              "bbm_constant", "flux_residual", "flags")


@dataclass(frozen=True)
class WindowEntry:
    """Momentum-side results for one window of half-length N pi / k_l."""

    n_periods: int
    s_p: float
    s_p_error: float
    position_mass: float
    momentum_mass: float

    @property
    def convention_delta(self) -> float:
        """Normalized-density entropy sum minus the ratio-convention sum."""
        return math.log(self.position_mass) + math.log(self.momentum_mass)


@dataclass(frozen=True)
class ReportFlags:
    positivity_ok: bool
    sx_bound_ok: bool
    sum_bound_ok: dict[int, bool]
    bbm_ok: dict[int, bool]
    normalized_bbm_ok: dict[int, bool]
    s_p_positive: dict[int, bool]
    flux_residual: float


@dataclass(frozen=True)
class EntropyReport:
    params: MediumParams
    s_x: float
    windows: tuple[WindowEntry, ...]
    paper_bound: float
    flags: ReportFlags
    bbm_constant: float = BBM_CONSTANT

    @property
    def s_p_by_window(self) -> list[tuple[int, float]]:
        return [(w.n_periods, w.s_p) for w in self.windows]

    @property
    def sum_by_window(self) -> list[tuple[int, float]]:
        return [(w.n_periods, self.s_x + w.s_p) for w in self.windows]

    @property
    def normalized_sum_by_window(self) -> list[tuple[int, float]]:
        return [(w.n_periods, self.s_x + w.s_p + w.convention_delta) for w in self.windows]

    @property
    def sx_margin(self) -> float:
        return self.s_x - self.paper_bound

    def flag_string(self, n_periods: int) -> str:
        f = self.flags
        parts = [
            f"positivity_ok={int(f.positivity_ok)}",
            f"sx_bound_ok={int(f.sx_bound_ok)}",
            f"sum_bound_ok={int(f.sum_bound_ok[n_periods])}",
            f"bbm_ok={int(f.bbm_ok[n_periods])}",
            f"normalized_bbm_ok={int(f.normalized_bbm_ok[n_periods])}",
            f"s_p_sign={'+' if f.s_p_positive[n_periods] else '-'}",
        ]
        return ";".join(parts)

    def csv_rows(self) -> list[dict[str, str]]:
        p = self.params
        rows = []
        for w in self.windows:
            values = {
                "m_l": p.m_l, "m_r": p.m_r, "v_F": p.v_F, "a": p.a, "E": p.E,
                "S_x": self.s_x, "S_p": w.s_p, "paper_bound": self.paper_bound,
                "sum": self.s_x + w.s_p, "bbm_constant": self.bbm_constant,
                "flux_residual": self.flags.flux_residual,
            }
            row = {k: format_float(v) for k, v in values.items()}
            row["N"] = str(w.n_periods)
            row["flags"] = self.flag_string(w.n_periods)
            rows.append({k: row[k] for k in CSV_FIELDS})
        return rows

    def to_dict(self) -> dict:
        f = self.flags
        return {
            "params": {k: v for k, v in asdict(self.params).items() if k in ("m_l", "m_r", "v_F", "a", "E")},
            "S_x": self.s_x,
            "paper_bound": self.paper_bound,
            "bbm_constant": self.bbm_constant,
            "flux_residual": f.flux_residual,
            "positivity_ok": f.positivity_ok,
            "sx_bound_ok": f.sx_bound_ok,
            "windows": [
                {
                    "N": w.n_periods,
                    "S_p": w.s_p,
                    "S_p_error": w.s_p_error,
                    "sum": self.s_x + w.s_p,
                    "position_mass": w.position_mass,
                    "momentum_mass": w.momentum_mass,
                    "convention_delta": w.convention_delta,
                    "sum_bound_ok": f.sum_bound_ok[w.n_periods],
                    "bbm_ok": f.bbm_ok[w.n_periods],
                    "normalized_bbm_ok": f.normalized_bbm_ok[w.n_periods],
                    "s_p_positive": f.s_p_positive[w.n_periods],
                }
                for w in self.windows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "EntropyReport":
        windows = tuple(
            WindowEntry(w["N"], w["S_p"], w["S_p_error"], w["position_mass"], w["momentum_mass"])
            for w in data["windows"]
        )
        by_n = lambda key: {w["N"]: w[key] for w in data["windows"]}
        flags = ReportFlags(
            positivity_ok=data["positivity_ok"],
            sx_bound_ok=data["sx_bound_ok"],
            sum_bound_ok=by_n("sum_bound_ok"),
            bbm_ok=by_n("bbm_ok"),
            normalized_bbm_ok=by_n("normalized_bbm_ok"),
            s_p_positive=by_n("s_p_positive"),
            flux_residual=data["flux_residual"],
        )
        return cls(MediumParams(**data["params"]), data["S_x"], windows, data["paper_bound"],
                   flags, data["bbm_constant"])

    @classmethod
    def from_json(cls, text: str) -> "EntropyReport":
        return cls.from_dict(json.loads(text))


def format_float(x: float) -> str:
    return format(x, ".17g")


def reports_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except DiracJumpError as exc:
        raise exc.with_stage(name)


def build_report(params: MediumParams, windows, spec: QuadSpec | None = None) -> EntropyReport:
    """Run scattering, both entropies and the bound checks for one parameter point.

    Bound violations end up in the flags; only upstream failures raise, tagged
    with the stage that failed.
    """
    sol = _stage("scattering", solve_amplitudes, params)
    dens = _stage("position_entropy", position_density, sol)
    s_x = _stage("position_entropy", entropy_position, dens)
    bound = sx_lower_bound(dens)

    entries = []
    for n in windows:
        window = WindowSpec(int(n))
        amp = _stage("momentum_entropy", windowed_ft, sol, window)
        ints = _stage("momentum_entropy", momentum_integrals, MomentumDensity(amp), spec)
        entries.append(WindowEntry(window.n_periods, ints.entropy, ints.entropy_error,
                                   dens.window_mass(window), ints.mass))

    sums = {w.n_periods: s_x + w.s_p for w in entries}
    flags = ReportFlags(
        positivity_ok=dens.alpha - dens.beta > 0,
        sx_bound_ok=s_x >= bound - BOUND_SLACK,
        sum_bound_ok={n: s >= bound - BOUND_SLACK for n, s in sums.items()},
        bbm_ok={n: s >= BBM_CONSTANT - BOUND_SLACK for n, s in sums.items()},
        normalized_bbm_ok={w.n_periods: sums[w.n_periods] + w.convention_delta >= BBM_CONSTANT - BOUND_SLACK
                           for w in entries},
        s_p_positive={w.n_periods: w.s_p > 0 for w in entries},
        flux_residual=flux_residual(sol),
    )
    return EntropyReport(params, s_x, tuple(entries), bound, flags)

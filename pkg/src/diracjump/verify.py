"""Built-in invariant checks run by ``diracjump verify``.

Each group returns a :class:`GroupResult`; numerical failures inside a group
(for instance an unreachable tolerance) count as a failed group rather than
aborting the run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DiracJumpError
from .medium import MediumParams
from .momentum_entropy import MomentumDensity, fft_oracle, momentum_integrals, oracle_deviation, windowed_ft
from .position_entropy import (WindowSpec, entropy_position, position_density, sandwich_check,
                               sx_lower_bound)
from .quadrature import QuadSpec, gaussian_calibration
from .scattering import flux_residual, matching_matrix, solve_amplitudes

SEED = 20240917


@dataclass(frozen=True)
class GroupResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<12} {self.detail}"


def random_params(rng: np.random.Generator, n: int, a_range=2.0) -> list[MediumParams]:
    """Propagating parameter draws: masses in [0, 3], v_F in [0.7, 2], E above both gaps.

    |a / v_F| stays below 3: det M = cosh^2 - sinh^2 is computed from rounded
    entries, so its error grows like eps * cosh^2(a / v_F).
    """
    out = []
    for _ in range(n):
        m_l, m_r = rng.uniform(0.0, 3.0, 2)
        v = rng.uniform(0.7, 2.0)
        gap = max(m_l, m_r) * v * v
        energy = gap + rng.uniform(0.05, 3.0) * max(gap, 0.5)
        out.append(MediumParams(m_l, m_r, v, rng.uniform(-a_range, a_range), energy))
    return out


def canned_grid() -> list[MediumParams]:
    """200 points: 5 mass ratios x 8 energies x 5 interaction strengths at m_l = v_F = 1."""
    points = []
    for ratio in (0.25, 0.5, 1.0, 2.0, 4.0):
        gap = max(1.0, ratio)
        for rel in np.geomspace(0.02, 3.0, 8):
            for a in np.linspace(-2.0, 2.0, 5):
                points.append(MediumParams(1.0, ratio, 1.0, float(a), gap * (1 + rel)))
    return points


def _determinant(spec):
    worst = 0.0
    for p in random_params(np.random.default_rng(SEED), 1000):
        worst = max(worst, abs(matching_matrix(p).det - 1))
    return worst < 1e-12, f"max |det M - 1| = {worst:.2e} over 1000 draws"


def _residuals(spec):
    worst_res = worst_flux = 0.0
    for p in random_params(np.random.default_rng(SEED + 1), 300):
        sol = solve_amplitudes(p)
        worst_res = max(worst_res, sol.residual)
        worst_flux = max(worst_flux, flux_residual(sol))
    ok = worst_res <= 1e-12 and worst_flux <= 1e-12
    return ok, f"max matching residual {worst_res:.2e}, max flux residual {worst_flux:.2e}"


def _parseval(spec):
    worst = 0.0
    for p in random_params(np.random.default_rng(SEED + 2), 3):
        sol = solve_amplitudes(p)
        dens = position_density(sol)
        for n in (4, 8):
            ints = momentum_integrals(MomentumDensity(windowed_ft(sol, WindowSpec(n))), spec)
            mass = dens.window_mass(WindowSpec(n))
            worst = max(worst, abs(ints.mass - mass) / mass)
    return worst < 1e-8, f"max relative Parseval gap {worst:.2e} (N = 4, 8)"


def _fft(spec):
    worst = 0.0
    window = WindowSpec(8, 256)
    for p in random_params(np.random.default_rng(SEED + 3), 5):
        sol = solve_amplitudes(p)
        worst = max(worst, oracle_deviation(fft_oracle(sol, window), windowed_ft(sol, window)))
    return worst < 1e-6, f"max windowed-FT vs FFT deviation {worst:.2e} (N = 8)"


def _gaussian(spec):
    target = 1 + math.log(math.pi)
    worst = 0.0
    for sigma in (0.3, 1.0, 10.0):
        worst = max(worst, abs(gaussian_calibration(sigma, spec)[2] - target))
    return worst < 1e-6, f"max |S_x + S_p - (1 + ln pi)| = {worst:.2e}"


def _sandwich(spec):
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    flagged = 0
    for _ in range(50):
        alpha = rng.uniform(1.0, 5.0)
        beta = alpha * rng.uniform(0.0, 0.99)
        rep = sandwich_check(alpha, beta, spec)
        worst = max(worst, abs(rep.total - rep.full_period) / max(1.0, abs(rep.full_period)))
        flagged += not rep.ok
    # bracket violations are reported, only the quarter-sum identity is asserted
    return worst < 1e-10, f"quarter sum vs period closed form {worst:.2e}; {flagged}/50 bracket violations"


def _sx_bound(spec):
    worst = math.inf
    bad = 0
    for p in canned_grid():
        dens = position_density(solve_amplitudes(p))
        margin = entropy_position(dens, spec=spec) - sx_lower_bound(dens)
        worst = min(worst, margin)
        bad += margin < -1e-9
    return bad == 0, f"{bad} violations on 200 points, min margin {worst:.3e}"


GROUPS: dict[str, Callable] = {
    "determinant": _determinant,
    "residuals": _residuals,
    "parseval": _parseval,
    "fft": _fft,
    "gaussian": _gaussian,
    "sandwich": _sandwich,
    "sx_bound": _sx_bound,
}


def run_group(name: str, spec: QuadSpec | None = None) -> GroupResult:
    try:
        ok, detail = GROUPS[name](spec)
    except DiracJumpError as exc:
        return GroupResult(name, False, f"{type(exc).__name__}: {exc}")
    return GroupResult(name, bool(ok), detail)


def run_verify(groups=None, spec: QuadSpec | None = None) -> list[GroupResult]:
    return [run_group(name, spec) for name in (groups or GROUPS)]

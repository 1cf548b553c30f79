"""Position-space density of the scattering state and its Shannon entropy.

For x < 0 the density is alpha + beta cos(2 k_l x - theta), for x > 0 it is a
constant plateau.  Entropies use the ratio convention
S = -(integral rho ln rho) / (integral rho) over windows whose half-length is
an integer number N of left-density periods pi/k_l on each side of the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .quadrature import QuadSpec, integrate, integrate_many, xlogx
from .scattering import ScatteringSolution


@dataclass(frozen=True)
class WindowSpec:
    n_periods: int
    samples_per_period: int = 256

    def __post_init__(self):
        if int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise DomainError(f"n_periods must be a positive integer, got {self.n_periods!r}")
        if int(self.samples_per_period) != self.samples_per_period or self.samples_per_period < 16:
            raise DomainError(f"samples_per_period must be an integer >= 16, got {self.samples_per_period!r}")

    def half_length(self, k_l: float) -> float:
        return self.n_periods * math.pi / k_l


@dataclass(frozen=True)
class PositionDensity:
    alpha: float
    beta: float
    theta: float
    plateau: float
    k_l: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        left = self.alpha + self.beta * np.cos(2 * self.k_l * x - self.theta)
        return np.where(x < 0, left, self.plateau)

    @property
    def period(self) -> float:
        return math.pi / self.k_l

    def window_mass(self, window: WindowSpec) -> float:
        # the oscillating term integrates to zero over whole periods
        return window.half_length(self.k_l) * (self.alpha + self.plateau)


_POSITION_QUAD = QuadSpec(abs_tol=1e-14, rel_tol=1e-13)


def position_density(sol: ScatteringSolution) -> PositionDensity:
    if not sol.propagating:
        raise DomainError("position entropy needs a propagating transmitted wave")
    r = abs(sol.r1)
    al2 = sol.alpha_l**2
    alpha = (1 + r * r) * (1 + al2)
    beta = 2 * r * (1 - al2)
    plateau = abs(sol.t1) ** 2 * (1 + sol.alpha_r**2)
    theta = math.atan2(sol.r1.imag, sol.r1.real) if r > 0 else 0.0
    if not alpha - beta > 0:
        raise DomainError(f"density touches zero: alpha={alpha}, beta={beta}")
    return PositionDensity(alpha, beta, theta, plateau, sol.k_l)


def period_avg_closed_form(alpha: float, beta: float) -> float:
    """(1/2pi) int_0^{2pi} (alpha + beta cos u) ln(alpha + beta cos u) du in closed form."""
    _check_alpha_beta(alpha, beta)
    s = math.sqrt((alpha - abs(beta)) * (alpha + abs(beta)))
    return alpha * math.log((alpha + s) / 2) + (alpha - s)


def _check_alpha_beta(alpha, beta):
    if not alpha > abs(beta):
        raise DomainError(f"need alpha > |beta| for a strictly positive density (alpha={alpha}, beta={beta})")


def period_avg_entropy_integrand(alpha: float, beta: float, spec: QuadSpec | None = None) -> float:
    """Period average of rho ln rho for rho = alpha + beta cos u, by quadrature.

    The result is checked against the closed form; a disagreement larger than
    the quadrature can explain raises :class:`AccuracyError`.
    """
    _check_alpha_beta(alpha, beta)
    if beta == 0:
        return alpha * math.log(alpha)
    spec = spec or _POSITION_QUAD
    try:
        res = integrate(lambda u: xlogx(alpha + beta * np.cos(u)), 0.0, 2 * math.pi, spec,
                        breakpoints=(math.pi / 2, math.pi, 1.5 * math.pi))
    except AccuracyError as exc:
        raise AccuracyError(f"period average of rho ln rho: {exc}", estimate=exc.estimate,
                            error=exc.error) from None
    value = res.value / (2 * math.pi)
    exact = period_avg_closed_form(alpha, beta)
    slack = max(100 * res.error / (2 * math.pi), 1e-12 * max(1.0, abs(exact)))
    if abs(value - exact) > slack:
        raise AccuracyError(
            f"period average {value!r} disagrees with closed form {exact!r}",
            estimate=value,
            error=abs(value - exact),
        )
    return value


def entropy_position(dens: PositionDensity, window: WindowSpec | None = None,
                     spec: QuadSpec | None = None) -> float:
    """S_x in the ratio convention; the window cancels between numerator and norm."""
    avg = period_avg_entropy_integrand(dens.alpha, dens.beta, spec)
    p = dens.plateau
    return -(avg + p * math.log(p)) / (dens.alpha + p)


def entropy_position_window(dens: PositionDensity, window: WindowSpec,
                            spec: QuadSpec | None = None) -> float:
    """S_x from direct quadrature of rho ln rho and rho over the whole window."""
    spec = spec or _POSITION_QUAD
    half = window.half_length(dens.k_l)
    edges = -half + 0.5 * dens.period * np.arange(2 * window.n_periods + 1)
    mass, ent = integrate_many(lambda x: np.stack([dens(x), xlogx(dens(x))]), -half, 0.0, spec,
                               breakpoints=edges)
    p = dens.plateau
    return -(ent.value + half * p * math.log(p)) / (mass.value + half * p)


def entropy_position_normalized(dens: PositionDensity, window: WindowSpec,
                                spec: QuadSpec | None = None) -> float:
    """Differential entropy of rho / (window mass) on [-L, L], by direct quadrature."""
    spec = spec or _POSITION_QUAD
    half = window.half_length(dens.k_l)
    mass = dens.window_mass(window)
    edges = -half + dens.period * np.arange(window.n_periods + 1)
    left = integrate(lambda x: xlogx(dens(x) / mass), -half, 0.0, spec, breakpoints=edges)
    right = half * xlogx(dens.plateau / mass)
    value = -(left.value + float(right))
    expected = entropy_position(dens) + math.log(mass)
    if abs(value - expected) > 1e-9:
        raise AccuracyError(
            f"normalized entropy {value!r} breaks the identity S_x + ln(mass) = {expected!r}",
            estimate=value,
            error=abs(value - expected),
        )
    return value


def sx_lower_bound(dens: PositionDensity) -> float:
    """Analytic lower bound on S_x from sandwiching the period integral."""
    a, b, p = dens.alpha, dens.beta, dens.plateau
    num = 0.5 * a * math.log(a) + 0.5 * (a + b) * math.log(a + b) + p * math.log(p)
    return -num / (a + p)


@dataclass(frozen=True)
class SandwichBracket:
    name: str
    value: float
    lower: float
    upper: float

    @property
    def lower_margin(self) -> float:
        return self.value - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.value

    @property
    def ok(self) -> bool:
        return self.lower_margin >= -1e-12 and self.upper_margin >= -1e-12


@dataclass(frozen=True)
class SandwichReport:
    alpha: float
    beta: float
    brackets: tuple[SandwichBracket, ...]
    total: float
    full_period: float

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.brackets)

    @property
    def violations(self) -> list[str]:
        return [b.name for b in self.brackets if not b.ok]


def sandwich_check(alpha: float, beta: float, spec: QuadSpec | None = None) -> SandwichReport:
    """Quarter-period integrals I1+-, I2+- against their bracketing constants.

    Violations are reported, not raised: the I- brackets rely on t ln t being
    monotone on [alpha - beta, alpha], which fails once alpha - beta < 1/e.
    """
    if not alpha > beta >= 0:
        raise DomainError(f"need alpha > beta >= 0 (alpha={alpha}, beta={beta})")
    spec = spec or _POSITION_QUAD
    q = math.pi / 2
    phi = lambda t: t * math.log(t) if t > 0 else 0.0

    def quarter(sign, trig):
        return integrate(lambda x: xlogx(alpha + sign * beta * trig(x)), 0.0, q, spec).value

    low_plus, high_plus = q * phi(alpha), q * phi(alpha + beta)
    low_minus, high_minus = q * phi(alpha - beta), q * phi(alpha)
    brackets = (
        SandwichBracket("I1+", quarter(1, np.cos), low_plus, high_plus),
        SandwichBracket("I1-", quarter(-1, np.cos), low_minus, high_minus),
        SandwichBracket("I2+", quarter(1, np.sin), low_plus, high_plus),
        SandwichBracket("I2-", quarter(-1, np.sin), low_minus, high_minus),
    )
    total = math.fsum(b.value for b in brackets)
    full = 2 * math.pi * period_avg_closed_form(alpha, beta)
    return SandwichReport(alpha, beta, brackets, total, full)

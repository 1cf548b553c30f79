"""Matching matrix at the origin and reflection/transmission amplitudes.

The scattering state is

    x < 0:  (1, alpha_l) e^{i k_l x} + r1 (1, -alpha_l) e^{-i k_l x}
    x > 0:  t1 (1, alpha_r) e^{i k_r x}

and the boundary spinors are tied by psi(0+) = M psi(0-).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError
from .medium import MediumParams, Regime, decay_rate, spinor_ratio, wavenumber


@dataclass(frozen=True)
class MatchingMatrix:
    entries: np.ndarray
    params: MediumParams

    @property
    def det(self) -> complex:
        m = self.entries
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


@dataclass(frozen=True)
class ScatteringSolution:
    params: MediumParams
    r1: complex
    t1: complex
    k_l: float
    k_r: complex
    alpha_l: float
    alpha_r: complex
    residual: float
    regime: Regime

    @property
    def propagating(self) -> bool:
        return self.regime is Regime.PROPAGATING

    def psi_left_boundary(self) -> np.ndarray:
        return np.array([1 + self.r1, self.alpha_l * (1 - self.r1)])

    def psi_right_boundary(self) -> np.ndarray:
        return np.array([self.t1, self.t1 * self.alpha_r])

    def psi(self, x) -> np.ndarray:
        """Two-component wavefunction at positions ``x``; shape (2, *x.shape)."""
        x = np.asarray(x, dtype=float)
        left = x < 0
        inc = np.exp(1j * self.k_l * x)
        ref = self.r1 * np.exp(-1j * self.k_l * x)
        tra = self.t1 * np.exp(1j * self.k_r * np.where(left, 0.0, x))
        up = np.where(left, inc + ref, tra)
        down = np.where(left, self.alpha_l * (inc - ref), self.alpha_r * tra)
        return np.stack([up, down])


def lambda_factor(params: MediumParams) -> float:
    """((1 + m_r^2 v^4)/(1 + m_l^2 v^4))^(1/4), the diagonal asymmetry of M."""
    v4 = params.v_F**4
    return ((1 + params.m_r**2 * v4) / (1 + params.m_l**2 * v4)) ** 0.25


def matching_matrix(params: MediumParams) -> MatchingMatrix:
    lam = lambda_factor(params)
    c = math.cosh(params.a / params.v_F)
    s = math.sinh(params.a / params.v_F)
    entries = np.array([[lam * c, 1j * s], [-1j * s, c / lam]], dtype=complex)
    return MatchingMatrix(entries, params)


def _right_lead(params: MediumParams):
    if params.regime is Regime.PROPAGATING:
        return (
            complex(wavenumber(params.m_r, params.v_F, params.E)),
            complex(spinor_ratio(params.m_r, params.v_F, params.E)),
        )
    # k_r = i kappa picks the branch decaying into x > 0; the spinor ratio
    # follows from (E - m v^2) = v k alpha for the plane-wave ansatz.
    kappa = decay_rate(params.m_r, params.v_F, params.E)
    k_r = 1j * kappa
    return k_r, (params.E - params.gap_r) / (params.v_F * k_r)


def solve_amplitudes(params: MediumParams) -> ScatteringSolution:
    regime = params.regime
    if regime is Regime.INVALID:
        raise DomainError(
            f"no incoming propagating wave for {params.as_dict()}: need E > m_l v_F^2 "
            "and E != m_r v_F^2"
        )
    k_l = wavenumber(params.m_l, params.v_F, params.E)
    alpha_l = spinor_ratio(params.m_l, params.v_F, params.E)
    k_r, alpha_r = _right_lead(params)

    m = matching_matrix(params).entries
    # Unknowns (r1, t1):  t1 (1, alpha_r) = M [(1, alpha_l) + r1 (1, -alpha_l)]
    lhs = np.array(
        [
            [-(m[0, 0] - m[0, 1] * alpha_l), 1.0],
            [-(m[1, 0] - m[1, 1] * alpha_l), alpha_r],
        ],
        dtype=complex,
    )
    rhs = np.array([m[0, 0] + m[0, 1] * alpha_l, m[1, 0] + m[1, 1] * alpha_l])
    if np.linalg.cond(lhs) > 1e14:
        raise SolverError(f"matching system is singular for {params.as_dict()}")
    r1, t1 = np.linalg.solve(lhs, rhs)

    psi_minus = np.array([1 + r1, alpha_l * (1 - r1)])
    psi_plus = np.array([t1, t1 * alpha_r])
    residual = float(np.linalg.norm(psi_plus - m @ psi_minus))
    return ScatteringSolution(
        params=params,
        r1=complex(r1),
        t1=complex(t1),
        k_l=k_l,
        k_r=k_r if regime is Regime.RIGHT_EVANESCENT else k_r.real,
        alpha_l=alpha_l,
        alpha_r=alpha_r if regime is Regime.RIGHT_EVANESCENT else alpha_r.real,
        residual=residual,
        regime=regime,
    )


def closed_form_no_potential(params: MediumParams) -> tuple[float, float]:
    """r1, t1 at a = 0 by direct elimination of the 2x2 system."""
    if params.a != 0:
        raise DomainError("closed form only holds for a = 0")
    lam = lambda_factor(params)
    al = spinor_ratio(params.m_l, params.v_F, params.E)
    ar = spinor_ratio(params.m_r, params.v_F, params.E)
    den = al + lam**2 * ar
    return (al - lam**2 * ar) / den, 2 * lam * al / den


def flux_residual(sol: ScatteringSolution) -> float:
    """|j_in - j_reflected - j_transmitted| with j proportional to psi^dagger sigma_x psi."""
    left = sol.alpha_l * (1 - abs(sol.r1) ** 2)
    if not sol.propagating:
        return abs(left)
    return abs(left - sol.alpha_r * abs(sol.t1) ** 2)

"""Physical parameters of the mass-jump medium and the free Dirac dispersion.

Units: hbar = 1 throughout, all quantities dimensionless.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


class Regime(str, enum.Enum):
    PROPAGATING = "propagating"
    RIGHT_EVANESCENT = "right-evanescent"
    INVALID = "invalid"


@dataclass(frozen=True)
class MediumParams:
    """Left/right masses, common Fermi velocity, point-interaction strength, energy.

    ``v_l`` and ``v_r`` are accepted only as aliases of ``v_F``; the matching
    condition used downstream is defined for a single Fermi velocity.
    """

    m_l: float
    m_r: float
    v_F: float
    a: float
    E: float
    v_l: float | None = None
    v_r: float | None = None

    def __post_init__(self):
        for name in ("m_l", "m_r", "v_F", "a", "E"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.m_l < 0 or self.m_r < 0:
            raise DomainError(f"masses must be non-negative (m_l={self.m_l}, m_r={self.m_r})")
        if self.v_F <= 0:
            raise DomainError(f"v_F must be positive, got {self.v_F}")
        for name in ("v_l", "v_r"):
            value = getattr(self, name)
            if value is not None and value != self.v_F:
                raise DomainError(
                    f"{name}={value} differs from v_F={self.v_F}; only a single Fermi "
                    "velocity is supported by the matching condition"
                )

    @property
    def gap_l(self) -> float:
        return self.m_l * self.v_F**2

    @property
    def gap_r(self) -> float:
        return self.m_r * self.v_F**2

    @property
    def regime(self) -> Regime:
        if not self.E > self.gap_l:
            return Regime.INVALID
        if self.E > self.gap_r:
            return Regime.PROPAGATING
        if self.E < self.gap_r:
            return Regime.RIGHT_EVANESCENT
        return Regime.INVALID

    def as_dict(self) -> dict:
        return {"m_l": self.m_l, "m_r": self.m_r, "v_F": self.v_F, "a": self.a, "E": self.E}


def wavenumber(mass: float, v: float, E: float) -> float:
    """Positive root of E^2 = (k v)^2 + (m v^2)^2."""
    gap = mass * v * v
    if E <= gap:
        decay = math.sqrt(max(gap * gap - E * E, 0.0)) / v
        raise DomainError(
            f"E={E} is not above the mass gap m v^2={gap}; evanescent with decay rate {decay}",
            decay_rate=decay,
        )
    # (E - gap)(E + gap) avoids cancellation just above threshold
    return math.sqrt((E - gap) * (E + gap)) / v


def spinor_ratio(mass: float, v: float, E: float) -> float:
    """Lower/upper component ratio sqrt((E - m v^2)/(E + m v^2)) of a right-moving spinor."""
    gap = mass * v * v
    if E <= gap:
        raise DomainError(f"E={E} is not above the mass gap m v^2={gap}")
    return math.sqrt((E - gap) / (E + gap))


def decay_rate(mass: float, v: float, E: float) -> float:
    """kappa = sqrt(m^2 v^4 - E^2)/v for |E| below the gap."""
    gap = mass * v * v
    if abs(E) >= gap:
        raise DomainError(f"|E|={abs(E)} is not below the mass gap {gap}")
    return math.sqrt((gap - E) * (gap + E)) / v

"""Momentum-space amplitude, density and Shannon entropy of the scattering state.

Transform convention: phi(p) = (2 pi)^{-1/2} int psi(x) e^{-i p x} dx.

The full-line ("formal") transform of the plane-wave scattering state is a
rational function with poles at the lead momenta, and its density is not
integrable.  Entropies are therefore taken on the windowed state, psi truncated
to [-L, L] with L = N pi / k_l, whose transform is an entire function built from
finite-interval plane-wave pieces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import AccuracyError, DomainError, PoleProximityError, RegularizationError, ResolutionError
from .fourier import fourier_integral_fft
from .position_entropy import WindowSpec
from .quadrature import QuadSpec, integrate_many, xlogx
from .scattering import ScatteringSolution

SQRT_2PI = math.sqrt(2 * math.pi)
POLE_GUARD = 1e-6

MOMENTUM_QUAD = QuadSpec(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=200000)


@dataclass(frozen=True)
class WavePiece:
    """coef * e^{i q x} restricted to [x0, x1]; coef is a two-component spinor."""

    coef: tuple[complex, complex]
    q: float
    x0: float
    x1: float

    def transform(self, p):
        p = np.asarray(p, dtype=float)
        d = self.q - p
        h = 0.5 * (self.x1 - self.x0)
        mid = 0.5 * (self.x1 + self.x0)
        # (e^{i d x1} - e^{i d x0}) / (i d), written so that d -> 0 is regular
        shape = (self.x1 - self.x0) * np.sinc(d * h / np.pi) * np.exp(1j * d * mid) / SQRT_2PI
        return np.stack([self.coef[0] * shape, self.coef[1] * shape])


@dataclass(frozen=True)
class MomentumAmplitude:
    """Two-component momentum amplitude p -> (phi_1(p), phi_2(p)).

    ``kind`` is "formal" (full-line, poles), "windowed" (finite pieces) or
    "analytic" (any other closed-form evaluator).
    """

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    poles: tuple[float, ...] = ()
    n_periods: int | None = None
    pieces: tuple[WavePiece, ...] = ()
    base_length: float | None = None

    def __call__(self, p):
        return self.evaluator(np.asarray(p, dtype=float))


@dataclass(frozen=True)
class MomentumDensity:
    source: MomentumAmplitude

    def __call__(self, p):
        amp = self.source(p)
        return np.sum(amp.real**2 + amp.imag**2, axis=0)


@dataclass(frozen=True)
class MomentumIntegrals:
    mass: float
    mass_error: float
    xlogx: float
    xlogx_error: float
    cutoff: float

    @property
    def entropy(self) -> float:
        return -self.xlogx / self.mass

    @property
    def entropy_error(self) -> float:
        return (self.xlogx_error + abs(self.entropy) * self.mass_error) / self.mass


# --- formal (full-line) transform ------------------------------------------

def _require_propagating(sol):
    if not sol.propagating:
        raise DomainError("momentum analysis needs a propagating transmitted wave")


def formal_ft(sol: ScatteringSolution, convention: str = "definition") -> MomentumAmplitude:
    """Full-line transform of the scattering state, valid away from its poles.

    ``convention="definition"`` uses the e^{-ipx} kernel above (poles at
    +-k_l and +k_r).  ``convention="printed"`` is the same rational form with
    p -> -p (poles at +-k_l and -k_r), i.e. the e^{+ipx} kernel.
    """
    _require_propagating(sol)
    r, t, kl, kr = sol.r1, sol.t1, sol.k_l, sol.k_r
    al, ar = sol.alpha_l, sol.alpha_r
    guard = POLE_GUARD * max(kl, kr)
    pref = 1j / SQRT_2PI
    if convention == "definition":
        poles = (kl, -kl, kr)

        def raw(p):
            up = t / (kr - p) - 1 / (kl - p) + r / (kl + p)
            down = t * ar / (kr - p) - al / (kl - p) - al * r / (kl + p)
            return pref * np.stack([up, down])
    elif convention == "printed":
        poles = (kl, -kl, -kr)

        def raw(p):
            den = kl**2 - p**2
            up = t / (kr + p) + ((1 + r) * p - (1 - r) * kl) / den
            down = t * ar / (kr + p) + (al * (1 - r) * p - al * (1 + r) * kl) / den
            return pref * np.stack([up, down])
    else:
        raise ValueError(f"unknown convention {convention!r}")

    def evaluate(p):
        near = min(np.min(np.abs(p - pole)) for pole in poles) if p.size else np.inf
        if near < guard:
            raise PoleProximityError(f"momentum within {near:.3g} of a pole (guard {guard:.3g})")
        return raw(p)

    return MomentumAmplitude("formal", evaluate, poles=poles)


# --- windowed transform ----------------------------------------------------

def scattering_pieces(sol: ScatteringSolution, half_length: float) -> tuple[WavePiece, ...]:
    _require_propagating(sol)
    al, ar = sol.alpha_l, sol.alpha_r
    r, t = sol.r1, sol.t1
    return (
        WavePiece((1.0 + 0j, al + 0j), sol.k_l, -half_length, 0.0),
        WavePiece((r, -al * r), -sol.k_l, -half_length, 0.0),
        WavePiece((t, t * ar), sol.k_r, 0.0, half_length),
    )


def plane_wave_ft(pieces, base_length: float, n_periods: int | None = None) -> MomentumAmplitude:
    """Closed-form transform of a sum of finite plane-wave pieces.

    Every piece endpoint must be an integer multiple of ``base_length``; the
    momentum tails rely on that commensurability.
    """
    pieces = tuple(pieces)
    for pc in pieces:
        for x in (pc.x0, pc.x1):
            n = x / base_length
            if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
                raise DomainError(f"endpoint {x} is not a multiple of base length {base_length}")

    coefs = np.array([pc.coef for pc in pieces], dtype=complex).T  # (2, pieces)
    q = np.array([pc.q for pc in pieces])
    half = 0.5 * np.array([pc.x1 - pc.x0 for pc in pieces])
    mid = 0.5 * np.array([pc.x1 + pc.x0 for pc in pieces])

    def evaluate(p):
        flat = p.reshape(-1)
        d = q[:, None] - flat[None, :]
        # same sinc form as WavePiece.transform, batched over pieces
        shape = (2 * half[:, None]) * np.sinc(d * half[:, None] / np.pi) * np.exp(1j * d * mid[:, None])
        return (coefs @ shape / SQRT_2PI).reshape((2,) + p.shape)

    return MomentumAmplitude("windowed", evaluate, n_periods=n_periods, pieces=pieces,
                             base_length=base_length)


def windowed_ft(sol: ScatteringSolution, window: WindowSpec) -> MomentumAmplitude:
    half = window.half_length(sol.k_l)
    return plane_wave_ft(scattering_pieces(sol, half), half, n_periods=window.n_periods)


def cesaro_windowed_ft(sol: ScatteringSolution, p, n_max: int) -> np.ndarray:
    """Mean of the windowed transforms for N = 1..n_max; tends to the formal one."""
    p = np.asarray(p, dtype=float)
    total = np.zeros((2,) + p.shape, dtype=complex)
    for n in range(1, n_max + 1):
        total += windowed_ft(sol, WindowSpec(n))(p)
    return total / n_max


# --- FFT oracle ------------------------------------------------------------

@dataclass(frozen=True)
class OracleTable:
    p: np.ndarray
    amplitude: np.ndarray  # (2, len(p))


def fft_oracle(sol: ScatteringSolution, window: WindowSpec) -> OracleTable:
    """Sample psi on the window and transform each half with the FFT.

    The two halves are transformed separately because psi jumps at the origin.
    """
    _require_propagating(sol)
    spp = window.samples_per_period
    dx = math.pi / (sol.k_l * spp)
    nyquist = math.pi / dx
    if max(sol.k_l, sol.k_r) >= nyquist:
        raise ResolutionError(
            f"lead momenta up to {max(sol.k_l, sol.k_r):.4g} alias at {spp} samples per period "
            f"(Nyquist {nyquist:.4g})"
        )
    m = window.n_periods * spp
    half = window.half_length(sol.k_l)
    r, t, kl, kr = sol.r1, sol.t1, sol.k_l, sol.k_r

    x_left = -half + dx * np.arange(m + 1)
    x_left[-1] = 0.0
    inc = np.exp(1j * kl * x_left)
    ref = r * np.exp(-1j * kl * x_left)
    left = np.stack([inc + ref, sol.alpha_l * (inc - ref)])

    x_right = dx * np.arange(m + 1)
    x_right[-1] = half
    tra = t * np.exp(1j * kr * x_right)
    right = np.stack([tra, sol.alpha_r * tra])

    p, left_ft = fourier_integral_fft(left, -half, dx)
    _, right_ft = fourier_integral_fft(right, 0.0, dx)
    amp = (left_ft + right_ft) / SQRT_2PI
    order = np.argsort(p, kind="stable")
    return OracleTable(p[order], amp[:, order])


def oracle_deviation(table: OracleTable, amplitude: MomentumAmplitude, central_fraction=0.8) -> float:
    """Max |oracle - amplitude| on the central part of the grid, relative to max |amplitude|."""
    exact = amplitude(table.p)
    scale = np.max(np.sqrt(np.sum(np.abs(exact) ** 2, axis=0)))
    central = np.abs(table.p) <= central_fraction * np.max(np.abs(table.p))
    diff = np.abs(table.amplitude - exact)[:, central]
    return float(np.max(diff) / scale)


# --- momentum integrals ----------------------------------------------------

_TAIL_THETA = 1024
_TAIL_NODES = 48


def _endpoint_weights(amp: MomentumAmplitude):
    """Group piece endpoints: phi(p) = sum_n e^{-i p n l} sum_j w_j / (q_j - p)."""
    groups: dict[int, list[tuple[np.ndarray, float]]] = {}
    for pc in amp.pieces:
        c = np.array(pc.coef, dtype=complex)
        for x, sign in ((pc.x1, 1.0), (pc.x0, -1.0)):
            n = int(round(x / amp.base_length))
            w = sign * c * np.exp(1j * pc.q * x) / (1j * SQRT_2PI)
            groups.setdefault(n, []).append((w, pc.q))
    return groups


def _scaled_profile(groups, sign, s, theta):
    """F(theta, s) = p^2 rho(p) at p = sign / s with |p| l = theta (mod 2 pi)."""
    total = np.zeros((2, s.size, theta.size), dtype=complex)
    for n, terms in groups.items():
        v = np.zeros((2, s.size), dtype=complex)
        for w, q in terms:
            v -= w[:, None] / (1.0 - q * sign * s)[None, :]
        total += v[:, :, None] * np.exp(-1j * n * sign * theta)[None, None, :]
    return np.sum(total.real**2 + total.imag**2, axis=0)


def _tail(groups, base, cutoff, sign, weight=1.0):
    """Integrals of rho and rho ln rho over |p| >= cutoff on one side.

    rho = s^2 F(|p| l, s) with s = 1/|p| slow and theta = |p| l fast.  The
    theta-average is integrated in s; the oscillating remainder is handled by
    three integrations by parts (boundary terms are clean because the cutoff is
    a multiple of 2 pi / l), and the size of the last one is the error estimate.
    Returns (values, errors), each of shape (2,).
    """
    theta = 2 * np.pi * np.arange(_TAIL_THETA) / _TAIL_THETA
    h = 1.0 / cutoff

    def integrand(s):
        f = weight * _scaled_profile(groups, sign, s, theta)
        return np.stack([f, xlogx(f) + np.log(s * s)[:, None] * f])

    def mean_part(nodes):
        x, w = leggauss(nodes)
        tau = 0.5 * (x + 1.0)
        # s = h tau^3 softens the ln s endpoint singularity
        s = h * tau**3
        ds = h * 1.5 * tau**2 * w
        return integrand(s).mean(axis=2) @ ds

    def coefficients(s):
        g = s * s * integrand(np.array([s]))[:, 0]
        return np.fft.fft(g, axis=-1) / _TAIL_THETA

    mean_value = mean_part(_TAIL_NODES)
    mean_check = mean_part(_TAIL_NODES // 2)
    freq = np.fft.fftfreq(_TAIL_THETA, 1.0 / _TAIL_THETA)
    nz = freq != 0
    iw = 1j * freq[nz] * base
    eps = 1e-3 * h
    c_lo, c_mid, c_hi = (coefficients(x)[:, nz] for x in (h - eps, h, h + eps))
    d1 = (c_hi - c_lo) / (2 * eps)
    d2 = (c_hi - 2 * c_mid + c_lo) / (eps * eps)
    # derivatives in p of u(p) = c(1/p) at p = cutoff
    u1 = -h * h * d1
    u2 = 2 * h**3 * d1 + h**4 * d2
    first = np.real(-np.sum(c_mid / iw, axis=-1))
    second = np.real(np.sum(u1 / iw**2, axis=-1))
    third = np.real(-np.sum(u2 / iw**3, axis=-1))
    value = mean_value + first + second + third
    error = np.abs(mean_value - mean_check) + np.abs(third)
    return value, error


def _cutoff(amp: MomentumAmplitude) -> float:
    base = amp.base_length
    period = 2 * np.pi / base
    q_max = max(abs(pc.q) for pc in amp.pieces)
    raw = max(q_max + 40 * period, 4 * q_max, period)
    return math.ceil(raw / period) * period


def momentum_integrals(dens: MomentumDensity, spec: QuadSpec | None = None,
                       weight: float = 1.0) -> MomentumIntegrals:
    """Integrals of rho and rho ln rho over the real line (``weight`` rescales rho)."""
    amp = dens.source
    if amp.kind == "formal":
        raise RegularizationError(
            "the full-line density has non-integrable double poles; use a windowed amplitude"
        )
    spec = spec or MOMENTUM_QUAD
    if amp.kind != "windowed":
        tail_spec = spec if spec.tail_strategy != "none" else replace(spec, tail_strategy="transform")
        mass, ent = integrate_many(lambda p: np.stack([weight * dens(p), xlogx(weight * dens(p))]),
                                   -math.inf, math.inf, tail_spec)
        return MomentumIntegrals(mass.value, mass.error, ent.value, ent.error, math.inf)

    groups = _endpoint_weights(amp)
    base = amp.base_length
    cutoff = _cutoff(amp)

    def both(p):
        rho = weight * dens(p)
        return np.stack([rho, xlogx(rho)])

    for _ in range(6):
        # two panels per oscillation of the fastest (e^{-2 i p l}) term
        step = 0.5 * np.pi / base
        count = int(round(2 * cutoff / step))
        edges = -cutoff + step * np.arange(count + 1)
        try:
            mass, ent = integrate_many(both, -cutoff, cutoff, spec, breakpoints=edges)
        except AccuracyError as exc:
            raise AccuracyError(f"integrals of rho and rho ln rho over [-{cutoff:.6g}, {cutoff:.6g}]: {exc}",
                                estimate=exc.estimate, error=exc.error) from None
        right_val, right_err = _tail(groups, base, cutoff, 1.0, weight)
        left_val, left_err = _tail(groups, base, cutoff, -1.0, weight)
        total = np.array([mass.value, ent.value]) + right_val + left_val
        tail_err = right_err + left_err
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if np.all(tail_err <= tol):
            return MomentumIntegrals(float(total[0]), mass.error + float(tail_err[0]),
                                     float(total[1]), ent.error + float(tail_err[1]), cutoff)
        cutoff *= 2
    raise AccuracyError(
        f"momentum tail error {float(np.max(tail_err)):.3e} exceeds tolerance {tol:.3e}",
        estimate=-float(total[1] / total[0]),
        error=float(np.max(tail_err)),
    )


def entropy_momentum(dens: MomentumDensity, spec: QuadSpec | None = None) -> float:
    """S_p = -(int rho ln rho)/(int rho) over the whole momentum line."""
    return momentum_integrals(dens, spec).entropy


def entropy_momentum_normalized(dens: MomentumDensity, spec: QuadSpec | None = None) -> float:
    """-int rho_hat ln rho_hat with rho_hat = rho / int rho, integrated afresh."""
    base = momentum_integrals(dens, spec)
    scaled = momentum_integrals(dens, spec, weight=1.0 / base.mass)
    value = -scaled.xlogx
    expected = base.entropy + math.log(base.mass)
    if abs(value - expected) > 1e-8:
        raise AccuracyError(
            f"normalized momentum entropy {value!r} breaks S_p + ln(mass) = {expected!r}",
            estimate=value,
            error=abs(value - expected),
        )
    return value

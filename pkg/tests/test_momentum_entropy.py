import math

import numpy as np
import pytest
from scipy import integrate as sci

from conftest import draw_params
from diracjump.errors import DomainError, PoleProximityError, RegularizationError, ResolutionError
from diracjump.medium import MediumParams
from diracjump.momentum_entropy import (MomentumAmplitude, MomentumDensity, WavePiece, cesaro_windowed_ft,
                                        entropy_momentum, entropy_momentum_normalized, fft_oracle, formal_ft,
                                        momentum_integrals, oracle_deviation, plane_wave_ft, windowed_ft)
from diracjump.position_entropy import WindowSpec, position_density
from diracjump.scattering import solve_amplitudes

SQRT_2PI = math.sqrt(2 * math.pi)


@pytest.fixture(scope="module")
def jump_solution():
    return solve_amplitudes(MediumParams(1.0, 1.6, 1.0, 0.4, 2.5))


def _quad_complex(f, a, b, **kw):
    re = sci.quad(lambda x: f(x).real, a, b, **kw)[0]
    im = sci.quad(lambda x: f(x).imag, a, b, **kw)[0]
    return re + 1j * im


def _damped_transform(sol, p, eta):
    """(2 pi)^-1/2 int psi(x) e^{-eta |x|} e^{-ipx} dx by brute-force quadrature."""
    x_max = 40.0 / eta
    out = []
    for comp in range(2):
        f = lambda x: sol.psi(np.array([x]))[comp, 0] * np.exp(-eta * abs(x) - 1j * p * x)
        total = sum(_quad_complex(f, lo, hi, limit=2000, epsabs=1e-13, epsrel=1e-12)
                    for lo, hi in ((-x_max, -1e-300), (0.0, x_max)))
        out.append(total / SQRT_2PI)
    return np.array(out)


# the far damped tail sits at the roundoff floor, which QUADPACK reports as a warning
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_formal_transform_matches_damped_limit(jump_solution):
    sol = jump_solution
    amp = formal_ft(sol)
    assert set(amp.poles) == {sol.k_l, -sol.k_l, sol.k_r}
    for p in (-3.1, 0.4, 3.3):
        etas = (0.04, 0.02, 0.01)
        vals = [_damped_transform(sol, p, e) for e in etas]
        # Richardson on the analytic expansion in eta
        limit = (8 * vals[2] - 6 * vals[1] + vals[0]) / 3
        np.testing.assert_allclose(amp(np.array([p]))[:, 0], limit, atol=2e-5)


def test_printed_convention_is_mirror_image(jump_solution):
    sol = jump_solution
    p = np.array([-3.3, -0.7, 0.2, 1.1, 3.9])
    printed = formal_ft(sol, "printed")
    assert set(printed.poles) == {sol.k_l, -sol.k_l, -sol.k_r}
    np.testing.assert_allclose(printed(p), formal_ft(sol)(-p), rtol=1e-13)
    with pytest.raises(ValueError):
        formal_ft(sol, "other")


def test_zero_jump_formal_transform_vanishes_off_pole():
    sol = solve_amplitudes(MediumParams(1, 1, 1, 0, 2))
    p = np.array([-2.0, 0.3, 1.0, 5.0])
    for conv in ("definition", "printed"):
        assert np.max(np.abs(formal_ft(sol, conv)(p))) < 1e-15


def test_pole_guard(jump_solution):
    amp = formal_ft(jump_solution)
    with pytest.raises(PoleProximityError):
        amp(np.array([0.0, jump_solution.k_l * (1 + 1e-9)]))
    amp(np.array([jump_solution.k_l * (1 + 1e-4)]))


def test_formal_density_needs_regularization(jump_solution):
    with pytest.raises(RegularizationError):
        entropy_momentum(MomentumDensity(formal_ft(jump_solution)))


def test_windowed_transform_matches_direct_quadrature(jump_solution):
    sol = jump_solution
    w = WindowSpec(3)
    half = w.half_length(sol.k_l)
    amp = windowed_ft(sol, w)
    assert amp.kind == "windowed" and amp.n_periods == 3
    for p in (-4.0, -sol.k_l, 0.0, 1.3, sol.k_r, 7.5):
        expect = []
        for comp in range(2):
            f = lambda x: sol.psi(np.array([x]))[comp, 0] * np.exp(-1j * p * x)
            expect.append((_quad_complex(f, -half, -1e-300, limit=500, epsabs=1e-14)
                           + _quad_complex(f, 0.0, half, limit=500, epsabs=1e-14)) / SQRT_2PI)
        np.testing.assert_allclose(amp(np.array([p]))[:, 0], expect, atol=1e-11)


def test_cesaro_mean_approaches_formal(jump_solution):
    sol = jump_solution
    p = np.array([-2.9, 0.5, 3.5])
    exact = formal_ft(sol)(p)
    err = [np.max(np.abs(cesaro_windowed_ft(sol, p, k) - exact)) for k in (10, 40, 160)]
    assert err[2] < err[1] < err[0]
    assert err[2] < 0.02


def test_parseval(rng):
    for params in draw_params(rng, 5):
        sol = solve_amplitudes(params)
        dens = position_density(sol)
        for n in (4, 8):
            w = WindowSpec(n)
            half = w.half_length(sol.k_l)
            direct = sci.quad(lambda x: float(dens(np.array([x]))[0]), -half, 0, limit=400,
                              epsabs=1e-13, epsrel=1e-13)[0] + half * dens.plateau
            ints = momentum_integrals(MomentumDensity(windowed_ft(sol, w)))
            assert abs(ints.mass - direct) / direct < 1e-8


def test_fft_oracle_agrees(rng):
    for params in draw_params(rng, 4):
        sol = solve_amplitudes(params)
        w = WindowSpec(8, 256)
        table = fft_oracle(sol, w)
        assert np.all(np.diff(table.p) > 0)
        assert oracle_deviation(table, windowed_ft(sol, w)) < 1e-6


def test_fft_oracle_plane_wave_peak():
    sol = solve_amplitudes(MediumParams(1, 1, 1, 0, 2))
    table = fft_oracle(sol, WindowSpec(4, 64))
    peak = table.p[np.argmax(np.abs(table.amplitude[0]))]
    assert peak == pytest.approx(sol.k_l, rel=1e-12)
    assert oracle_deviation(table, windowed_ft(sol, WindowSpec(4, 64))) < 1e-6


def test_fft_oracle_resolution_guard():
    sol = solve_amplitudes(MediumParams(1, 0, 1, 0, 1.001))
    with pytest.raises(ResolutionError):
        fft_oracle(sol, WindowSpec(2, 16))


def _sinc2_entropy_integral(periods=4000):
    """J = int g ln g du over the real line, g = (sin u / u)^2, by brute force."""
    g = lambda u: (math.sin(u) / u) ** 2 if u != 0 else 1.0
    gl = lambda u: g(u) * math.log(g(u)) if g(u) > 0 else 0.0
    half = math.fsum(sci.quad(gl, n * math.pi, (n + 1) * math.pi, epsabs=1e-15, epsrel=1e-13)[0]
                     for n in range(periods))
    upper = periods * math.pi
    c1 = sci.quad(lambda x: math.sin(x) ** 2 * math.log(math.sin(x) ** 2) if math.sin(x) else 0.0,
                  0, math.pi, epsabs=1e-15)[0] / math.pi
    # beyond U: <sin^2 ln sin^2> / u^2 - 2 <sin^2> ln u / u^2
    half += c1 / upper - (math.log(upper) + 1) / upper
    return 2 * half


@pytest.fixture(scope="module")
def sinc2_j():
    return _sinc2_entropy_integral()


@pytest.mark.parametrize("ell", [0.5, 2.0, 7.0])
def test_box_entropy_matches_sinc_oracle(ell, sinc2_j):
    box = plane_wave_ft([WavePiece((1.0, 0.0), 0.0, -ell, ell)], base_length=ell)
    s_p = entropy_momentum(MomentumDensity(box))
    expected = -math.log(2 * ell * ell / math.pi) - sinc2_j / math.pi
    assert s_p == pytest.approx(expected, abs=1e-7)


def test_commensurability_is_required():
    with pytest.raises(DomainError):
        plane_wave_ft([WavePiece((1.0, 0.0), 0.0, -1.0, 1.5)], base_length=1.0)


def test_normalized_identity(jump_solution):
    dens = MomentumDensity(windowed_ft(jump_solution, WindowSpec(4)))
    ints = momentum_integrals(dens)
    assert entropy_momentum_normalized(dens) == pytest.approx(ints.entropy + math.log(ints.mass), abs=1e-8)


def test_analytic_gaussian_amplitude():
    sigma_p = 0.7
    gauss = lambda p: np.stack([(2 * math.pi * sigma_p**2) ** -0.25 * np.exp(-p * p / (4 * sigma_p**2)),
                                np.zeros_like(p)])
    dens = MomentumDensity(MomentumAmplitude("analytic", gauss))
    assert entropy_momentum(dens) == pytest.approx(0.5 * math.log(2 * math.pi * math.e * sigma_p**2), abs=1e-10)


def test_zero_jump_entropy_and_window_trend():
    sol = solve_amplitudes(MediumParams(3, 3, 1, 0, 5))
    values = {n: momentum_integrals(MomentumDensity(windowed_ft(sol, WindowSpec(n)))) for n in (2, 4, 8, 16)}
    for ints in values.values():
        assert math.isfinite(ints.entropy) and ints.entropy_error < 1e-8
    # N = 8: the ratio-convention entropy of a long plane-wave window is negative
    assert values[8].entropy < 0
    trend = [values[n].entropy for n in (2, 4, 8, 16)]
    assert all(b < a for a, b in zip(trend, trend[1:]))
    # each doubling of the window concentrates the density: S_p drops by about ln 4
    assert trend[-2] - trend[-1] == pytest.approx(math.log(4), abs=0.05)

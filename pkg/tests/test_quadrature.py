import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from diracjump.errors import AccuracyError, DomainError
from diracjump.quadrature import (GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS, PowerLawTail, QuadSpec,
                                  gaussian_calibration, integrate, integrate_many, xlogx)

BBM = 1 + math.log(math.pi)


def test_gauss_weights_match_legendre():
    x, w = leggauss(7)
    np.testing.assert_allclose(KRONROD_NODES[1::2], x, atol=1e-15)
    np.testing.assert_allclose(GAUSS_WEIGHTS[1::2], w, atol=1e-15)
    assert np.all(GAUSS_WEIGHTS[::2] == 0)


def test_kronrod_rule_polynomial_exactness():
    for deg in range(23):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert KRONROD_WEIGHTS @ KRONROD_NODES**deg == pytest.approx(exact, abs=1e-14)
    # degree 24 is beyond 3n + 1 = 22 + 1
    assert abs(KRONROD_WEIGHTS @ KRONROD_NODES**24 - 2 / 25) > 1e-10


def test_smooth_integrals():
    assert abs(integrate(np.cos, 0, math.pi).value) < 1e-14
    assert integrate(np.exp, 0, 1).value == pytest.approx(math.e - 1, abs=1e-14)
    # int_0^{2pi} ln(2 + cos u) du = 2 pi ln((2 + sqrt 3) / 2)
    exact = 2 * math.pi * math.log((2 + math.sqrt(3)) / 2)
    assert integrate(lambda u: np.log(2 + np.cos(u)), 0, 2 * math.pi).value == pytest.approx(exact, abs=1e-13)


def test_reversed_and_empty_interval():
    assert integrate(np.exp, 1, 0).value == pytest.approx(1 - math.e, abs=1e-14)
    assert integrate(np.exp, 2, 2) == (0.0, 0.0)


def test_endpoint_kinks():
    # the shape rho ln rho takes where a density touches zero
    assert integrate(lambda x: xlogx(x), 0, 1, QuadSpec(1e-12, 1e-12)).value == pytest.approx(-0.25, abs=1e-11)
    assert integrate(np.sqrt, 0, 1, QuadSpec(1e-12, 1e-12)).value == pytest.approx(2 / 3, abs=1e-11)


def test_infinite_intervals():
    spec = QuadSpec(tail_strategy="transform")
    assert integrate(lambda x: np.exp(-x * x), -math.inf, math.inf, spec).value == pytest.approx(
        math.sqrt(math.pi), abs=1e-13)
    assert integrate(lambda x: 1 / (1 + x * x), 0, math.inf, spec).value == pytest.approx(math.pi / 2, abs=1e-13)
    assert integrate(lambda x: np.exp(x), -math.inf, 0, spec).value == pytest.approx(1, abs=1e-13)
    with pytest.raises(DomainError):
        integrate(np.exp, -math.inf, 0)


def test_power_law_tail_sinc_squared():
    # brute force: int sinc^2 = pi; the tail beyond c averages sin^2 to 1/2
    spec = QuadSpec(1e-12, 1e-12, tail_strategy=PowerLawTail(2.0, 200 * math.pi))
    f = lambda x: np.sinc(x / math.pi) ** 2
    res = integrate(f, -math.inf, math.inf, spec, breakpoints=np.arange(-200, 201) * math.pi)
    assert res.value == pytest.approx(math.pi, abs=1e-7)
    assert res.error < 1e-5


def test_power_law_validation():
    with pytest.raises(DomainError):
        PowerLawTail(1.0, 5.0)
    with pytest.raises(DomainError):
        PowerLawTail(2.0, -1.0)


def test_spec_validation():
    for bad in (dict(abs_tol=0), dict(rel_tol=-1), dict(max_subdivisions=2), dict(tail_strategy="magic")):
        with pytest.raises(DomainError):
            QuadSpec(**bad)


def test_unreachable_tolerance_raises_accuracy_error():
    with pytest.raises(AccuracyError) as info:
        integrate(np.cos, 0, 1, QuadSpec(1e-30, 1e-30, max_subdivisions=200))
    assert info.value.estimate == pytest.approx(math.sin(1), abs=1e-12)


def test_non_finite_integrand_rejected():
    with pytest.raises(DomainError):
        integrate(lambda x: np.where(x > 0.5, np.nan, x), 0, 1)


def test_integrate_many_shares_panels():
    mass, first = integrate_many(lambda x: np.stack([np.ones_like(x), x]), 0, 2)
    assert mass.value == pytest.approx(2) and first.value == pytest.approx(2)
    a = integrate(lambda x: np.sin(30 * x) ** 2, 0, 3)
    b, _ = integrate_many(lambda x: np.stack([np.sin(30 * x) ** 2, np.ones_like(x)]), 0, 3)
    assert a.value == pytest.approx(b.value, abs=1e-12)


def test_deterministic():
    f = lambda x: np.abs(np.sin(17 * x)) * np.log1p(x)
    runs = {integrate(f, 0, 7, QuadSpec(1e-13, 1e-13)) for _ in range(3)}
    assert len(runs) == 1


def test_xlogx_floor():
    out = xlogx(np.array([0.0, 1e-320, 1.0, math.e]))
    assert out[0] == 0 and out[1] == 0 and out[2] == 0
    assert out[3] == pytest.approx(math.e)


@pytest.mark.parametrize("sigma", [0.3, 1.0, 10.0])
def test_gaussian_calibration(sigma):
    s_x, s_p, total = gaussian_calibration(sigma)
    assert s_x == pytest.approx(0.5 * math.log(2 * math.pi * math.e * sigma**2), abs=1e-12)
    assert s_p == pytest.approx(0.5 * math.log(2 * math.pi * math.e / (4 * sigma**2)), abs=1e-12)
    assert abs(total - BBM) < 1e-9


def test_gaussian_calibration_scale_invariance():
    sums = [gaussian_calibration(s)[2] for s in np.geomspace(0.05, 50, 9)]
    assert max(sums) - min(sums) < 1e-9
    with pytest.raises(DomainError):
        gaussian_calibration(0.0)

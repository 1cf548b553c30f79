import math

import numpy as np
import pytest

from conftest import draw_params
from diracjump.errors import DomainError
from diracjump.medium import MediumParams, Regime
from diracjump.scattering import (closed_form_no_potential, flux_residual, lambda_factor, matching_matrix,
                                  solve_amplitudes)


def test_matching_matrix_examples():
    np.testing.assert_allclose(matching_matrix(MediumParams(1.3, 1.3, 1, 0, 3)).entries, np.eye(2), atol=1e-15)
    m = matching_matrix(MediumParams(0, 1, 1, 0, 3)).entries
    np.testing.assert_allclose(m, np.diag([2**0.25, 2**-0.25]), atol=1e-15)


def test_matching_matrix_structure(rng):
    for p in draw_params(rng, 200):
        m = matching_matrix(p)
        assert abs(m.det - 1) < 1e-12
        e = m.entries
        assert e[0, 1] == -e[1, 0]
        assert e[0, 1].real == 0 and e[1, 0].real == 0
        # the matrix conserves the current psi^dagger sigma_x psi
        sx = np.array([[0, 1], [1, 0]])
        np.testing.assert_allclose(e.conj().T @ sx @ e, sx, atol=1e-12 * np.abs(e).max() ** 2)


def test_zero_jump_is_transparent():
    sol = solve_amplitudes(MediumParams(0.7, 0.7, 1.2, 0.0, 4.0))
    assert abs(sol.r1) < 1e-15 and abs(sol.t1 - 1) < 1e-15


def test_closed_form_matches_solve(rng):
    for p in draw_params(rng, 50, a_range=0.0):
        sol = solve_amplitudes(p)
        r, t = closed_form_no_potential(p)
        assert abs(sol.r1 - r) < 1e-13 and abs(sol.t1 - t) < 1e-13
        assert flux_residual(sol) < 1e-13


def test_closed_form_requires_zero_potential():
    with pytest.raises(DomainError):
        closed_form_no_potential(MediumParams(1, 2, 1, 0.1, 3))


def test_residual_and_flux_bound(rng):
    for p in draw_params(rng, 300):
        sol = solve_amplitudes(p)
        assert sol.residual < 1e-12
        assert abs(sol.r1) <= 1 + 1e-12
        assert flux_residual(sol) < 1e-12
        np.testing.assert_allclose(sol.psi_right_boundary(),
                                   matching_matrix(p).entries @ sol.psi_left_boundary(), atol=1e-12)


def test_potential_sign_conjugates_amplitudes(rng):
    for p in draw_params(rng, 100):
        flipped = MediumParams(p.m_l, p.m_r, p.v_F, -p.a, p.E)
        s1, s2 = solve_amplitudes(p), solve_amplitudes(flipped)
        assert abs(s2.r1 - s1.r1.conjugate()) < 1e-12
        assert abs(s2.t1 - s1.t1.conjugate()) < 1e-12


def test_amplitudes_continuous_in_a_and_e():
    grid = np.linspace(-2, 2, 401)
    r = np.array([solve_amplitudes(MediumParams(1, 2, 1, a, 3.0)).r1 for a in grid])
    assert np.max(np.abs(np.diff(r))) < 5 * (grid[1] - grid[0])
    energies = np.linspace(2.05, 6, 400)
    t = np.array([solve_amplitudes(MediumParams(1, 2, 1, 0.5, e)).t1 for e in energies])
    assert np.max(np.abs(np.diff(t))) < 0.05


def test_evanescent_regime():
    sol = solve_amplitudes(MediumParams(0, 1, 1, 0.3, 0.5))
    assert sol.regime is Regime.RIGHT_EVANESCENT
    assert sol.k_r.imag > 0 and sol.k_r.real == 0
    assert abs(abs(sol.r1) - 1) < 1e-12  # total reflection
    assert sol.residual < 1e-12
    assert flux_residual(sol) < 1e-12
    psi = sol.psi(np.array([5.0, 10.0]))
    assert abs(psi[0, 1]) < abs(psi[0, 0])


def test_invalid_energy_rejected():
    with pytest.raises(DomainError):
        solve_amplitudes(MediumParams(1, 0, 1, 0, 0.5))


def test_lambda_factor():
    assert lambda_factor(MediumParams(0, 1, 1, 0, 3)) == pytest.approx(2**0.25)
    assert lambda_factor(MediumParams(2, 2, 1.5, 0, 30)) == 1.0


def test_psi_continuity_matches_boundaries():
    sol = solve_amplitudes(MediumParams(1, 0.4, 1, 0.8, 2.5))
    np.testing.assert_allclose(sol.psi(np.array([-1e-300]))[:, 0], sol.psi_left_boundary(), atol=1e-14)
    np.testing.assert_allclose(sol.psi(np.array([0.0]))[:, 0], sol.psi_right_boundary(), atol=1e-14)

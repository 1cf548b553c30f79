"""Fourier integrals of sampled functions via FFT with endpoint corrections.

The sampled function h is replaced by its piecewise-cubic Lagrange
interpolant (centred 4-point stencils inside, one-sided stencils on the
first and last cells) and the interpolant times e^{i omega x} is integrated
exactly.  Interior nodes then share one weight W(theta) e^{i theta n},
theta = omega * dx, so the bulk reduces to an FFT; the four nodes at each end
get correction weights.  Accuracy is set by how well h is interpolated, not by
theta, so the result holds across the whole FFT band.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

_GX, _GW = leggauss(24)
_TAU = 0.5 * (_GX + 1.0)
_TW = 0.5 * _GW

_INTERIOR = (-1, 0, 1, 2)


def _lagrange(nodes):
    basis = []
    for i, ni in enumerate(nodes):
        v = np.ones_like(_TAU)
        for j, nj in enumerate(nodes):
            if j != i:
                v = v * (_TAU - nj) / (ni - nj)
        basis.append(v)
    return np.array(basis)


def _cell_moments(nodes, theta):
    """int_0^1 l_s(tau) e^{i theta tau} d tau for each stencil basis polynomial; (T, 4)."""
    phase = np.exp(1j * theta[:, None] * _TAU[None, :])
    return (phase * _TW) @ _lagrange(nodes).T


def endpoint_weights(theta, n_cells):
    """Return (W, left, right) for ``n_cells`` >= 8 cells.

    The integral over [x_0, x_M] of h e^{i omega x} is
    dx e^{i omega x_0} [W * sum_{n<M} h_n e^{i theta n}
    + sum_{j<4} left_j h_j + sum_{j<4} right_j h_{M-j}].
    """
    if n_cells < 8:
        raise ValueError("need at least 8 cells")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = n_cells
    interior = _cell_moments(_INTERIOR, theta)
    shifts = np.exp(-1j * np.outer(theta, _INTERIOR))
    w = np.sum(interior * shifts, axis=1)

    left = _cell_moments((0, 1, 2, 3), theta).astype(complex)
    for cell in range(1, 5):
        for k, s in enumerate(_INTERIOR):
            node = cell + s
            if node <= 3:
                left[:, node] += np.exp(1j * theta * cell) * interior[:, k]
    left -= w[:, None] * np.exp(1j * np.outer(theta, np.arange(4)))

    right = np.zeros((theta.size, 4), dtype=complex)
    last = _cell_moments((-2, -1, 0, 1), theta)
    for k, s in enumerate((-2, -1, 0, 1)):
        right[:, 1 - s] += np.exp(1j * theta * (m - 1)) * last[:, k]
    for cell in range(m - 5, m - 1):
        for k, s in enumerate(_INTERIOR):
            j = m - (cell + s)
            if 0 <= j <= 3:
                right[:, j] += np.exp(1j * theta * cell) * interior[:, k]
    for j in range(1, 4):
        right[:, j] -= w * np.exp(1j * theta * (m - j))
    return w, left, right


def fourier_integral_fft(samples, x0, dx):
    """int_{x0}^{x0 + M dx} h(x) e^{-i p x} dx on the FFT momentum grid.

    ``samples`` has shape (..., M + 1).  Returns (p, values) with p in numpy
    FFT order, p_n = 2 pi n / (M dx).
    """
    samples = np.asarray(samples, dtype=complex)
    m = samples.shape[-1] - 1
    p = 2 * np.pi * np.fft.fftfreq(m, dx)
    theta = -p * dx
    w, left, right = endpoint_weights(theta, m)
    bulk = np.fft.fft(samples[..., :m], axis=-1)
    head = np.einsum("tj,...j->...t", left, samples[..., :4])
    tail = np.einsum("tj,...j->...t", right, samples[..., m - np.arange(4)])
    return p, dx * np.exp(-1j * p * x0) * (w * bulk + head + tail)

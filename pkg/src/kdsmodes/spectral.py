"""Collocation nodes, differentiation matrices and Chebyshev coefficients."""

from __future__ import annotations

import numpy as np
from scipy import fft


def cheb_lobatto(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """``n`` Chebyshev-Gauss-Lobatto points on [lo, hi], increasing."""
    if n < 2:
        raise ValueError("need at least two Lobatto points")
    x = -np.cos(np.pi * np.arange(n) / (n - 1))
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo)


def cheb_gauss(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """``n`` Chebyshev-Gauss (interior) points on [lo, hi], increasing."""
    x = -np.cos(np.pi * (np.arange(n) + 0.5) / n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo)


def gauss_legendre(n: int) -> np.ndarray:
    """Gauss-Legendre nodes on (-1, 1), increasing."""
    x, _ = np.polynomial.legendre.leggauss(n)
    return np.sort(x)


def barycentric_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # rescale rows to keep the products in range for large n
    scale = 4.0 / (x.max() - x.min())
    w = 1.0 / np.prod(diff * scale, axis=1)
    return w / np.max(np.abs(w))


def diff_matrix(x: np.ndarray) -> np.ndarray:
    """First-derivative collocation matrix on arbitrary distinct nodes.

    Off-diagonal entries come from the barycentric formula; the diagonal uses
    the negative-sum trick so constants are differentiated exactly.
    """
    x = np.asarray(x, dtype=float)
    w = barycentric_weights(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def interpolation_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix mapping values at nodes ``x`` to polynomial-interpolant values at ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    w = barycentric_weights(x)
    diff = y[:, None] - x[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15 * max(1.0, np.abs(x).max()))
    diff[exact] = 1.0
    M = w[None, :] / diff
    M /= M.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    M[rows] = exact[rows].astype(float)
    return M


def cheb_coefficients(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from samples at increasing Lobatto points.

    Uses the type-I discrete cosine transform; the samples ordered by
    increasing abscissa correspond to ``cos(pi j/(n-1))`` reversed.
    """
    v = np.asarray(values)[::-1]
    n = v.shape[0]
    c = fft.dct(v, type=1, axis=0) / (n - 1)
    c[0] /= 2.0
    c[-1] /= 2.0
    return c

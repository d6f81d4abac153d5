"""Horizon-adapted null normal form, geodesic normalization and the Misner model.

The adapted chart at a horizon is ``x = (t~, +-(r - r_h), phi~ - Omega_h t~, theta)``
built on the intermediate chart.  After multiplying by the conformal factor
``psi(theta)`` the metric at ``x1 = 0`` has ``g01 = 1`` and ``g00 = g0j = g11 = 0``.
For ``a != 0`` the component ``g12 = -psi a sin^2(theta)/b`` does not vanish,
so the full normal form is checked in the null frame ``(W, L, d2, d3)``, where
``L`` is the transversal null field with ``g(L, W) = 1`` and ``g(L, dj) = 0``.
Both sets of components are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlockFormViolation, ChartExit, GridTooCoarse, IntegrationFailure
from .geometry import (Chart, HorizonData, SpacetimeParams, adapted_frame, christoffel,
                       conformal_factor, gauss_legendre_thetas, horizon_charts,
                       horizon_killing_field, intermediate_shift_rates, metric_components,
                       surface_gravity_geom)
from .spectral import diff_matrix

# forward fourth-order stencil for f'(0) from f(0), f(h), ..., f(4h)
_FORWARD4 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0

# components (i, j) that must vanish at x1 = 0; g01 must equal one
_REQUIRED_ZERO = ((0, 0), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3))


@dataclass
class NormalFormReport:
    """Normal-form data on a theta grid at one horizon.

    ``chart_block`` holds psi g in the adapted chart and ``frame_block`` the
    metric in the normalized null frame (W, L, d2, d3), both at x1 = 0.
    """

    horizon: str
    thetas: np.ndarray
    psi: np.ndarray
    chart_block: np.ndarray
    frame_block: np.ndarray
    d1_psi_g00: np.ndarray
    kappa_chart: float
    kappa_spread: float
    max_frame_deviation: float
    max_chart_deviation: float
    chart_g12: np.ndarray
    lower_block_min_eig: float
    transversal: np.ndarray = field(repr=False)

    @property
    def kappas(self) -> np.ndarray:
        return -0.5 * self.d1_psi_g00


def _adapted_metric(params: SpacetimeParams, which: str, x1, theta):
    _, gnc = horizon_charts(which)
    x = np.stack(np.broadcast_arrays(np.zeros_like(theta), x1, np.zeros_like(theta), theta), -1)
    return metric_components(params, gnc, x, check=False)


def null_transversal(g: np.ndarray, psi: float) -> np.ndarray:
    """Transversal null vector ``L = psi d1 + v`` with ``g(L, dj) = 0`` for j = 2, 3.

    ``g`` is the adapted-chart metric at x1 = 0, where ``g(d0, .)`` only pairs
    with ``d1``; ``v`` lies in span(d0, d2, d3).
    """
    ang = g[2:, 2:]
    v_ang = -np.linalg.solve(ang, psi * g[1, 2:])
    L = np.array([0.0, psi, v_ang[0], v_ang[1]])
    # fix the d0 coefficient so that g(L, L) = 0
    rest = L @ g @ L
    L[0] = -rest / (2.0 * g[0, 1] * psi)
    return L


def normal_form_check(params: SpacetimeParams, horizon: str, theta_grid=None,
                      tol: float = 1e-10, step: float | None = None,
                      frame: str = "normalized") -> NormalFormReport:
    """Verify the null normal form at a horizon and extract the chart surface gravity.

    Parameters
    ----------
    theta_grid : array_like, optional
        Polar angles; defaults to 16 Gauss-Legendre nodes in cos(theta).
    tol : float
        Bound on the components required to vanish.
    step : float, optional
        x1 step of the one-sided difference; defaults to ``1e-4 r_h``.
    frame : {"normalized", "chart"}
        Which block is held to ``tol``.  ``"chart"`` applies it to psi g in
        the adapted chart, which fails for a != 0 through g12.

    Raises
    ------
    BlockFormViolation
        A required component exceeds ``tol`` or the angular block is not
        positive definite.
    """
    which = "event" if horizon in ("event", "e") else "cosmological"
    r_h = params.roots.radius(which)
    thetas = gauss_legendre_thetas(16) if theta_grid is None else np.asarray(theta_grid, float)
    h = 1e-4 * r_h if step is None else step
    psi = conformal_factor(params, which, thetas)

    g0, _ = _adapted_metric(params, which, np.zeros_like(thetas), thetas)
    chart_block = psi[:, None, None] * g0
    frames = []
    transversals = []
    for i in range(len(thetas)):
        L = null_transversal(g0[i], psi[i])
        E = np.eye(4)
        E[:, 1] = L
        frames.append(E.T @ g0[i] @ E)
        transversals.append(L)
    frame_block = np.array(frames)

    # d1 (psi g00) at x1 = 0 from the x1 >= 0 side
    samples = np.array([_adapted_metric(params, which, np.full_like(thetas, k * h), thetas)[0][:, 0, 0]
                        for k in range(5)])
    d1 = psi * (_FORWARD4 @ samples) / h
    kappas = -0.5 * d1
    kappa = float(np.mean(kappas))

    def deviation(block):
        dev = max(np.max(np.abs(block[:, i, j])) for i, j in _REQUIRED_ZERO)
        return float(max(dev, np.max(np.abs(block[:, 0, 1] - 1.0))))

    frame_dev = deviation(frame_block)
    chart_dev = deviation(chart_block)
    min_eig = float(min(np.linalg.eigvalsh(b[2:, 2:]).min() for b in frame_block))

    checked = frame_block if frame == "normalized" else chart_block
    for i, j in _REQUIRED_ZERO:
        worst = float(np.max(np.abs(checked[:, i, j])))
        if worst > tol:
            raise BlockFormViolation(f"g{i}{j}", worst)
    worst = float(np.max(np.abs(checked[:, 0, 1] - 1.0)))
    if worst > tol:
        raise BlockFormViolation("g01 - 1", worst)
    if min_eig <= 0:
        raise BlockFormViolation("lower block eigenvalue", min_eig)

    return NormalFormReport(
        horizon=which, thetas=thetas, psi=psi, chart_block=chart_block,
        frame_block=frame_block, d1_psi_g00=d1, kappa_chart=kappa,
        kappa_spread=float(np.max(np.abs(kappas - kappa))),
        max_frame_deviation=frame_dev, max_chart_deviation=chart_dev,
        chart_g12=chart_block[:, 1, 2].copy(), lower_block_min_eig=min_eig,
        transversal=np.array(transversals))


def horizon_data(params: SpacetimeParams, horizon: str, n_theta: int = 16) -> HorizonData:
    """Surface gravity by both routes: nabla_W W and the normal-form derivative."""
    data = surface_gravity_geom(params, horizon, n_theta=n_theta)
    report = normal_form_check(params, horizon, gauss_legendre_thetas(n_theta))
    return data.with_chart_kappa(report.kappa_chart)


# ---------------------------------------------------------------------------
# geodesic normalization

@dataclass
class GeodesicFrame:
    """Transversal null geodesic from a horizon point, in star coordinates.

    ``frames[n]`` has columns (d~x0, d~x1, d~x2, d~x3) at affine parameter
    ``s[n]``; d~x1 is the geodesic velocity.
    """

    horizon: str
    base: np.ndarray
    s: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    frames: np.ndarray
    null_drift: float
    killing_drift: float
    pairing_drift: np.ndarray
    angular_excursion: float


def _star_velocity(params, which, v_x, r_h):
    J, _, _, _, _ = adapted_frame(params, which)
    v = J @ v_x
    dt, dphi = intermediate_shift_rates(params, which, r_h)
    return np.array([v[0] - float(dt) * v[1], v[1], v[2] - float(dphi) * v[1], v[3]])


def _initial_velocity(params, which, theta, initial):
    psi = float(conformal_factor(params, which, theta))
    if initial == "conformal":
        v_x = np.array([0.0, psi, 0.0, 0.0])
    elif initial == "normalized":
        g0, _ = _adapted_metric(params, which, np.array(0.0), np.array(theta))
        v_x = null_transversal(g0, psi)
    else:
        raise ValueError(f"unknown initial velocity {initial!r}")
    return _star_velocity(params, which, v_x, params.roots.radius(which))


def _geodesic_rhs(params):
    def rhs(_, y):
        x, v = y[:4], y[4:]
        gamma = christoffel(params, Chart.STAR, x).christoffel
        return np.concatenate([v, -np.einsum("lmn,m,n->l", gamma, v, v)])
    return rhs


def _integrate(params, x0, v0, s_grid, r_lo, rtol, atol):
    def leave(_, y):
        return y[1] - r_lo
    leave.terminal = True
    out = np.empty((len(s_grid), 8))
    zero = int(np.argmin(np.abs(s_grid)))
    y0 = np.concatenate([x0, v0])
    out[zero] = y0
    for part in (s_grid[zero:], s_grid[:zero + 1][::-1]):
        if len(part) < 2:
            continue
        sol = solve_ivp(_geodesic_rhs(params), (part[0], part[-1]), y0, t_eval=part,
                        method="RK45", rtol=rtol, atol=atol, events=leave)
        if sol.status == 1:
            raise ChartExit("geodesic left the star chart")
        if not sol.success:
            raise IntegrationFailure(sol.message)
        idx = np.searchsorted(s_grid, part) if part[0] < part[-1] else \
            np.searchsorted(s_grid, part[::-1])[::-1]
        out[idx] = sol.y.T
    return out


def geodesic_normalize(params: SpacetimeParams, horizon: str, theta: float, phi: float = 0.0,
                       initial: str = "conformal", window: float | None = None,
                       n_samples: int = 21, rtol: float = 1e-10, atol: float = 1e-12,
                       family_step: float = 1e-3) -> GeodesicFrame:
    """Shoot the transversal null geodesic and the commuting coordinate frame.

    Parameters
    ----------
    initial : {"conformal", "normalized"}
        Initial velocity ``psi d_x1`` or the fully normalized null field ``L``.
    window : float, optional
        Affine half-window; defaults to ``0.1 min(r_e - r_C, r_c - r_e)``.

    Notes
    -----
    d~x0 and d~x2 are the Killing fields W and d_phi*, which map the geodesic
    family to itself.  d~x3 is the variation of the family in theta, taken by a
    fourth-order central difference over neighboring geodesics.
    """
    which = "event" if horizon in ("event", "e") else "cosmological"
    roots = params.roots
    r_h = roots.radius(which)
    gaps = [roots.r_e - roots.r_C]
    if math.isfinite(roots.r_c):
        gaps.append(roots.r_c - roots.r_e)
    w = 0.1 * min(gaps) if window is None else window
    s_grid = np.linspace(-w, w, n_samples)

    def shoot(th):
        x0 = np.array([0.0, r_h, phi, th])
        return _integrate(params, x0, _initial_velocity(params, which, th, initial),
                          s_grid, roots.r_C, rtol, atol)

    central = shoot(theta)
    eps = family_step
    fam = {k: shoot(theta + k * eps) for k in (-2, -1, 1, 2)}
    d3 = (fam[-2][:, :4] - 8 * fam[-1][:, :4] + 8 * fam[1][:, :4] - fam[2][:, :4]) / (12 * eps)

    pos, vel = central[:, :4], central[:, 4:]
    W = horizon_killing_field(params, which)
    frames = np.zeros((n_samples, 4, 4))
    frames[:, :, 0] = W
    frames[:, :, 1] = vel
    frames[:, 2, 2] = 1.0
    frames[:, :, 3] = d3

    g, _ = metric_components(params, Chart.STAR, pos, check=False)
    null = np.einsum("ni,nij,nj->n", vel, g, vel)
    pair = np.einsum("ni,nij,njk->nk", vel, g, frames)
    zero = int(np.argmin(np.abs(s_grid)))
    return GeodesicFrame(
        horizon=which, base=central[zero, :4], s=s_grid, position=pos, velocity=vel,
        frames=frames, null_drift=float(np.max(np.abs(null))),
        killing_drift=float(np.max(np.abs(pair[:, 0] - pair[zero, 0]))),
        pairing_drift=np.max(np.abs(pair - pair[zero]), axis=0),
        angular_excursion=float(max(np.ptp(pos[:, 2]), np.ptp(pos[:, 3]))))


# ---------------------------------------------------------------------------
# Misner model

@dataclass(frozen=True)
class MisnerModel:
    """Misner metric 2 dx1 dx0 + x1 dx0^2 + sum dxj^2 on R^{n+1}; surface gravity -1/2."""

    n: int
    sigma: complex

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("the Misner model needs n >= 1")

    kappa = -0.5


def _axis_matrices(axes):
    mats = []
    for x in axes:
        x = np.asarray(x, dtype=float)
        if x.size < 3:
            raise GridTooCoarse("each axis needs at least three nodes")
        D = diff_matrix(x)
        D2 = D @ D
        if np.linalg.norm(D2, np.inf) * np.finfo(float).eps > 1e-4:
            raise GridTooCoarse("second-derivative matrix amplifies round-off beyond 1e-4")
        mats.append((x, D, D2))
    return mats


def _apply(M, v, axis):
    return np.moveaxis(np.tensordot(M, v, axes=(1, axis)), 0, axis)


def misner_reduced_operator(model: MisnerModel, v: np.ndarray, axes,
                            as_displayed: bool = False) -> np.ndarray:
    """Reduced Misner operator on a tensor grid, with u = exp(-i sigma x0) v.

    Applies ``d1(x1 d1 v + 2 i sigma v) - sum_j dj^2 v``, the mode reduction of
    ``d1 (x1 d1 - 2 d0) - sum_j dj^2``.  With ``as_displayed=True`` the
    zeroth-order variant ``d1(x1 d1 v) - sum_j dj^2 v + 2 i sigma v`` is
    applied instead; the two differ by ``2 i sigma (d1 v - v)``.

    Parameters
    ----------
    v : ndarray
        Samples of shape ``(len(axes[0]), ..., len(axes[n-1]))``.
    axes : sequence of 1-D arrays
        Node sets for x1, x2, ..., xn (Chebyshev-Lobatto points recommended).
    """
    if len(axes) != model.n:
        raise ValueError(f"expected {model.n} axes, got {len(axes)}")
    mats = _axis_matrices(axes)
    v = np.asarray(v, dtype=complex)
    x1, D1, _ = mats[0]
    shape = [1] * v.ndim
    shape[0] = -1
    d1v = _apply(D1, v, 0)
    out = _apply(D1, x1.reshape(shape) * d1v, 0)
    for j in range(1, model.n):
        out = out - _apply(mats[j][2], v, j)
    if as_displayed:
        return out + 2j * model.sigma * v
    return out + 2j * model.sigma * d1v

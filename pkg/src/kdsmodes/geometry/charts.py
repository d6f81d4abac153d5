"""Coordinate charts on the extended Kerr(-de Sitter) spacetime.

Coordinate ordering is ``(t, r, phi, theta)`` in every Kerr-type chart
(Boyer-Lindquist, star, intermediate) and ``(x0, x1, x2, x3)`` in the
horizon-adapted charts, where

    x0 = t~,   x1 = r_e - r  (event) or r - r_c (cosmological),
    x2 = phi~ - Omega_h t~,   x3 = theta.

All metric evaluators are vectorized over leading axes of ``coords``.
Contravariant metrics are evaluated from closed forms, never by inversion,
so that ``g @ g_inv = Id`` is a genuine consistency check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ..errors import OutOfChart, QuadratureFailure
from .params import SpacetimeParams


class Chart(str, enum.Enum):
    BL = "BL"
    STAR = "STAR"
    INTERMEDIATE_E = "INTERMEDIATE_e"
    INTERMEDIATE_C = "INTERMEDIATE_c"
    GNC_E = "GNC_e"
    GNC_C = "GNC_c"
    MISNER = "MISNER"


_HORIZON_OF = {
    Chart.INTERMEDIATE_E: "event", Chart.GNC_E: "event",
    Chart.INTERMEDIATE_C: "cosmological", Chart.GNC_C: "cosmological",
}


def horizon_charts(which: str) -> tuple[Chart, Chart]:
    """(intermediate, adapted) chart tags for a horizon."""
    if which in ("event", "e"):
        return Chart.INTERMEDIATE_E, Chart.GNC_E
    if which in ("cosmological", "c"):
        return Chart.INTERMEDIATE_C, Chart.GNC_C
    raise ValueError(f"unknown horizon {which!r}")


@dataclass(frozen=True)
class ChartPoint:
    chart: Chart
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "chart", Chart(self.chart))
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != 4:
            raise ValueError("a chart point has four coordinates")
        object.__setattr__(self, "coords", coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass
class MetricEval:
    g: np.ndarray
    g_inv: np.ndarray
    chart: Chart
    point: ChartPoint
    christoffel: np.ndarray | None = field(default=None)


# ---------------------------------------------------------------------------
# radial profile functions

def _horizon_shape(params: SpacetimeParams, r):
    """Return F(r) = 2 (r - r_e)/(r_c - r_e) - 1 and the star-chart dr^2 weight
    (1 - F^2)/mu, both regular across r_e and r_c."""
    roots = params.roots
    r = np.asarray(r, dtype=float)
    if params.Lambda == 0:
        return -np.ones_like(r), np.zeros_like(r)
    width = roots.r_c - roots.r_e
    F = 2.0 * (r - roots.r_e) / width - 1.0
    w = 12.0 / (params.Lambda * (r - roots.r0) * (r - roots.r_C) * width**2)
    return F, w


def _kerr_type(params: SpacetimeParams, r, theta, F, w):
    """Covariant and contravariant metric of the star/intermediate family.

    ``F`` multiplies the (dt - a sin^2 dphi) dr cross term and ``w`` is the
    dr^2 weight divided by rho^2.  The Boyer-Lindquist chart is not of this
    form and is handled separately.
    """
    a, b = params.a, params.b
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    F = np.broadcast_to(F, r.shape)
    w = np.broadcast_to(w, r.shape)
    s2 = np.sin(theta) ** 2
    rho2 = r**2 + a**2 * np.cos(theta) ** 2
    c = params.c_theta(theta)
    mu = params.mu(r)
    R2 = r**2 + a**2
    alpha = c * s2 / (b**2 * rho2)
    beta = mu / (b**2 * rho2)

    shape = np.broadcast(r, theta).shape
    g = np.zeros(shape + (4, 4))
    g[..., 0, 0] = -beta + alpha * a**2
    g[..., 0, 2] = g[..., 2, 0] = beta * a * s2 - alpha * a * R2
    g[..., 2, 2] = -beta * a**2 * s2**2 + alpha * R2**2
    g[..., 0, 1] = g[..., 1, 0] = F / b
    g[..., 2, 1] = g[..., 1, 2] = -F * a * s2 / b
    g[..., 1, 1] = rho2 * w
    g[..., 3, 3] = rho2 / c

    E = -b**2 * w
    ginv = np.zeros(shape + (4, 4))
    ginv[..., 1, 1] = mu
    ginv[..., 1, 0] = ginv[..., 0, 1] = b * F * R2
    ginv[..., 1, 2] = ginv[..., 2, 1] = b * F * a
    ginv[..., 0, 0] = E * R2**2 + b**2 * a**2 * s2 / c
    ginv[..., 0, 2] = ginv[..., 2, 0] = E * a * R2 + b**2 * a / c
    ginv[..., 2, 2] = E * a**2 + b**2 / (c * s2)
    ginv[..., 3, 3] = c
    ginv /= rho2[..., None, None]
    return g, ginv


def _boyer_lindquist(params: SpacetimeParams, r, theta):
    a, b = params.a, params.b
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s2 = np.sin(theta) ** 2
    rho2 = r**2 + a**2 * np.cos(theta) ** 2
    c = params.c_theta(theta)
    mu = params.mu(r)
    R2 = r**2 + a**2
    alpha = c * s2 / (b**2 * rho2)
    beta = mu / (b**2 * rho2)

    shape = np.broadcast(r, theta).shape
    g = np.zeros(shape + (4, 4))
    g[..., 0, 0] = -beta + alpha * a**2
    g[..., 0, 2] = g[..., 2, 0] = beta * a * s2 - alpha * a * R2
    g[..., 2, 2] = -beta * a**2 * s2**2 + alpha * R2**2
    g[..., 1, 1] = rho2 / mu
    g[..., 3, 3] = rho2 / c

    # (r^2 + a^2 cos^2) G = mu d_r^2 + c d_th^2 + b^2/(c sin^2) (a sin^2 d_t + d_phi)^2
    #                       - b^2/mu ((r^2 + a^2) d_t + a d_phi)^2
    ginv = np.zeros(shape + (4, 4))
    ginv[..., 1, 1] = mu
    ginv[..., 3, 3] = c
    ginv[..., 0, 0] = b**2 * a**2 * s2 / c - b**2 * R2**2 / mu
    ginv[..., 0, 2] = ginv[..., 2, 0] = b**2 * a / c - b**2 * a * R2 / mu
    ginv[..., 2, 2] = b**2 / (c * s2) - b**2 * a**2 / mu
    ginv /= rho2[..., None, None]
    return g, ginv


def _misner(coords):
    x1 = coords[..., 1]
    shape = x1.shape
    g = np.zeros(shape + (4, 4))
    g[..., 0, 0] = x1
    g[..., 0, 1] = g[..., 1, 0] = 1.0
    g[..., 2, 2] = g[..., 3, 3] = 1.0
    ginv = np.zeros(shape + (4, 4))
    ginv[..., 0, 1] = ginv[..., 1, 0] = 1.0
    ginv[..., 1, 1] = -x1
    ginv[..., 2, 2] = ginv[..., 3, 3] = 1.0
    return g, ginv


def adapted_frame(params: SpacetimeParams, which: str):
    """Constant Jacobians between the intermediate chart and the adapted chart.

    Returns ``(J, K, r_h, orientation, omega)`` with ``J = d(t~, r, phi~, th)/d(x)``
    and ``K = J^{-1}``; ``r = r_h + orientation * x1``.
    """
    r_h = params.roots.radius(which)
    omega = params.a / (r_h**2 + params.a**2)
    orientation = -1.0 if which in ("event", "e") else 1.0
    J = np.array([[1.0, 0.0, 0.0, 0.0],
                  [0.0, orientation, 0.0, 0.0],
                  [omega, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0]])
    K = np.array([[1.0, 0.0, 0.0, 0.0],
                  [0.0, orientation, 0.0, 0.0],
                  [-omega, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0]])
    return J, K, r_h, orientation, omega


def radius_of(params: SpacetimeParams, chart: Chart, coords):
    coords = np.asarray(coords, dtype=float)
    if chart in (Chart.GNC_E, Chart.GNC_C):
        _, _, r_h, orientation, _ = adapted_frame(params, _HORIZON_OF[chart])
        return r_h + orientation * coords[..., 1]
    return coords[..., 1]


def check_in_chart(params: SpacetimeParams, chart: Chart, coords) -> None:
    """Raise :class:`OutOfChart` unless every point lies inside the chart."""
    chart = Chart(chart)
    if chart is Chart.MISNER:
        return
    coords = np.asarray(coords, dtype=float)
    roots = params.roots
    r = radius_of(params, chart, coords)
    theta = coords[..., 3]
    if np.any(theta <= 0) or np.any(theta >= math.pi):
        raise OutOfChart(f"theta outside (0, pi) in chart {chart.value}")
    if chart is Chart.BL:
        lo, hi = roots.r_e, roots.r_c
    elif chart is Chart.STAR:
        lo, hi = roots.r_C, math.inf
    elif chart in (Chart.INTERMEDIATE_E, Chart.GNC_E):
        lo, hi = roots.r_C, roots.r_c
    else:
        if not params.has_cosmological_horizon:
            raise OutOfChart("cosmological charts need Lambda > 0")
        lo, hi = roots.r_e, math.inf
    if np.any(r <= lo) or np.any(r >= hi):
        raise OutOfChart(f"r outside ({lo:.6g}, {hi:.6g}) in chart {chart.value}")


def metric_components(params: SpacetimeParams, chart: Chart, coords, check: bool = True):
    """Covariant and contravariant metric components at ``coords``.

    ``coords`` has shape ``(..., 4)``; returns two arrays of shape ``(..., 4, 4)``.
    """
    chart = Chart(chart)
    coords = np.asarray(coords, dtype=float)
    if chart is Chart.MISNER:
        return _misner(coords)
    if check:
        check_in_chart(params, chart, coords)
    if chart is Chart.BL:
        return _boyer_lindquist(params, coords[..., 1], coords[..., 3])
    if chart is Chart.STAR:
        F, w = _horizon_shape(params, coords[..., 1])
        return _kerr_type(params, coords[..., 1], coords[..., 3], F, w)
    if chart in (Chart.INTERMEDIATE_E, Chart.INTERMEDIATE_C):
        eps = -1.0 if chart is Chart.INTERMEDIATE_E else 1.0
        return _kerr_type(params, coords[..., 1], coords[..., 3], eps, 0.0)
    which = _HORIZON_OF[chart]
    J, K, r_h, orientation, _ = adapted_frame(params, which)
    eps = -1.0 if which == "event" else 1.0
    r = r_h + orientation * coords[..., 1]
    g, ginv = _kerr_type(params, r, coords[..., 3], eps, 0.0)
    return J.T @ g @ J, K @ ginv @ K.T


def metric_eval(params: SpacetimeParams, point: ChartPoint) -> MetricEval:
    g, ginv = metric_components(params, point.chart, point.as_array())
    return MetricEval(g=g, g_inv=ginv, chart=point.chart, point=point)


def metric_bl(params: SpacetimeParams, point: ChartPoint) -> MetricEval:
    if point.chart is not Chart.BL:
        raise OutOfChart("metric_bl expects a Boyer-Lindquist point")
    return metric_eval(params, point)


def dual_metric_bl(params: SpacetimeParams, point: ChartPoint) -> MetricEval:
    """Boyer-Lindquist metric with its dual assembled from the closed form."""
    return metric_bl(params, point)


def metric_extended(params: SpacetimeParams, point: ChartPoint) -> MetricEval:
    """The analytically extended metric g_* in star coordinates."""
    if point.chart is not Chart.STAR:
        raise OutOfChart("metric_extended expects a star-chart point")
    return metric_eval(params, point)


def conformal_factor(params: SpacetimeParams, which: str, theta):
    """psi(theta) = b (r_h^2 + a^2) / (r_h^2 + a^2 cos^2 theta)."""
    r_h = params.roots.radius(which)
    a2 = params.a**2
    return params.b * ((r_h**2 + a2) / (r_h**2 + a2 * np.cos(theta) ** 2))


# ---------------------------------------------------------------------------
# chart transitions

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-13, limit=200)


def _quad(fun, lo, hi):
    if lo == hi:
        return 0.0
    value, err = integrate.quad(fun, lo, hi, **_QUAD_OPTS)
    if not math.isfinite(value) or err > 1e-9 * max(1.0, abs(value)):
        raise QuadratureFailure(f"quadrature on [{lo}, {hi}] failed (error estimate {err:.2e})")
    return value


def star_shifts(params: SpacetimeParams, r: float) -> tuple[float, float]:
    """G(r), Psi(r) with t_* = t + G, phi_* = phi + Psi, normalized at r_mid."""
    roots = params.roots
    if not roots.r_e < r < roots.r_c:
        raise OutOfChart(f"r = {r} outside the Boyer-Lindquist range")
    a, b = params.a, params.b

    def dG(s):
        F, _ = _horizon_shape(params, s)
        return b * float(F) * (s**2 + a**2) / float(params.mu(s))

    def dPsi(s):
        F, _ = _horizon_shape(params, s)
        return b * float(F) * a / float(params.mu(s))

    return _quad(dG, roots.r_mid, r), _quad(dPsi, roots.r_mid, r)


def _intermediate_weight(params: SpacetimeParams, which: str):
    roots = params.roots
    b, lam = params.b, params.Lambda
    width = roots.r_c - roots.r_e
    if which in ("event", "e"):
        def weight(s):
            return -6.0 * b / (lam * width * (s - roots.r0) * (s - roots.r_C) * (roots.r_c - s))
    else:
        def weight(s):
            return 6.0 * b / (lam * width * (s - roots.r0) * (s - roots.r_C) * (s - roots.r_e))
    return weight


def intermediate_shift_rates(params: SpacetimeParams, which: str, r):
    """r-derivatives of (t~ - t_*, phi~ - phi_*); zero when Lambda = 0."""
    r = np.asarray(r, dtype=float)
    if params.Lambda == 0:
        return np.zeros_like(r), np.zeros_like(r)
    w = _intermediate_weight(params, which)(r)
    return w * (r**2 + params.a**2), w * params.a


def intermediate_shifts(params: SpacetimeParams, which: str, r: float) -> tuple[float, float]:
    """(t~ - t_*, phi~ - phi_*) at radius r; both regular across the chosen horizon.

    Derivatives are G~' - G' with G~' = -/+ b (r^2 + a^2)/mu near r_e / r_c,
    written in a form without the removable singularity.
    """
    roots = params.roots
    if params.Lambda == 0:
        if which not in ("event", "e"):
            raise OutOfChart("cosmological charts need Lambda > 0")
        return 0.0, 0.0
    if which in ("event", "e"):
        if not roots.r_C < r < roots.r_c:
            raise OutOfChart(f"r = {r} outside the event intermediate chart")
    elif not r > roots.r_e:
        raise OutOfChart(f"r = {r} outside the cosmological intermediate chart")
    weight = _intermediate_weight(params, which)
    a = params.a
    dt = _quad(lambda s: weight(s) * (s**2 + a**2), roots.r_mid, r)
    dphi = _quad(lambda s: weight(s) * a, roots.r_mid, r)
    return dt, dphi


def _to_star(params, chart, x):
    t, r, phi, theta = x
    if chart is Chart.STAR:
        return x
    if chart is Chart.BL:
        G, Psi = star_shifts(params, r)
        return (t + G, r, phi + Psi, theta)
    if chart in (Chart.INTERMEDIATE_E, Chart.INTERMEDIATE_C):
        dt, dphi = intermediate_shifts(params, _HORIZON_OF[chart], r)
        return (t - dt, r, phi - dphi, theta)
    if chart in (Chart.GNC_E, Chart.GNC_C):
        which = _HORIZON_OF[chart]
        _, _, r_h, orientation, omega = adapted_frame(params, which)
        inter = Chart.INTERMEDIATE_E if which == "event" else Chart.INTERMEDIATE_C
        x0, x1, x2, x3 = x
        return _to_star(params, inter, (x0, r_h + orientation * x1, x2 + omega * x0, x3))
    raise OutOfChart(f"no transition from chart {chart.value}")


def _from_star(params, chart, x):
    t, r, phi, theta = x
    if chart is Chart.STAR:
        return x
    if chart is Chart.BL:
        G, Psi = star_shifts(params, r)
        return (t - G, r, phi - Psi, theta)
    if chart in (Chart.INTERMEDIATE_E, Chart.INTERMEDIATE_C):
        dt, dphi = intermediate_shifts(params, _HORIZON_OF[chart], r)
        return (t + dt, r, phi + dphi, theta)
    if chart in (Chart.GNC_E, Chart.GNC_C):
        which = _HORIZON_OF[chart]
        _, _, r_h, orientation, omega = adapted_frame(params, which)
        inter = Chart.INTERMEDIATE_E if which == "event" else Chart.INTERMEDIATE_C
        tt, rr, pp, th = _from_star(params, inter, x)
        return (tt, (rr - r_h) / orientation, pp - omega * tt, th)
    raise OutOfChart(f"no transition to chart {chart.value}")


def chart_map(params: SpacetimeParams, point: ChartPoint, to_chart: Chart) -> ChartPoint:
    """Transport a point between charts (through the star chart)."""
    to_chart = Chart(to_chart)
    if point.chart is to_chart:
        return point
    if Chart.MISNER in (point.chart, to_chart):
        raise OutOfChart("the Misner chart has no transition to Kerr-type charts")
    check_in_chart(params, point.chart, point.as_array())
    star = _to_star(params, point.chart, point.coords)
    out = _from_star(params, to_chart, star)
    check_in_chart(params, to_chart, np.array(out))
    return ChartPoint(to_chart, out)


def transition_jacobian(params: SpacetimeParams, point: ChartPoint) -> np.ndarray:
    """Jacobian ``d(x_star)/d(x)`` of the map from ``point.chart`` to the star chart.

    Every transition shifts t and phi by functions of r (plus, for the
    adapted charts, a constant linear change), so the Jacobian is explicit:
    the metric in any chart equals ``J^T g_star J`` at the image point.
    """
    chart = point.chart
    check_in_chart(params, chart, point.as_array())
    r = float(radius_of(params, chart, point.as_array()))
    J = np.eye(4)
    if chart is Chart.STAR:
        return J
    if chart is Chart.BL:
        F, _ = _horizon_shape(params, r)
        J[0, 1] = params.b * float(F) * (r**2 + params.a**2) / float(params.mu(r))
        J[2, 1] = params.b * float(F) * params.a / float(params.mu(r))
        return J
    if chart is Chart.MISNER:
        raise OutOfChart("the Misner chart has no transition to Kerr-type charts")
    which = _HORIZON_OF[chart]
    dt, dphi = intermediate_shift_rates(params, which, r)
    J[0, 1], J[2, 1] = -float(dt), -float(dphi)
    if chart in (Chart.INTERMEDIATE_E, Chart.INTERMEDIATE_C):
        return J
    A, _, _, _, _ = adapted_frame(params, which)
    return J @ A

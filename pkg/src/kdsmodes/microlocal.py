"""Reduced principal symbol at a horizon and its Hamiltonian flow.

The symbol lives on the x0-quotient of the adapted chart, with base
``(x1, x2, x3)`` and fiber ``(xi1, xi2, xi3)``.  It is built from the
conformally rescaled metric ``psi g``, so that ``d1 p = 2 kappa xi1^2`` on the
conormal bundle with the chart surface gravity ``kappa``.  The rescaling only
reparametrizes null bicharacteristics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CharSetViolation, ChartExit, IntegrationFailure, NotRadial, StepUnderflow
from .geometry import (Chart, SpacetimeParams, check_in_chart, conformal_factor,
                       gauss_legendre_thetas, horizon_charts, metric_components)
from .gnc import normal_form_check

_D1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_OFFS = np.array([-2.0, -1.0, 1.0, 2.0])


@dataclass(frozen=True)
class CotangentPoint:
    base: tuple
    xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(float(v) for v in self.base))
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))
        if len(self.base) != 3 or len(self.xi) != 3:
            raise ValueError("base and fiber each have three components")

    def as_array(self) -> np.ndarray:
        return np.array(self.base + self.xi)


def _which(horizon_chart) -> str:
    if isinstance(horizon_chart, str) and horizon_chart in ("event", "e", "cosmological", "c"):
        return "event" if horizon_chart in ("event", "e") else "cosmological"
    chart = Chart(horizon_chart)
    if chart is Chart.GNC_E:
        return "event"
    if chart is Chart.GNC_C:
        return "cosmological"
    raise ValueError(f"{chart.value} is not a horizon-adapted chart")


def quotient_inverse(params: SpacetimeParams, which: str, base: np.ndarray) -> np.ndarray:
    """Spatial block (i, j >= 1) of (psi g)^{-1} at quotient base points ``(..., 3)``."""
    base = np.asarray(base, dtype=float)
    _, chart = horizon_charts(which)
    x = np.concatenate([np.zeros(base.shape[:-1] + (1,)), base], axis=-1)
    _, ginv = metric_components(params, chart, x, check=False)
    psi = conformal_factor(params, which, base[..., 2])
    return ginv[..., 1:, 1:] / psi[..., None, None]


def _symbol(params, which, z):
    """p at phase-space points ``z`` of shape (..., 6)."""
    G = quotient_inverse(params, which, z[..., :3])
    xi = z[..., 3:]
    return np.einsum("...i,...ij,...j->...", xi, G, xi)


def principal_symbol(params: SpacetimeParams, horizon_chart, pt: CotangentPoint) -> float:
    """p(x, xi) = sum_{i,j>=1} (psi g)^{ij} xi_i xi_j in the adapted chart."""
    which = _which(horizon_chart)
    _, chart = horizon_charts(which)
    check_in_chart(params, chart, np.array((0.0,) + pt.base))
    return float(_symbol(params, which, pt.as_array()))


def _field(params, which, z, rel_step):
    """(dp/dxi, -dp/dx) by fourth-order central differences, vectorized over one point."""
    h = rel_step * np.maximum(1.0, np.abs(z))
    if np.any(h < 1e4 * np.finfo(float).eps):
        raise StepUnderflow("phase-space step below the round-off floor")
    pts = np.repeat(z[None, :], 24, axis=0)
    for k in range(6):
        pts[4 * k:4 * k + 4, k] += _OFFS * h[k]
    vals = _symbol(params, which, pts).reshape(6, 4)
    grad = vals @ _D1 / h
    return np.concatenate([grad[3:], -grad[:3]]), grad


def hamiltonian_field(params: SpacetimeParams, horizon_chart, pt: CotangentPoint,
                      rel_step: float = 1e-3) -> np.ndarray:
    """Hamiltonian vector field H_p = (d_xi p, -d_x p), six components."""
    which = _which(horizon_chart)
    _, chart = horizon_charts(which)
    check_in_chart(params, chart, np.array((0.0,) + pt.base))
    field, _ = _field(params, which, pt.as_array(), rel_step)
    return field


@dataclass
class ConormalReport:
    horizon: str
    conormal_max: float
    angular_min_ratio: float
    lower_bound: float
    n_points: int
    violations: int


def conormal_check(params: SpacetimeParams, horizon: str, n_x2: int = 32, n_x3: int = 32,
                   n_directions: int = 16, lower_bound: float | None = None) -> ConormalReport:
    """Characteristic set over the horizon equals the conormal bundle.

    On an ``n_x2 x n_x3`` grid of horizon points checks that p vanishes on
    pure-xi1 covectors (to round-off) and that ``p >= c |xi_ang|^2`` for unit angular
    covectors with any xi1 component.  The constant ``c`` is the smallest
    eigenvalue of the angular block; it must be positive.

    Raises
    ------
    CharSetViolation
        With the offending phase-space point as witness.
    """
    which = "event" if horizon in ("event", "e") else "cosmological"
    x2 = np.linspace(0.0, 2 * np.pi, n_x2, endpoint=False)
    x3 = gauss_legendre_thetas(n_x3)
    X2, X3 = np.meshgrid(x2, x3, indexing="ij")
    base = np.stack([np.zeros_like(X2), X2, X3], -1).reshape(-1, 3)
    G = quotient_inverse(params, which, base)

    # "exact" up to the round-off left in mu(r_h) by the root finder
    conormal = np.abs(G[:, 0, 0])
    worst = int(np.argmax(conormal))
    if conormal[worst] > 64 * np.finfo(float).eps * np.max(np.abs(G)):
        raise CharSetViolation("p does not vanish on the conormal bundle",
                               witness=(base[worst], (1.0, 0.0, 0.0)))

    ang = np.linspace(0.0, np.pi, n_directions, endpoint=False)
    dirs = np.stack([np.cos(ang), np.sin(ang)], -1)
    ratios = []
    c_floor = lower_bound
    for xi1 in (-1.0, 0.0, 1.0):
        xi = np.concatenate([np.full((len(dirs), 1), xi1), dirs], axis=1)
        p = np.einsum("di,nij,dj->nd", xi, G, xi)
        ratios.append(p)
    ratios = np.stack(ratios)
    c = float(ratios.min())
    if c_floor is None:
        c_floor = 0.0
    bad = ratios <= c_floor
    violations = int(bad.sum())
    if violations:
        idx = np.unravel_index(int(np.argmin(ratios)), ratios.shape)
        witness = (base[idx[1]], (float(idx[0] - 1),) + tuple(dirs[idx[2]]))
        raise CharSetViolation(f"{violations} grid points with p <= {c_floor:g} |xi_ang|^2",
                               witness=witness)
    return ConormalReport(horizon=which, conormal_max=float(conormal.max()),
                          angular_min_ratio=c, lower_bound=float(c_floor),
                          n_points=int(ratios.size), violations=0)


@dataclass
class RadialPointReport:
    """Per-sample H_p data on N*{x1 = 0} at one horizon.

    ``rates`` is the radial rate ``lambda`` in ``H_p = lambda xi d_xi``; a
    positive rate is a sink and a negative one a source.  ``xi_r`` is the sign
    of the covector's dr component, which is ``-xi1`` at the event horizon and
    ``+xi1`` at the cosmological one.
    """

    horizon: str
    kappa_chart: float
    samples: np.ndarray
    p: np.ndarray
    dp_norm: np.ndarray
    fields: np.ndarray
    fitted_constant: np.ndarray
    rates: np.ndarray
    xi_r: np.ndarray
    classification: list
    max_base: float
    max_angular_fiber: float
    max_rel_error: float

    def classification_for_xi_r(self, sign: float) -> str:
        labels = {c for c, s in zip(self.classification, self.xi_r) if s == np.sign(sign)}
        if len(labels) != 1:
            raise NotRadial("inconsistent classification", diagnostics=labels)
        return labels.pop()


def default_conormal_samples(n: int = 32) -> np.ndarray:
    """``n`` points on N*{x1 = 0}: Gauss-Legendre angles, spread x2, xi1 = +-1."""
    half = n // 2
    thetas = gauss_legendre_thetas(half)
    x2 = np.linspace(0.0, 2 * np.pi, half, endpoint=False)
    rows = []
    for sign in (1.0, -1.0):
        for th, ph in zip(thetas, x2):
            rows.append([0.0, ph, th, sign, 0.0, 0.0])
    return np.array(rows)


def radial_point_check(params: SpacetimeParams, horizon: str, samples=None,
                       base_tol: float = 1e-8, rel_tol: float = 1e-6,
                       rel_step: float = 1e-3) -> RadialPointReport:
    """Check that H_p is radial on the conormal bundle with rate -2 kappa xi1.

    Raises
    ------
    NotRadial
        If base components or angular fiber components of H_p exceed
        ``base_tol`` (relative to xi1^2), the xi1 component misses
        ``-2 kappa xi1^2`` by more than ``rel_tol`` relative, or dp = 0.
    """
    which = "event" if horizon in ("event", "e") else "cosmological"
    kappa = normal_form_check(params, which).kappa_chart
    samples = default_conormal_samples() if samples is None else np.atleast_2d(samples)
    fields, grads, p = [], [], []
    for z in samples:
        f, grad = _field(params, which, np.asarray(z, float), rel_step)
        fields.append(f)
        grads.append(grad)
        p.append(float(_symbol(params, which, np.asarray(z, float))))
    fields = np.array(fields)
    xi1 = samples[:, 3]
    scale = xi1**2
    fitted = fields[:, 3] / scale
    expected = -2.0 * kappa
    rel_err = np.abs(fitted - expected) / abs(expected)
    max_base = float(np.max(np.abs(fields[:, :3]) / scale[:, None]))
    max_ang = float(np.max(np.abs(fields[:, 4:]) / scale[:, None]))
    dp_norm = np.linalg.norm(np.array(grads), axis=1)
    rates = fields[:, 3] / xi1
    orientation = -1.0 if which == "event" else 1.0
    diag = dict(max_base=max_base, max_angular_fiber=max_ang,
                max_rel_error=float(rel_err.max()), kappa_chart=kappa)
    if max_base > base_tol or max_ang > base_tol:
        raise NotRadial("H_p has non-radial components on the conormal bundle", diag)
    if rel_err.max() > rel_tol:
        raise NotRadial("xi1 component of H_p differs from -2 kappa xi1^2", diag)
    if np.any(dp_norm == 0):
        raise NotRadial("dp vanishes on the conormal bundle", diag)
    return RadialPointReport(
        horizon=which, kappa_chart=kappa, samples=samples, p=np.array(p), dp_norm=dp_norm,
        fields=fields, fitted_constant=fitted, rates=rates, xi_r=np.sign(orientation * xi1),
        classification=["sink" if r > 0 else "source" for r in rates],
        max_base=max_base, max_angular_fiber=max_ang, max_rel_error=float(rel_err.max()))


@dataclass
class Bicharacteristic:
    """Trajectory of the flow of H_p / (2 |xi1|).

    ``tau`` is the rescaled flow parameter and ``t`` the original Hamiltonian
    time (dt/dtau = 1 / (2 |xi1|)).  Rates are fitted in ``tau`` after the
    first 20 % of the window.
    """

    tau: np.ndarray
    t: np.ndarray
    z: np.ndarray
    p: np.ndarray
    x1_rate: float
    angular_rate: float
    p_drift: float
    classification: str


def _fit_rate(tau, values, discard):
    """Exponential rate of ``|values|`` per unit of elapsed ``|tau|``."""
    elapsed = np.abs(tau - tau[0])
    keep = elapsed >= discard * elapsed[-1]
    y = np.log(np.abs(values[keep]))
    slope, _ = np.polyfit(elapsed[keep], y, 1)
    return float(slope)


def flow_bicharacteristic(params: SpacetimeParams, horizon_chart, pt: CotangentPoint,
                          T: float, steps: int = 200, rtol: float = 1e-11, atol: float = 1e-14,
                          discard: float = 0.2, rel_step: float = 1e-3) -> Bicharacteristic:
    """Integrate the homogeneous-degree-one rescaling of H_p from ``pt``.

    Near the conormal bundle ``|x1|`` and ``|xi_ang|/|xi1|`` change at the
    exponential rates ``2 kappa sgn(xi1)`` and ``kappa sgn(xi1)``; decay means
    the trajectory approaches N* (sink), growth means escape (source).  A
    negative ``T`` integrates backward; rates are then per unit of elapsed
    ``|tau|``, so reversing both xi and the direction keeps the class.

    Raises
    ------
    LeftChart
        If the base leaves the adapted chart.
    IntegrationFailure
        On solver failure.
    """
    which = _which(horizon_chart)
    roots = params.roots
    r_h = roots.radius(which)
    orientation = -1.0 if which == "event" else 1.0
    lo = roots.r_C if which == "event" else roots.r_e
    hi = roots.r_c if which == "event" else np.inf

    def rhs(_, y):
        z = y[:6]
        f, _ = _field(params, which, z, rel_step)
        speed = 2.0 * abs(z[3])
        return np.concatenate([f / speed, [1.0 / speed]])

    def leave(_, y):
        r = r_h + orientation * y[0]
        return min(r - lo, hi - r, y[2], np.pi - y[2])
    leave.terminal = True

    y0 = np.concatenate([pt.as_array(), [0.0]])
    grid = np.linspace(0.0, T, steps + 1)
    sol = solve_ivp(rhs, (0.0, T), y0, t_eval=grid, method="DOP853", rtol=rtol, atol=atol,
                    events=leave)
    if sol.status == 1:
        raise ChartExit("bicharacteristic left the adapted chart")
    if not sol.success:
        raise IntegrationFailure(sol.message)
    z = sol.y[:6].T
    p = _symbol(params, which, z)
    size = np.sum(z[:, 3:] ** 2, axis=1)
    p_drift = float(np.max(np.abs(p - p[0]) / size))
    tau = sol.t
    if np.all(z[:, 0] == 0) and np.all(z[:, 4:] == 0):
        x1_rate = angular_rate = 0.0
    else:
        x1_rate = _fit_rate(tau, z[:, 0], discard)
        ang = np.linalg.norm(z[:, 4:], axis=1) / np.abs(z[:, 3])
        angular_rate = _fit_rate(tau, ang, discard)
    return Bicharacteristic(tau=tau, t=sol.y[6], z=z, p=p, x1_rate=x1_rate,
                            angular_rate=angular_rate, p_drift=p_drift,
                            classification="sink" if x1_rate < 0 else "source")


def symbol_signature(params: SpacetimeParams, r: float, theta: float,
                     tol: float = 1e-12) -> str:
    """Signature class of the (r, theta) part of the dual metric in the star chart.

    Returns ``"elliptic"`` where the block is positive definite,
    ``"lorentzian"`` where it is indefinite and ``"degenerate"`` where an
    eigenvalue vanishes to ``tol`` (relative to the block's scale).
    """
    x = np.array([0.0, r, 0.0, theta])
    _, ginv = metric_components(params, Chart.STAR, x)
    block = ginv[np.ix_([1, 3], [1, 3])]
    eig = np.linalg.eigvalsh(block)
    scale = max(np.max(np.abs(eig)), 1.0 / max(1.0, r * r))
    if np.min(np.abs(eig)) <= tol * scale:
        return "degenerate"
    return "elliptic" if eig.min() > 0 else "lorentzian"

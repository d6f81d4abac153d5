"""Horizon Killing fields, surface gravity and the ergoregion condition."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from ..errors import DegenerateRoots, NotParallel, NotSubextremal, ParameterError
from .charts import Chart
from .curvature import DEFAULT_REL_STEP, christoffel, ricci_tensor
from .params import SpacetimeParams


@dataclass(frozen=True)
class HorizonData:
    """Per-horizon data.

    ``kappa_chart`` is filled in by :func:`kdsmodes.gnc.normal_form_check`.
    """

    which: str
    r_h: float
    omega: float
    kappa_geom: float
    kappa_spread: float
    nondegenerate: bool
    kappa_chart: float | None = None
    closed_form_ratio: float = math.nan
    thetas: tuple = ()
    kappas: tuple = ()

    def with_chart_kappa(self, kappa_chart: float) -> "HorizonData":
        return replace(self, kappa_chart=float(kappa_chart))


def _canonical(which: str) -> str:
    if which in ("event", "e"):
        return "event"
    if which in ("cosmological", "c"):
        return "cosmological"
    raise ValueError(f"unknown horizon {which!r}")


def horizon_killing_field(params: SpacetimeParams, which: str) -> np.ndarray:
    """Components of W = d_t* + Omega_h d_phi* in the star chart."""
    return np.array([1.0, 0.0, params.horizon_angular_velocity(which), 0.0])


def gauss_legendre_thetas(n: int) -> np.ndarray:
    """Polar angles at the Gauss-Legendre nodes in cos(theta), increasing."""
    x, _ = np.polynomial.legendre.leggauss(n)
    return np.sort(np.arccos(x))


def kappa_closed_form(params: SpacetimeParams, which: str) -> float:
    """Surface gravity of W in the star chart from mu'(r_h).

    With the time orientation of the star chart this is negative at both
    horizons; it is used as a diagnostic next to the finite-difference value.
    """
    which = _canonical(which)
    r_h = params.roots.radius(which)
    sign = -1.0 if which == "event" else 1.0
    return sign * float(params.dmu(r_h)) / (2.0 * params.b * (r_h**2 + params.a**2))


def surface_gravity_geom(params: SpacetimeParams, horizon: str, n_theta: int = 16,
                         phi: float = 0.0, t: float = 0.0,
                         rel_step: float = DEFAULT_REL_STEP,
                         parallel_tol: float = 1e-6) -> HorizonData:
    """Surface gravity from nabla_W W = kappa W on the horizon sphere.

    kappa is read off the t*-component (W^t* = 1) at Gauss-Legendre angles.

    Raises
    ------
    NotParallel
        If nabla_W W has a component off span(W) beyond ``parallel_tol``.
    """
    which = _canonical(horizon)
    r_h = params.roots.radius(which)
    W = horizon_killing_field(params, which)
    thetas = gauss_legendre_thetas(n_theta)
    kappas = []
    for th in thetas:
        gamma = christoffel(params, Chart.STAR, np.array([t, r_h, phi, th]), rel_step).christoffel
        acc = np.einsum("lmn,m,n->l", gamma, W, W)
        kappa = acc[0] / W[0]
        off = np.max(np.abs(acc - kappa * W))
        if off > parallel_tol * max(1.0, abs(kappa)):
            raise NotParallel(f"nabla_W W leaves span(W) by {off:.3e} at theta={th:.6f}")
        kappas.append(kappa)
    kappas = np.array(kappas)
    mean = float(np.mean(kappas))
    mu_prime = float(params.dmu(r_h))
    return HorizonData(
        which=which, r_h=r_h, omega=float(W[2]), kappa_geom=mean,
        kappa_spread=float(np.max(np.abs(kappas - mean))),
        nondegenerate=abs(mean) > 1e-10,
        closed_form_ratio=mean * 2.0 * params.b / mu_prime,
        thetas=tuple(thetas), kappas=tuple(kappas))


def ricci_killing_tangent(params: SpacetimeParams, horizon: str, theta: float,
                          phi: float = 0.0, rel_step: float = DEFAULT_REL_STEP) -> np.ndarray:
    """Ric(W, X) on the horizon for X = d_t*, d_phi*, d_theta (all tangent to it)."""
    which = _canonical(horizon)
    r_h = params.roots.radius(which)
    ric, _ = ricci_tensor(params, Chart.STAR, np.array([0.0, r_h, phi, theta]), rel_step)
    W = horizon_killing_field(params, which)
    return ric[[0, 2, 3]] @ W


@dataclass(frozen=True)
class ErgosphereVerdict:
    holds: bool
    inequality_margin: float
    direct_holds: bool
    witness_r: float | None
    margin: float
    interval: tuple

    @property
    def agree(self) -> bool:
        return self.holds == self.direct_holds


def _direct_interval(params: SpacetimeParams) -> tuple[float, float]:
    try:
        roots = params.roots
    except (DegenerateRoots, NotSubextremal):
        roots = None
    if params.Lambda == 0:
        r_e = roots.r_e if roots is not None else params.m
        return r_e, max(4.0 * params.m, 2.0 * r_e)
    if roots is not None:
        return roots.r_e, roots.r_c
    # extremal or non-subextremal: search the positive range where mu can exceed a^2
    return 0.0, 2.0 * math.sqrt(3.0 / params.Lambda)


def ergosphere_condition(params: SpacetimeParams, n_grid: int = 2001) -> ErgosphereVerdict:
    """Compare (1 - Lambda a^2/3)^3 > 9 m^2 Lambda with max(mu - a^2) > 0.

    The direct route maximizes mu - a^2 on a dense grid over (r_e, r_c),
    then refines the best bracket by golden-section search.
    """
    if params.Lambda < 0:
        raise ParameterError("Lambda must be non-negative")
    lam, a2, m = params.Lambda, params.a**2, params.m
    ineq = (1.0 - lam * a2 / 3.0) ** 3 - 9.0 * m**2 * lam

    lo, hi = _direct_interval(params)
    grid = np.linspace(lo, hi, n_grid)[1:-1]
    vals = params.mu(grid) - a2
    i = int(np.argmax(vals))
    br_lo = grid[max(i - 1, 0)]
    br_hi = grid[min(i + 1, len(grid) - 1)]
    r_best = float(grid[i])
    if br_lo < r_best < br_hi:
        r_best = float(optimize.golden(lambda r: -(float(params.mu(r)) - a2),
                                       brack=(br_lo, r_best, br_hi), tol=1e-12))
    best = float(params.mu(r_best)) - a2
    direct = best > 0
    return ErgosphereVerdict(holds=bool(ineq > 0), inequality_margin=float(ineq),
                             direct_holds=bool(direct), witness_r=r_best if direct else None,
                             margin=best, interval=(float(lo), float(hi)))

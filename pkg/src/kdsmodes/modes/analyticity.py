"""Chebyshev-coefficient decay as a numerical test of real analyticity.

A function analytic in a neighborhood of ``[r_h - delta, r_h + delta]`` has
Chebyshev coefficients bounded by ``C rho^{-n}`` with ``rho > 1`` the
parameter of the largest Bernstein ellipse of analyticity.  On a log scale
that is a straight line with slope ``-log10 rho``.  A function that is only
smooth decays faster than any power but slower than any geometric rate, so
its log-coefficients bend upward: the fitted rate keeps shrinking with n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import IntervalOutOfDomain, ParameterError
from ..spectral import cheb_coefficients, cheb_lobatto, interpolation_matrix

ANALYTIC = "analytic-consistent"
INCONCLUSIVE = "inconclusive"
FLAGGED = "non-analytic-flagged"


@dataclass(frozen=True)
class DecayFit:
    """Decay diagnostics of Chebyshev coefficients on one interval.

    Attributes
    ----------
    interval : (float, float)
    coefficients : ndarray
        ``|c_n|`` for n = 0..N_cheb-1.
    noise_floor : float
        Coefficients at or below this level are excluded from the fit.
    slope, intercept, r_squared : float
        Least-squares line through ``(n, log10 |c_n|)`` above the floor.
    head_slope, tail_slope : float
        Slopes of the first and second half of the fitted points; a geometric
        rate keeps them equal, sub-geometric decay makes the tail flatter.
    resolved : bool
        True when the last quarter of the coefficients is below the floor,
        i.e. the expansion has converged to working precision.
    verdict : str
        ``"analytic-consistent"``, ``"inconclusive"`` or ``"non-analytic-flagged"``.
    """

    interval: tuple
    coefficients: np.ndarray
    noise_floor: float
    slope: float
    intercept: float
    r_squared: float
    head_slope: float
    tail_slope: float
    n_fit: int
    resolved: bool
    verdict: str

    @property
    def analytic_consistent(self) -> bool:
        return self.verdict == ANALYTIC


def _line(n, y):
    if len(n) < 2:
        return np.nan, np.nan, np.nan
    slope, intercept = np.polyfit(n, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - (slope * n + intercept)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def decay_fit(coefficients, interval=(-1.0, 1.0), slope_min: float = 0.05,
              min_r_squared: float = 0.9, rate_ratio: float = 0.75, noise: float = 0.0) -> DecayFit:
    """Classify a Chebyshev coefficient sequence.

    The noise floor is ``max(1e-13 max|c|, eps, 2 noise)``, where ``noise``
    bounds the absolute error of the samples (a sample error ``e`` moves each
    coefficient by at most ``2 max|e|``).  The line is fitted through
    ``log10 |c_n|`` for the coefficients above the floor, starting at the
    largest one.  A resolved expansion (last quarter at or below the floor)
    with fewer than eight such coefficients is a polynomial to working
    precision; it is rated by the straight drop from its largest coefficient
    to the floor one index past its last one.  The verdict is
    analytic-consistent when the slope is at most ``-slope_min``, ``R^2 >=
    min_r_squared`` and, for unresolved expansions, the decay rate does not
    slow down (tail slope at least ``rate_ratio`` times the head slope).  It
    is flagged when the expansion is unresolved and either decays slower than
    ``slope_min`` or slows down; anything else is inconclusive.
    """
    c = np.abs(np.asarray(coefficients, dtype=complex))
    if c.ndim != 1 or len(c) < 8:
        raise ParameterError("need at least eight coefficients")
    if not np.all(np.isfinite(c)):
        raise ParameterError("coefficients must be finite")
    if c.max() == 0:
        return DecayFit(interval=tuple(float(t) for t in interval), coefficients=c,
                        noise_floor=np.finfo(float).eps, slope=np.nan, intercept=np.nan,
                        r_squared=np.nan, head_slope=np.nan, tail_slope=np.nan, n_fit=0,
                        resolved=False, verdict=INCONCLUSIVE)
    if noise < 0:
        raise ParameterError("noise must be nonnegative")
    floor = max(1e-13 * float(c.max()), np.finfo(float).eps, 2.0 * noise)
    above = c > floor
    if not np.any(above):
        return DecayFit(interval=tuple(float(t) for t in interval), coefficients=c,
                        noise_floor=floor, slope=np.nan, intercept=np.nan, r_squared=np.nan,
                        head_slope=np.nan, tail_slope=np.nan, n_fit=0, resolved=False,
                        verdict=INCONCLUSIVE)
    resolved = not np.any(above[int(np.ceil(0.75 * len(c))):])
    # decay starts at the largest coefficient; earlier ones describe shape
    n = np.nonzero(above)[0]
    n = n[n >= int(np.argmax(c))]
    y = np.log10(c[n])
    if resolved and len(n) < 8:
        # a short terminating expansion (a polynomial to working precision):
        # the rate is the drop from the largest coefficient to the floor
        stop = int(n[-1]) + 1
        n = np.array([n[0], stop])
        y = np.array([y[0], np.log10(floor)])
    slope, intercept, r2 = _line(n.astype(float), y)
    if len(n) >= 8:
        h = len(n) // 2
        head = _line(n[:h].astype(float), y[:h])[0]
        tail = _line(n[h:].astype(float), y[h:])[0]
    else:
        head = tail = slope
    steady = resolved or tail <= rate_ratio * head

    if len(n) >= 2 and slope <= -slope_min and r2 >= min_r_squared and steady:
        verdict = ANALYTIC
    elif not resolved and (slope > -slope_min or not steady):
        verdict = FLAGGED
    else:
        verdict = INCONCLUSIVE
    return DecayFit(interval=tuple(float(t) for t in interval), coefficients=c, noise_floor=floor,
                    slope=slope, intercept=intercept, r_squared=r2, head_slope=float(head),
                    tail_slope=float(tail), n_fit=int(len(n)), resolved=bool(resolved),
                    verdict=verdict)


@dataclass
class GridFunction:
    """``v(r, theta) = sin^{|k|}(theta) w(r, cos theta)`` from tensor-grid values of ``w``.

    Evaluation uses barycentric polynomial interpolation in ``r`` and ``cos theta``.
    """

    r: np.ndarray
    x: np.ndarray
    w: np.ndarray
    k: int = 0

    def __post_init__(self):
        self.w = np.asarray(self.w).reshape(len(self.r), len(self.x))

    @property
    def r_range(self) -> tuple[float, float]:
        return float(self.r[0]), float(self.r[-1])

    def __call__(self, r, theta):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        theta = float(theta)
        Ix = interpolation_matrix(self.x, np.cos(theta))[0]
        Ir = interpolation_matrix(self.r, r)
        return np.sin(theta) ** abs(self.k) * (Ir @ (self.w @ Ix))


def eigenfunction(problem, w) -> GridFunction:
    """Grid function of an eigenvector ``w`` of a mode problem."""
    return GridFunction(r=problem.r, x=problem.x, w=np.asarray(w), k=problem.k)


def analyticity_fit(v: Callable | GridFunction, r_h: float, delta: float, theta_slice: float = 1.0,
                    N_cheb: int = 32, slope_min: float = 0.05, noise: float = 0.0) -> DecayFit:
    """Chebyshev decay of ``r -> v(r, theta_slice)`` on ``[r_h - delta, r_h + delta]``.

    ``v`` is called as ``v(r_array, theta)``; ``noise`` bounds the absolute
    error of its values and raises the noise floor accordingly.  When it carries an ``r_range``
    (a :class:`GridFunction`) the interval must lie inside it.

    Raises
    ------
    IntervalOutOfDomain
        If the interval leaves the solver domain.
    """
    if delta <= 0:
        raise ParameterError("delta must be positive")
    lo, hi = r_h - delta, r_h + delta
    dom = getattr(v, "r_range", None)
    if dom is not None:
        tol = 1e-12 * max(1.0, abs(dom[1]))
        if lo < dom[0] - tol or hi > dom[1] + tol:
            raise IntervalOutOfDomain(f"[{lo}, {hi}] leaves the solver domain [{dom[0]}, {dom[1]}]")
    r = cheb_lobatto(N_cheb, lo, hi)
    samples = np.asarray(v(r, theta_slice))
    return decay_fit(cheb_coefficients(samples), (lo, hi), slope_min, noise=noise)


def certify_mode(result, index: int, delta: float | None = None, theta_slice: float | None = None,
                 N_cheb: int = 32, slope_min: float = 0.05) -> dict:
    """Decay fits of one accepted mode on intervals straddling both horizons.

    The sample error is estimated as the largest difference between the mode
    interpolated from the solver grid and from the refined grid (after
    aligning their phases) and is passed as ``noise``.  ``delta`` defaults
    to half the smaller horizon margin.  Without ``theta_slice`` each
    interval uses the solver angle where the mode is largest there, which
    keeps the slice off nodal lines of the angular profile.

    Returns
    -------
    dict
        ``{"event": DecayFit, "cosmological": DecayFit}``.
    """
    problem, fine = result.problem, result.refined_problem
    if problem is None:
        raise ParameterError("result does not carry its mode problem")
    params = problem.params
    c1, c2 = problem.grid.margins(params)
    delta = 0.5 * min(c1, c2) if delta is None else delta
    coarse = eigenfunction(problem, result.eigenvectors[index])
    refined = eigenfunction(fine, result.refined_eigenvectors[index])
    out = {}
    for name, r_h in (("event", params.roots.r_e), ("cosmological", params.roots.r_c)):
        r = cheb_lobatto(N_cheb, r_h - delta, r_h + delta)
        th = theta_slice
        if th is None:
            thetas = np.arccos(problem.x)
            th = float(thetas[np.argmax([np.linalg.norm(coarse(r, t)) for t in thetas])])
        a, b = coarse(r, th), refined(r, th)
        nb = np.vdot(b, b)
        noise = float(np.max(np.abs(a - b * (np.vdot(b, a) / nb)))) if nb != 0 else 0.0
        out[name] = analyticity_fit(coarse, r_h, delta, th, N_cheb, slope_min, noise=noise)
    return out


def bernstein_rho(pole_offset: float, delta: float) -> float:
    """Ellipse parameter for poles at ``+/- i pole_offset`` about the interval midpoint."""
    d = pole_offset / delta
    return float(d + np.sqrt(1.0 + d * d))


def runge_function(r_h: float, pole_offset: float = 1.0) -> Callable:
    """``1 / (1 + ((r - r_h)/pole_offset)^2)``, analytic with poles at ``r_h +/- i pole_offset``."""
    return lambda r, theta=None: 1.0 / (1.0 + ((np.asarray(r) - r_h) / pole_offset) ** 2)


def smooth_bump(r_h: float) -> Callable:
    """``exp(-1/(r - r_h))`` for ``r > r_h`` and 0 otherwise: smooth, not analytic at ``r_h``."""

    def f(r, theta=None):
        s = np.asarray(r, dtype=float) - r_h
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    return f

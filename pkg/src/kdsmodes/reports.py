"""Checks behind the command-line reports, returned as plain data.

Each function runs one family of numerical checks and returns a dict of
floats, ints, strings and lists; the command-line front-end serializes them
and the test suite asserts on them.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .config import RunConfig
from .geometry import (Chart, ChartPoint, SpacetimeParams, chart_map, einstein_residual,
                       ergosphere_condition, kappa_closed_form, metric_eval,
                       ricci_killing_tangent, step_halving_orders, surface_gravity_geom,
                       transition_jacobian)
from .gnc import MisnerModel, geodesic_normalize, misner_reduced_operator, normal_form_check
from .microlocal import (CotangentPoint, conormal_check, default_conormal_samples,
                         flow_bicharacteristic, radial_point_check)
from .modes import (analyticity_fit, assemble_reduced_operator, bernstein_rho, certify_mode,
                    misner_pencil, qnm_solve, runge_function, separated_oracle, smooth_bump)
from .spectral import cheb_lobatto


def horizons_of(params: SpacetimeParams) -> list[str]:
    return ["event", "cosmological"] if params.Lambda > 0 else ["event"]


def sobol_points(n: int, dim: int, seed: int) -> np.ndarray:
    """First ``n`` points of a scrambled Sobol sequence in ``[0, 1)^dim``."""
    m = max(1, math.ceil(math.log2(max(n, 2))))
    return qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)[:n]


def chart_samples(params: SpacetimeParams, chart: Chart, n: int, seed: int) -> np.ndarray:
    """``n`` quasi-random coordinate points well inside ``chart``.

    Radii stay away from chart boundaries and coordinate singularities: the
    Boyer-Lindquist chart keeps 5 % of the horizon gap off both horizons
    (its components blow up there, which amplifies finite-difference error), horizon-crossing charts
    straddle their horizon by a margin smaller than the distance to ``r_C``.
    """
    roots = params.roots
    u = sobol_points(n, 4, seed)
    if params.Lambda > 0:
        width = roots.r_c - roots.r_e
        margin = min(0.1 * width, 0.5 * (roots.r_e - roots.r_C))
        far = roots.r_c
    else:
        width = 5.0 * roots.r_e
        margin = min(0.1 * roots.r_e, 0.5 * (roots.r_e - roots.r_C))
        far = 6.0 * roots.r_e
    if chart is Chart.BL:
        lo, hi = roots.r_e + 0.05 * width, far - 0.05 * width
    elif chart is Chart.STAR:
        lo, hi = roots.r_e - margin, far + (margin if params.Lambda > 0 else 0.0)
    elif chart in (Chart.INTERMEDIATE_E, Chart.GNC_E):
        lo, hi = roots.r_e - margin, roots.r_e + margin
    else:
        lo, hi = roots.r_c - margin, roots.r_c + margin
    r = lo + (hi - lo) * u[:, 1]
    pts = np.empty((n, 4))
    pts[:, 0] = 2.0 * u[:, 0] - 1.0
    pts[:, 1] = r
    pts[:, 2] = 2.0 * np.pi * u[:, 2]
    pts[:, 3] = 0.05 + (np.pi - 0.1) * u[:, 3]
    if chart in (Chart.GNC_E, Chart.GNC_C):
        orientation = -1.0 if chart is Chart.GNC_E else 1.0
        pts[:, 1] = (r - params.roots.radius("event" if chart is Chart.GNC_E else "cosmological")) / orientation
    return pts


def kerr_charts(params: SpacetimeParams) -> list[Chart]:
    charts = [Chart.BL, Chart.STAR, Chart.INTERMEDIATE_E, Chart.GNC_E]
    if params.Lambda > 0:
        charts += [Chart.INTERMEDIATE_C, Chart.GNC_C]
    return charts


# ---------------------------------------------------------------------------

def horizons_report(params: SpacetimeParams, n_theta: int = 16) -> dict:
    """Roots, angular velocities, surface gravities and the ergosphere verdict."""
    roots = params.roots
    out = {
        "params": {"a": params.a, "m": params.m, "Lambda": params.Lambda},
        "roots": {"r0": roots.r0, "r_C": roots.r_C, "r_e": roots.r_e,
                  "r_c": roots.r_c if math.isfinite(roots.r_c) else None},
        "horizons": {},
    }
    for which in horizons_of(params):
        hd = surface_gravity_geom(params, which, n_theta=n_theta)
        out["horizons"][which] = {
            "r_h": hd.r_h, "omega": hd.omega, "kappa_geom": hd.kappa_geom,
            "kappa_spread": hd.kappa_spread, "kappa_closed_form": kappa_closed_form(params, which),
            "closed_form_ratio": hd.closed_form_ratio, "nondegenerate": hd.nondegenerate,
        }
    v = ergosphere_condition(params)
    out["ergosphere"] = {
        "inequality_holds": v.holds, "direct_holds": v.direct_holds, "agree": v.agree,
        "inequality_margin": v.inequality_margin, "direct_margin": v.margin,
        "witness_r": v.witness_r, "interval": list(v.interval),
    }
    return out


def geometry_report(params: SpacetimeParams, n_points: int = 100, seed: int = 0,
                    n_theta: int = 16, vacuum: bool = True) -> dict:
    """Inverse-pair identity, chart-overlap transport, vacuum residual and surface gravity.

    Overlap transport compares the metric of every chart with the star-chart
    metric pulled back through the explicit transition Jacobian.
    """
    charts = {}
    for j, chart in enumerate(kerr_charts(params)):
        pts = chart_samples(params, chart, n_points, seed + j)
        inv_err = over_err = vac = 0.0
        for x in pts:
            P = ChartPoint(chart, x)
            m = metric_eval(params, P)
            inv_err = max(inv_err, float(np.max(np.abs(m.g @ m.g_inv - np.eye(4)))))
            if chart is not Chart.STAR:
                q = chart_map(params, P, Chart.STAR)
                J = transition_jacobian(params, P)
                pulled = J.T @ metric_eval(params, q).g @ J
                over_err = max(over_err, float(np.max(np.abs(m.g - pulled)) / np.max(np.abs(m.g))))
            if vacuum:
                vac = max(vac, einstein_residual(params, chart, P))
        entry = {"n_points": int(len(pts)), "inverse_pair_max": inv_err,
                 "overlap_transport_max": over_err}
        if vacuum:
            entry["vacuum_residual_max"] = vac
            orders = [step_halving_orders(params, chart, x) for x in pts[:3]]
            entry["step_halving_orders"] = [[float(o) for o in row] for row in orders]
            entry["step_halving_order_median"] = float(np.median([row[-1] for row in orders]))
        charts[chart.value] = entry
    horizons = {}
    for which in horizons_of(params):
        hd = surface_gravity_geom(params, which, n_theta=n_theta)
        ric = max(float(np.max(np.abs(ricci_killing_tangent(params, which, th))))
                  for th in (0.3, 1.0, 2.0))
        horizons[which] = {"kappa_geom": hd.kappa_geom,
                           "kappa_relative_spread": hd.kappa_spread / abs(hd.kappa_geom),
                           "ricci_killing_tangent_max": ric}
    return {"params": {"a": params.a, "m": params.m, "Lambda": params.Lambda},
            "charts": charts, "horizons": horizons}


def misner_report(n_polys: int = 20, seed: int = 0, sigma: complex = 0.3 + 0.2j,
                  n_nodes: int = 10, degree: int = 5) -> dict:
    """Generic pencil assembly against the reduced Misner operator on random polynomials.

    Polynomials of degree at most ``degree`` in (x1, x2) are sampled on a
    Chebyshev grid, where differentiation is exact up to round-off.  The
    pencil is compared with the reduced operator and with the zeroth-order
    variant ``d1(x1 d1 v) - sum dj^2 v + 2 i sigma v``.
    """
    rng = np.random.default_rng(seed)
    axes = [cheb_lobatto(n_nodes, -1.0, 1.0), cheb_lobatto(n_nodes, -1.0, 1.0)]
    P0, P1, P2 = misner_pencil(2, axes)
    model = MisnerModel(2, sigma)
    X1, X2 = np.meshgrid(*axes, indexing="ij")
    reduced = displayed = 0.0
    for _ in range(n_polys):
        c = rng.standard_normal((degree + 1, degree + 1)) + 1j * rng.standard_normal((degree + 1, degree + 1))
        v = np.polynomial.polynomial.polyval2d(X1, X2, c)
        pv = (P0 @ v.ravel() + sigma * (P1 @ v.ravel()) + sigma**2 * (P2 @ v.ravel())).reshape(v.shape)
        scale = max(1.0, float(np.max(np.abs(pv))))
        for flag in (False, True):
            ref = misner_reduced_operator(model, v, axes, as_displayed=flag)
            err = float(np.max(np.abs(pv - ref))) / scale
            if flag:
                displayed = max(displayed, err)
            else:
                reduced = max(reduced, err)
    return {"n_polys": n_polys, "sigma": [sigma.real, sigma.imag],
            "reduced_operator_max": reduced, "zeroth_order_variant_max": displayed}


def gnc_report(params: SpacetimeParams, n_theta: int = 16, tol: float = 1e-10,
               misner_seed: int = 0) -> dict:
    """Normal form, geodesic normalization drifts and the Misner reduction."""
    out = {"params": {"a": params.a, "m": params.m, "Lambda": params.Lambda}, "horizons": {}}
    thetas = np.linspace(0.1, np.pi - 0.1, n_theta)
    for which in horizons_of(params):
        nf = normal_form_check(params, which, theta_grid=thetas, tol=tol)
        geo = geodesic_normalize(params, which, 1.0)
        out["horizons"][which] = {
            "kappa_chart": nf.kappa_chart,
            "kappa_relative_spread": nf.kappa_spread / abs(nf.kappa_chart),
            "max_frame_deviation": nf.max_frame_deviation,
            "max_chart_deviation": nf.max_chart_deviation,
            "lower_block_min_eig": nf.lower_block_min_eig,
            "psi_min": float(np.min(nf.psi)), "psi_max": float(np.max(nf.psi)),
            "geodesic_null_drift": geo.null_drift,
            "geodesic_killing_drift": geo.killing_drift,
            "geodesic_pairing_drift": float(np.max(np.abs(geo.pairing_drift))),
        }
    out["misner"] = misner_report(seed=misner_seed)
    return out


def radial_points_report(params: SpacetimeParams, n_samples: int = 32, rel_tol: float = 1e-6,
                         decades: float = 2.0, conormal_grid: int = 32):
    """Radial-point structure per horizon and sample trajectories.

    Returns
    -------
    report : dict
    trajectories : list of tuple
        Rows ``(horizon, sign of xi1, tau, t, x1, xi1, p)``.
    """
    report = {"params": {"a": params.a, "m": params.m, "Lambda": params.Lambda}, "horizons": {}}
    rows = []
    for which in horizons_of(params):
        rp = radial_point_check(params, which, default_conormal_samples(n_samples), rel_tol=rel_tol)
        cn = conormal_check(params, which, conormal_grid, conormal_grid)
        kappa = rp.kappa_chart
        T = decades * math.log(10.0) / (2.0 * abs(kappa))
        flows = {}
        for sign in (1.0, -1.0):
            pt = CotangentPoint((1e-4 * params.roots.radius(which), 0.3, 1.0), (sign, 1e-3, 1e-3))
            b = flow_bicharacteristic(params, which, pt, T)
            flows["positive" if sign > 0 else "negative"] = {
                "x1_rate": b.x1_rate, "x1_rate_ratio": abs(b.x1_rate) / (2.0 * abs(kappa)),
                "angular_rate": b.angular_rate, "p_drift": b.p_drift,
                "classification": b.classification,
            }
            rows += [(which, int(sign), float(tau), float(t), float(z[0]), float(z[3]), float(p))
                     for tau, t, z, p in zip(b.tau, b.t, b.z, b.p)]
        report["horizons"][which] = {
            "kappa_chart": kappa, "n_samples": int(len(rp.samples)),
            "max_base_field": rp.max_base, "max_angular_fiber": rp.max_angular_fiber,
            "max_rel_error": rp.max_rel_error,
            "classification_xi_r_positive": rp.classification_for_xi_r(1.0),
            "classification_xi_r_negative": rp.classification_for_xi_r(-1.0),
            "conormal_max": cn.conormal_max, "angular_min_ratio": cn.angular_min_ratio,
            "conormal_violations": cn.violations, "flows": flows,
        }
    return report, rows


def detector_report(params: SpacetimeParams, delta: float | None = None, N_cheb: int = 32,
                    slope_min: float = 0.05, runge_offset: float | None = None) -> dict:
    """Detector validity of the decay certifier at each horizon.

    A smooth non-analytic bump must not be certified; a Runge function must
    be certified with a tail rate close to ``-log10`` of its Bernstein
    parameter.
    """
    roots = params.roots
    if delta is None:
        c = 0.1 * (roots.r_c - roots.r_e) if params.Lambda > 0 else 0.1 * roots.r_e
        delta = 0.5 * c
    offset = 1.5 * delta if runge_offset is None else runge_offset
    out = {"delta": delta, "N_cheb": N_cheb, "horizons": {}}
    for which in horizons_of(params):
        r_h = roots.radius(which)
        bump = analyticity_fit(smooth_bump(r_h), r_h, delta, N_cheb=N_cheb, slope_min=slope_min)
        runge = analyticity_fit(runge_function(r_h, offset), r_h, delta, N_cheb=N_cheb,
                                slope_min=slope_min)
        rho = bernstein_rho(offset, delta)
        out["horizons"][which] = {
            "bump": fit_summary(bump),
            "runge": {**fit_summary(runge), "expected_slope": -math.log10(rho)},
        }
    return out


def fit_summary(fit) -> dict:
    return {"verdict": fit.verdict, "slope": fit.slope, "r_squared": fit.r_squared,
            "head_slope": fit.head_slope, "tail_slope": fit.tail_slope,
            "noise_floor": fit.noise_floor, "n_fit": fit.n_fit, "resolved": fit.resolved,
            "interval": list(fit.interval)}


def qnm_run(cfg: RunConfig, frame: str = "star") -> list:
    """Solve every configured k; returns a list of :class:`QnmResult`."""
    spec = cfg.op_spec.make_spec()
    grid = cfg.solver.make_grid()
    window = cfg.solver.make_window()
    results = []
    for k in cfg.solver.k:
        problem = assemble_reduced_operator(cfg.params, spec, k, grid, frame=frame)
        results.append(qnm_solve(problem, window, agreement_tol=cfg.solver.agreement_tol,
                                 residual_tol=cfg.solver.residual_tol))
    return results


def certificates(result, cfg: RunConfig) -> list:
    """Decay fits of every accepted mode of one result, as ``(index, {horizon: DecayFit})``."""
    an = cfg.analyticity
    return [(i, certify_mode(result, i, an.delta, N_cheb=an.N_cheb, slope_min=an.slope_min))
            for i in range(len(result.eigenvalues))]


def oracle_comparison(cfg: RunConfig, result, n_first: int = 3) -> dict:
    """Compare a k = 0 result with the separated radial solver at a = 0.

    For each degree ``ell <= oracle_ell_max`` the first ``n_first`` oracle
    modes are matched to the nearest 2-D eigenvalue.
    """
    spec = cfg.op_spec.make_spec()
    window = cfg.solver.make_window()
    vals = np.asarray(result.eigenvalues)
    out = {"ells": {}, "max_distance": 0.0}
    for ell in range(cfg.solver.oracle_ell_max + 1):
        ref = separated_oracle(cfg.params, spec, ell, window, cfg.solver.oracle_N,
                               c1=cfg.solver.c1, c2=cfg.solver.c2)[:n_first]
        dist = [float(np.min(np.abs(vals - s))) if vals.size else math.inf for s in ref]
        out["ells"][str(ell)] = {"oracle": [[s.real, s.imag] for s in ref], "distance": dist}
        if dist:
            out["max_distance"] = max(out["max_distance"], max(dist))
    return out

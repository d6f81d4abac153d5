"""Acceptance criteria, each at its stated tolerance; every test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline; they
are also collected in the terminal summary.
"""

import time

import numpy as np
import pytest
import sympy as sp
from scipy.stats import qmc

from conftest import LAMBDA, M, ROTATING_K, ROTATING_SPINS
from kdsmodes.errors import BlockFormViolation, DegenerateRoots, NotSubextremal
from kdsmodes.geometry import SpacetimeParams, ergosphere_condition, surface_gravity_geom
from kdsmodes.gnc import normal_form_check
from kdsmodes.microlocal import conormal_check
from kdsmodes.modes import certify_mode, separated_oracle
from kdsmodes.reports import detector_report, geometry_report, misner_report, radial_points_report

GEOMETRY_SETS = [SpacetimeParams(0.0, 1.0, 0.0), SpacetimeParams(0.1, 1.0, 0.02),
                 SpacetimeParams(0.5, 1.0, 0.01)]
ROTATING_SETS = [SpacetimeParams(0.0, 1.0, 0.0), SpacetimeParams(0.1, 1.0, 0.02),
                 SpacetimeParams(0.3, 1.0, 0.05)]


def test_displayed_formula_fidelity(verdict):
    start = time.perf_counter()
    reports = [geometry_report(p, n_points=100, seed=0, vacuum=False) for p in GEOMETRY_SETS]
    elapsed = time.perf_counter() - start
    inv = max(c["inverse_pair_max"] for r in reports for c in r["charts"].values())
    over = max(c["overlap_transport_max"] for r in reports for c in r["charts"].values())
    verdict("displayed-formula fidelity", inv < 1e-12 and over < 1e-10 and elapsed < 10.0,
            f"inverse pair {inv:.2e} < 1e-12, overlap transport {over:.2e} < 1e-10, "
            f"{elapsed:.1f} s < 10 s")


def test_vacuum_residual(verdict):
    start = time.perf_counter()
    reports = [geometry_report(p, n_points=100, seed=0) for p in GEOMETRY_SETS]
    elapsed = time.perf_counter() - start
    worst = max(c["vacuum_residual_max"] for r in reports for c in r["charts"].values())
    orders = [c["step_halving_order_median"] for r in reports for c in r["charts"].values()]
    ok = worst < 1e-5 and all(3.5 < o < 4.5 for o in orders) and elapsed < 60.0
    verdict("vacuum residual", ok,
            f"max |Ric - Lambda g| {worst:.2e} < 1e-5, step-halving orders "
            f"{min(orders):.2f}..{max(orders):.2f} (h^4), {elapsed:.1f} s < 60 s")


def _symbolic_schwarzschild_kappa():
    t, r, th, m = sp.symbols("t r theta m", positive=True)
    x = [t, r, sp.Symbol("phi"), th]
    f = 1 - 2 * m / r
    g = sp.Matrix([[-f, -1, 0, 0], [-1, 0, 0, 0],
                   [0, 0, r**2 * sp.sin(th) ** 2, 0], [0, 0, 0, r**2]])
    ginv = g.inv()
    gamma = sum(ginv[0, l] * (2 * sp.diff(g[l, 0], t) - sp.diff(g[0, 0], x[l])) for l in range(4)) / 2
    return float(sp.simplify(gamma).subs({m: 1, r: 2}))


def test_surface_gravity(verdict):
    spread = ric = kdiff = 0.0
    for p in GEOMETRY_SETS:
        rep = geometry_report(p, n_points=1, vacuum=False)
        for which, h in rep["horizons"].items():
            spread = max(spread, h["kappa_relative_spread"])
            ric = max(ric, h["ricci_killing_tangent_max"])
            chart = normal_form_check(p, which).kappa_chart
            kdiff = max(kdiff, abs(abs(chart) - abs(h["kappa_geom"])) / abs(h["kappa_geom"]))
    schw = surface_gravity_geom(GEOMETRY_SETS[0], "event").kappa_geom
    oracle = _symbolic_schwarzschild_kappa()
    ok = (spread < 1e-8 and ric < 1e-5 and kdiff < 1e-6 and abs(abs(schw) - 0.25) < 1e-6
          and abs(schw - oracle) < 1e-6)
    verdict("surface gravity", ok,
            f"theta spread {spread:.1e} < 1e-8, Ric(W,X) {ric:.1e} < 1e-5, "
            f"|k_geom|-|k_chart| {kdiff:.1e} < 1e-6, Schwarzschild {schw:.9f} (symbolic {oracle})")


def test_normal_form(verdict):
    worst, min_eig, psi_dev = 0.0, np.inf, 0.0
    for p in ROTATING_SETS + [SpacetimeParams(0.0, 1.0, 0.02)]:
        for which in (["event"] if p.Lambda == 0 else ["event", "cosmological"]):
            nf = normal_form_check(p, which, tol=1e-10)
            worst = max(worst, nf.max_frame_deviation)
            min_eig = min(min_eig, nf.lower_block_min_eig)
            if p.a == 0:
                psi_dev = max(psi_dev, float(np.max(np.abs(nf.psi - p.b))))
                worst = max(worst, nf.max_chart_deviation)
    ok = worst < 1e-10 and min_eig > 0 and psi_dev == 0.0
    verdict("normal form", ok,
            f"required components {worst:.1e} < 1e-10 (null frame; example chart at a = 0), "
            f"lower block min eigenvalue {min_eig:.3f} > 0, a = 0 psi - b = {psi_dev}")


@pytest.mark.xfail(raises=BlockFormViolation, strict=True,
                   reason="the explicit example chart has g12 != 0 at the horizon when a != 0")
def test_normal_form_in_example_chart_literal():
    # kept as a record: the adapted chart itself does not reach the block form
    normal_form_check(SpacetimeParams(0.3, 1.0, 0.05), "event", tol=1e-10, frame="chart")


def test_radial_point_structure(verdict):
    start = time.perf_counter()
    rel, ratios, opposite = 0.0, [], True
    for p in ROTATING_SETS:
        rep, _ = radial_points_report(p, n_samples=32, rel_tol=1e-6)
        hs = rep["horizons"]
        for h in hs.values():
            rel = max(rel, h["max_rel_error"])
            ratios += [f["x1_rate_ratio"] for f in h["flows"].values()]
        if p.Lambda > 0:
            opposite &= (hs["event"]["classification_xi_r_positive"]
                         != hs["cosmological"]["classification_xi_r_positive"])
    elapsed = time.perf_counter() - start
    spread = max(abs(r - 1.0) for r in ratios)
    ok = rel < 1e-6 and spread < 0.1 and opposite and elapsed < 60.0
    verdict("radial point structure", ok,
            f"H_p vs -2 kappa xi1^2 rel err {rel:.1e} < 1e-6, x1-rate / 2|kappa| within "
            f"{spread:.1%} < 10%, opposite classes at r_e, r_c: {opposite}, {elapsed:.1f} s < 60 s")


def test_conormal_characteristic_set(verdict):
    cmax, cmin, viol = 0.0, np.inf, 0
    for p in ROTATING_SETS:
        for which in (["event"] if p.Lambda == 0 else ["event", "cosmological"]):
            rep = conormal_check(p, which, n_x2=32, n_x3=32)
            cmax = max(cmax, rep.conormal_max)
            cmin = min(cmin, rep.angular_min_ratio)
            viol += rep.violations
    ok = cmax < 1e-13 and cmin > 0 and viol == 0
    verdict("conormal characteristic set", ok,
            f"|p| on pure xi1 {cmax:.1e}, min p/|xi_ang|^2 {cmin:.4f} > 0, violations {viol}")


def test_misner_keldysh_reduction(verdict):
    rep = misner_report(n_polys=20, seed=0)
    verdict("Misner Keldysh reduction", rep["reduced_operator_max"] < 1e-10,
            f"assembled pencil vs d1(x1 d1 v) - sum dj^2 v + 2 i sigma d1 v: "
            f"{rep['reduced_operator_max']:.1e} < 1e-10 on 20 polynomials")


@pytest.mark.xfail(strict=True, reason="the zeroth-order 2 i sigma v form is not the mode reduction")
def test_misner_keldysh_reduction_literal_display():
    rep = misner_report(n_polys=20, seed=0)
    print(f"[XFAIL] Misner literal display: difference {rep['zeroth_order_variant_max']:.3f}")
    assert rep["zeroth_order_variant_max"] < 1e-10


def test_qnm_oracle_equivalence(solve, verdict):
    res = solve(0.0, 0)
    elapsed = solve.wall_times[(0.0, 0, "star", (48, 12), True)]
    params = SpacetimeParams(0.0, M, LAMBDA)
    vals = res.eigenvalues
    first = 0.0
    union = []
    for ell in range(12):
        ref = separated_oracle(params, None, ell)
        union += list(ref)
        if ell <= 2:
            assert len(ref) >= 3
            first = max(first, max(np.min(np.abs(vals - s)) for s in ref[:3]))
    union = np.array(union)
    hausdorff = max(max(np.min(np.abs(union - s)) for s in vals),
                    max(np.min(np.abs(vals - s)) for s in union))
    ok = first < 1e-6 and elapsed < 300.0
    verdict("QNM oracle equivalence", ok,
            f"first 3 modes per l <= 2 within {first:.1e} < 1e-6 (Hausdorff over l <= 11: "
            f"{hausdorff:.1e}), solve {elapsed:.1f} s < 300 s")


def test_rotating_continuity(solve, verdict):
    drift, res_max, ref_max, counts = 0.0, 0.0, 0.0, []
    for k in ROTATING_K:
        spectra = [solve(a, k) for a in ROTATING_SPINS]
        for r in spectra:
            counts.append(len(r))
            res_max = max(res_max, float(np.max(r.residuals)), float(np.max(r.refined_residuals)))
            ref_max = max(ref_max, float(np.max(r.refinement_shift)))
        for lo, hi in zip(spectra, spectra[1:]):
            for A, B in ((lo.eigenvalues, hi.eigenvalues), (hi.eigenvalues, lo.eigenvalues)):
                drift = max(drift, max(np.min(np.abs(B - s)) for s in A))
    ok = min(counts) > 0 and drift < 0.2 and res_max < 1e-8 and ref_max < 1e-7
    verdict("rotating continuity", ok,
            f"drift {drift:.2e} < 0.2, residuals {res_max:.1e} < 1e-8, refinement "
            f"{ref_max:.1e} < 1e-7, modes per spectrum {min(counts)}..{max(counts)}")


def test_analyticity_certificate(solve, verdict):
    results = [solve(a, k) for a in ROTATING_SPINS for k in ROTATING_K]
    start = time.perf_counter()
    n, bad, worst_slope, worst_r2 = 0, [], -np.inf, np.inf
    for res in results:
        for i in range(len(res)):
            for which, fit in certify_mode(res, i).items():
                n += 1
                worst_slope = max(worst_slope, fit.slope)
                worst_r2 = min(worst_r2, fit.r_squared)
                if not fit.analytic_consistent:
                    bad.append((res.problem.params.a, res.k, i, which, fit.verdict))
    flagged = True
    for p in (SpacetimeParams(0.0, M, LAMBDA), SpacetimeParams(0.1, M, LAMBDA)):
        for h in detector_report(p)["horizons"].values():
            flagged &= h["bump"]["verdict"] != "analytic-consistent"
    elapsed = time.perf_counter() - start
    ok = not bad and n > 0 and flagged and elapsed < 60.0
    verdict("analyticity certificate", ok,
            f"{n - len(bad)}/{n} horizon fits analytic-consistent (max slope {worst_slope:.2f}, "
            f"min R^2 {worst_r2:.3f}), bump detected: {flagged}, {elapsed:.1f} s < 60 s")


def test_ergosphere_equivalence(verdict):
    sobol = qmc.Sobol(3, scramble=True, seed=0)
    triples = []
    while len(triples) < 50:
        u = sobol.random(1)[0]
        m = 0.5 + 1.5 * u[0]
        p = SpacetimeParams(m * 1.1 * u[1], m, 0.12 * u[2] / m**2)
        try:
            p.roots
        except (DegenerateRoots, NotSubextremal):
            continue
        triples.append(p)
    disagree = band = holds = 0
    for p in triples:
        v = ergosphere_condition(p)
        holds += v.holds
        if abs(v.inequality_margin) < 1e-10 or abs(v.margin) < 1e-10:
            band += 1
        elif not v.agree:
            disagree += 1
    verdict("ergosphere equivalence", disagree == 0,
            f"{disagree} disagreements on {len(triples)} subextremal triples "
            f"({holds} with the inequality true, {band} in the margin band)")


def test_joint_mode_shift(solve, verdict):
    worst, n = 0.0, 0
    for a in ROTATING_SPINS:
        omega = SpacetimeParams(a, M, LAMBDA).horizon_angular_velocity("event")
        for k in ROTATING_K:
            star = solve(a, k).eigenvalues
            event = solve(a, k, frame="event", refine=False).eigenvalues
            for s in star:
                worst = max(worst, float(np.min(np.abs(event - (s + omega * k)))))
                n += 1
    verdict("joint-mode shift", n > 0 and worst < 1e-8,
            f"|sigma_W - (sigma + Omega_h k)| {worst:.1e} < 1e-8 over {n} modes")

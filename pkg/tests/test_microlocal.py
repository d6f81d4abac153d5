import mpmath
import numpy as np
import pytest

from kdsmodes.errors import CharSetViolation, OutOfChart
from kdsmodes.geometry import SpacetimeParams, conformal_factor, horizon_charts, metric_components
from kdsmodes.gnc import normal_form_check
from kdsmodes.microlocal import (CotangentPoint, conormal_check, default_conormal_samples,
                                 flow_bicharacteristic, hamiltonian_field, principal_symbol,
                                 radial_point_check, symbol_signature)

SCHW = SpacetimeParams(0.0, 1.0, 0.0)
KDS = SpacetimeParams(0.3, 1.0, 0.05)
SDS = SpacetimeParams(0.1, 1.0, 0.02)


# ---------------------------------------------------------------------------
# principal symbol

def test_symbol_vanishes_at_zero_covector():
    pt = CotangentPoint((0.1, 0.4, 1.2), (0.0, 0.0, 0.0))
    assert principal_symbol(KDS, "event", pt) == 0.0


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_symbol_vanishes_on_pure_xi1_at_horizon(which):
    pt = CotangentPoint((0.0, 0.4, 1.2), (1.0, 0.0, 0.0))
    assert abs(principal_symbol(KDS, which, pt)) < 1e-13


def test_symbol_angular_entry_matches_high_precision_inversion():
    base = (0.0, 0.7, 1.1)
    _, chart = horizon_charts("event")
    g, _ = metric_components(KDS, chart, np.array((0.0,) + base), check=False)
    psi = float(conformal_factor(KDS, "event", np.array(base[2])))
    with mpmath.workdps(40):
        ginv = mpmath.inverse(mpmath.matrix((psi * g).tolist()))
        oracle = float(ginv[2, 2])
    value = principal_symbol(KDS, "event", CotangentPoint(base, (0.0, 1.0, 0.0)))
    assert value > 0
    assert abs(value - oracle) < 1e-10 * abs(oracle)


def test_symbol_outside_chart_raises():
    r_e = SCHW.roots.r_e
    with pytest.raises(OutOfChart):
        principal_symbol(SCHW, "event", CotangentPoint((r_e + 1.0, 0.0, 1.0), (1.0, 0.0, 0.0)))


def test_symbol_is_quadratic_in_fiber():
    pt = CotangentPoint((0.05, 1.0, 0.8), (0.3, -0.7, 1.1))
    lam = 2.7
    scaled = CotangentPoint(pt.base, tuple(lam * v for v in pt.xi))
    p0 = principal_symbol(KDS, "event", pt)
    assert principal_symbol(KDS, "event", scaled) == pytest.approx(lam**2 * p0, rel=1e-13)


# ---------------------------------------------------------------------------
# Hamiltonian field

def test_field_vanishes_at_zero_covector():
    f = hamiltonian_field(KDS, "event", CotangentPoint((0.1, 0.4, 1.2), (0.0, 0.0, 0.0)))
    assert np.all(f == 0.0)


def test_schwarzschild_field_on_conormal_bundle():
    f = hamiltonian_field(SCHW, "event", CotangentPoint((0.0, 0.3, 1.0), (1.0, 0.0, 0.0)))
    assert np.allclose(f, [0.0, 0.0, 0.0, 0.5, 0.0, 0.0], atol=1e-10)


# ---------------------------------------------------------------------------
# conormal characteristic set

def test_schwarzschild_angular_block_bound():
    rep = conormal_check(SCHW, "event")
    r_e = SCHW.roots.r_e
    assert rep.angular_min_ratio >= 1.0 / r_e**2 - 1e-12
    assert rep.violations == 0


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_kds_characteristic_set_is_conormal(which):
    rep = conormal_check(KDS, which, n_x2=32, n_x3=32)
    assert rep.conormal_max < 1e-13
    assert rep.angular_min_ratio > 0
    assert rep.violations == 0


def test_conormal_check_reports_witness():
    with pytest.raises(CharSetViolation) as info:
        conormal_check(KDS, "event", lower_bound=10.0)
    assert info.value.witness is not None


# ---------------------------------------------------------------------------
# radial points

def test_schwarzschild_radial_rate():
    rep = radial_point_check(SCHW, "event", samples=[[0.0, 0.3, 1.0, 1.0, 0.0, 0.0]])
    assert rep.rates[0] == pytest.approx(0.5, rel=1e-8)
    assert rep.kappa_chart == pytest.approx(-0.25, rel=1e-10)


def test_radial_component_scales_quadratically():
    one = radial_point_check(KDS, "event", samples=[[0.0, 0.3, 1.0, 1.0, 0.0, 0.0]])
    two = radial_point_check(KDS, "event", samples=[[0.0, 0.3, 1.0, 2.0, 0.0, 0.0]])
    assert two.fields[0, 3] == pytest.approx(4.0 * one.fields[0, 3], rel=1e-8)


def test_opposite_classification_at_the_two_horizons():
    ev = radial_point_check(KDS, "event", default_conormal_samples(32))
    co = radial_point_check(KDS, "cosmological", default_conormal_samples(32))
    assert ev.max_rel_error < 1e-6 and co.max_rel_error < 1e-6
    assert ev.max_base < 1e-8 and co.max_base < 1e-8
    for sign in (1.0, -1.0):
        assert ev.classification_for_xi_r(sign) != co.classification_for_xi_r(sign)


def test_radial_rate_uses_chart_surface_gravity():
    rep = radial_point_check(SDS, "cosmological")
    kappa = normal_form_check(SDS, "cosmological").kappa_chart
    assert np.allclose(rep.fitted_constant, -2.0 * kappa, rtol=1e-6)


# ---------------------------------------------------------------------------
# bicharacteristics

def _window(kappa, decades=2.0):
    return decades * np.log(10.0) / (2.0 * abs(kappa))


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_flow_rates_near_conormal_bundle(sign):
    T = _window(-0.25)
    b = flow_bicharacteristic(SCHW, "event", CotangentPoint((2e-4, 0.3, 1.0), (sign, 1e-3, 1e-3)), T)
    assert b.p_drift < 1e-8
    assert abs(abs(b.x1_rate) - 0.5) < 0.05
    assert abs(abs(b.angular_rate) - 0.25) < 0.025
    assert b.classification == ("sink" if sign > 0 else "source")


def test_flow_on_conormal_bundle_follows_riccati_law():
    kappa = -0.25
    for xi1 in (1.0, -1.0):
        b = flow_bicharacteristic(SCHW, "event", CotangentPoint((0.0, 0.3, 1.0), (xi1, 0.0, 0.0)), 3.0)
        assert np.max(np.abs(b.z[:, [0, 4, 5]])) < 1e-10
        oracle = xi1 / (1.0 + 2.0 * kappa * xi1 * b.t)
        assert np.max(np.abs(b.z[:, 3] - oracle) / np.abs(oracle)) < 1e-9


def test_classification_invariant_under_time_reversal():
    T = _window(-0.25)
    fwd = flow_bicharacteristic(SCHW, "event", CotangentPoint((2e-4, 0.3, 1.0), (1.0, 1e-3, 1e-3)), T)
    bwd = flow_bicharacteristic(SCHW, "event", CotangentPoint((2e-4, 0.3, 1.0), (-1.0, -1e-3, -1e-3)), -T)
    assert fwd.classification == bwd.classification
    assert bwd.x1_rate == pytest.approx(fwd.x1_rate, rel=1e-6)


# ---------------------------------------------------------------------------
# signature of the stationary symbol

def test_symbol_signature_classes():
    roots = KDS.roots
    assert symbol_signature(KDS, 0.5 * (roots.r_e + roots.r_c), 1.0) == "elliptic"
    assert symbol_signature(KDS, roots.r_e, 1.0) == "degenerate"
    assert symbol_signature(KDS, roots.r_e - 0.05, 1.0) == "lorentzian"
    assert symbol_signature(KDS, roots.r_c + 0.05, 1.0) == "lorentzian"

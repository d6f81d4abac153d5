import math

import numpy as np
import pytest

from kdsmodes.errors import OutOfChart
from kdsmodes.geometry import (Chart, ChartPoint, SpacetimeParams, chart_map, dual_metric_bl,
                               horizon_killing_field, metric_bl, metric_eval, metric_extended,
                               transition_jacobian)
from kdsmodes.reports import chart_samples, kerr_charts

KDS = SpacetimeParams(0.3, 1.0, 0.05)


def test_dual_metric_schwarzschild_closed_form():
    G = dual_metric_bl(SpacetimeParams(0.0, 1.0, 0.0), ChartPoint("BL", (0, 3.0, 0, math.pi / 2))).g_inv
    assert G[1, 1] == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert G[0, 0] == pytest.approx(-3.0, rel=1e-14)


def test_dual_metric_matches_high_precision_inversion():
    # 40-digit inversion of the Carter-form Boyer-Lindquist metric, order (t, r, phi, theta)
    expected = np.array([
        [-9.4420845684583006, 0.0, -0.399346435208835577, 0.0],
        [0.0, 0.108278159801177379, 0.0, 0.0],
        [-0.399346435208835577, 0.0, 0.204432021093653453, 0.0],
        [0.0, 0.0, 0.0, 0.159399985840505639]])
    G = dual_metric_bl(KDS, ChartPoint("BL", (0.0, 2.5, 0.0, 1.0))).g_inv
    assert np.allclose(G, expected, rtol=0, atol=1e-12)


def test_extended_metric_schwarzschild_horizon():
    g = metric_extended(SpacetimeParams(0.0, 1.0, 0.0), ChartPoint("STAR", (0, 2.0, 0, math.pi / 2))).g
    assert g[0, 0] == pytest.approx(0.0, abs=1e-15)
    assert g[0, 1] == pytest.approx(-1.0, abs=1e-15)


def test_extended_metric_at_event_horizon_is_regular():
    r_e = KDS.roots.r_e
    m = metric_extended(KDS, ChartPoint("STAR", (0.0, r_e, 0.0, 0.7)))
    assert abs(np.linalg.det(m.g)) > 1e-3
    assert abs(m.g_inv[1, 1]) < 1e-12  # G^{rr} = mu / rho^2 vanishes on the horizon
    W = horizon_killing_field(KDS, "event")
    assert abs(W @ m.g @ W) < 1e-10


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_horizon_killing_field_is_null(which):
    r_h = KDS.roots.radius(which)
    W = horizon_killing_field(KDS, which)
    for th in (0.2, 1.0, 2.5):
        g = metric_extended(KDS, ChartPoint("STAR", (0.0, r_h, 0.0, th))).g
        assert abs(W @ g @ W) < 1e-10


def test_inverse_pair_all_charts():
    for params in (SpacetimeParams(0, 1, 0), KDS, SpacetimeParams(0.5, 1.0, 0.0)):
        for chart in kerr_charts(params):
            for x in chart_samples(params, chart, 20, 3):
                m = metric_eval(params, ChartPoint(chart, x))
                assert np.abs(m.g @ m.g_inv - np.eye(4)).max() < 1e-12
                assert np.allclose(m.g, m.g.T) and np.allclose(m.g_inv, m.g_inv.T)


def test_lorentzian_signature_between_horizons():
    for chart in kerr_charts(KDS):
        for x in chart_samples(KDS, chart, 10, 5):
            ev = np.linalg.eigvalsh(metric_eval(KDS, ChartPoint(chart, x)).g)
            assert np.sum(ev < 0) == 1 and np.sum(ev > 0) == 3


def _fd_jacobian(params, point, h=1e-5):
    J = np.zeros((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        plus = chart_map(params, ChartPoint(point.chart, point.as_array() + e), Chart.STAR).as_array()
        minus = chart_map(params, ChartPoint(point.chart, point.as_array() - e), Chart.STAR).as_array()
        J[:, j] = (plus - minus) / (2 * h)
    return J


def test_pullback_consistency_bl_star():
    P = ChartPoint("BL", (0.4, 2.2, 1.3, 0.8))
    J = transition_jacobian(KDS, P)
    assert np.allclose(J, _fd_jacobian(KDS, P), atol=1e-7)
    g_bl = metric_bl(KDS, P).g
    g_star = metric_extended(KDS, chart_map(KDS, P, Chart.STAR)).g
    assert np.abs(g_bl - J.T @ g_star @ J).max() < 1e-10


@pytest.mark.parametrize("chart", ["INTERMEDIATE_e", "GNC_e", "INTERMEDIATE_c", "GNC_c"])
def test_transition_jacobian_matches_finite_differences(chart):
    x = chart_samples(KDS, Chart(chart), 1, 11)[0]
    P = ChartPoint(chart, x)
    assert np.allclose(transition_jacobian(KDS, P), _fd_jacobian(KDS, P), atol=1e-7)


def test_chart_map_identity_and_roundtrip():
    P = ChartPoint("BL", (0.3, 2.2, 0.5, 1.0))
    assert chart_map(KDS, P, "BL") == P
    back = chart_map(KDS, chart_map(KDS, P, "STAR"), "BL")
    assert np.allclose(back.as_array(), P.as_array(), atol=1e-10)


def test_star_shift_normalization_at_midpoint():
    r_mid = KDS.roots.r_mid
    P = ChartPoint("BL", (0.7, r_mid, 0.2, 1.0))
    assert np.allclose(chart_map(KDS, P, "STAR").as_array(), P.as_array(), atol=1e-14)


def test_adapted_coordinates_kerr():
    p = SpacetimeParams(0.5, 1.0, 0.0)
    omega = 0.5 / (p.roots.r_e**2 + 0.25)
    assert omega == pytest.approx(0.133975, abs=1e-6)
    P = ChartPoint("INTERMEDIATE_e", (1.5, p.roots.r_e - 0.1, 0.4, 1.0))
    Q = chart_map(p, P, "GNC_e")
    assert Q.coords[1] == pytest.approx(0.1, abs=1e-12)
    assert Q.coords[2] == pytest.approx(0.4 - omega * 1.5, abs=1e-12)


def test_out_of_chart():
    with pytest.raises(OutOfChart):
        metric_bl(KDS, ChartPoint("BL", (0, KDS.roots.r_e - 0.01, 0, 1.0)))
    with pytest.raises(OutOfChart):
        metric_eval(KDS, ChartPoint("STAR", (0, 2.5, 0, 0.0)))
    with pytest.raises(OutOfChart):
        metric_extended(KDS, ChartPoint("BL", (0, 2.5, 0, 1.0)))
    with pytest.raises(OutOfChart):
        metric_eval(SpacetimeParams(0, 1, 0), ChartPoint("INTERMEDIATE_c", (0, 3.0, 0, 1.0)))

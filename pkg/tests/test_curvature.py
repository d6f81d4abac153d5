import math

import numpy as np
import pytest

from kdsmodes.geometry import (Chart, ChartPoint, SpacetimeParams, christoffel, einstein_residual,
                               metric_eval, step_halving_orders)

SCHW = SpacetimeParams(0.0, 1.0, 0.0)


def test_schwarzschild_christoffels_closed_form():
    m, r, th = 1.0, 4.0, 1.1
    G = christoffel(SCHW, Chart.BL, ChartPoint("BL", (0.0, r, 0.3, th))).christoffel
    t, R, PHI, TH = 0, 1, 2, 3
    f = r - 2 * m
    expected = {
        (R, t, t): m * f / r**3, (t, t, R): m / (r * f), (R, R, R): -m / (r * f),
        (TH, R, TH): 1 / r, (R, TH, TH): -f, (PHI, R, PHI): 1 / r,
        (PHI, TH, PHI): math.cos(th) / math.sin(th), (R, PHI, PHI): -f * math.sin(th) ** 2,
        (TH, PHI, PHI): -math.sin(th) * math.cos(th),
    }
    for (l, i, j), value in expected.items():
        assert G[l, i, j] == pytest.approx(value, abs=1e-8)
    mask = np.ones_like(G, dtype=bool)
    for (l, i, j) in expected:
        mask[l, i, j] = mask[l, j, i] = False
    assert np.abs(G[mask]).max() < 1e-8


def test_christoffel_symmetry_and_metric_compatibility():
    p = SpacetimeParams(0.3, 1.0, 0.05)
    x = np.array([0.1, 2.6, 0.4, 0.9])
    G = christoffel(p, Chart.STAR, ChartPoint("STAR", x)).christoffel
    assert np.array_equal(G, np.transpose(G, (0, 2, 1)))
    g = metric_eval(p, ChartPoint("STAR", x)).g
    h = 1e-4
    dg = np.zeros((4, 4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        gp = metric_eval(p, ChartPoint("STAR", x + e)).g
        gm = metric_eval(p, ChartPoint("STAR", x - e)).g
        dg[k] = (gp - gm) / (2 * h)
    nabla = dg - np.einsum("lki,lj->kij", G, g) - np.einsum("lkj,il->kij", G, g)
    assert np.abs(nabla).max() < 1e-7


def test_vacuum_schwarzschild_bl():
    assert einstein_residual(SCHW, Chart.BL, ChartPoint("BL", (0, 4.0, 0, 1.1))) < 1e-6


def test_vacuum_kds_star_at_horizon():
    p = SpacetimeParams(0.3, 1.0, 0.05)
    x = ChartPoint("STAR", (0, p.roots.r_e, 0, 0.9))
    assert einstein_residual(p, Chart.STAR, x) < 1e-5


def test_step_halving_fourth_order():
    p = SpacetimeParams(0.3, 1.0, 0.05)
    orders = step_halving_orders(p, Chart.STAR, np.array([0, 3.0, 0, 1.0]))
    assert np.all(np.abs(orders - 4.0) < 0.5)


def test_misner_chart_is_flat():
    x = np.array([0.2, 0.3, 0.1, 0.4])
    assert einstein_residual(SCHW, Chart.MISNER, x) < 1e-8

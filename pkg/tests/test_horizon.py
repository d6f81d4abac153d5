import numpy as np
import pytest
import sympy as sp

from kdsmodes.errors import ParameterError
from kdsmodes.geometry import (SpacetimeParams, ergosphere_condition, kappa_closed_form,
                               ricci_killing_tangent, surface_gravity_geom)

KDS = SpacetimeParams(0.3, 1.0, 0.05)


def _symbolic_schwarzschild_kappa(m_value=1):
    """kappa from nabla_W W = kappa W for W = d_t on the extended Schwarzschild metric."""
    t, r, ph, th, m = sp.symbols("t r phi theta m", positive=True)
    x = [t, r, ph, th]
    f = 1 - 2 * m / r
    g = sp.Matrix([[-f, -1, 0, 0], [-1, 0, 0, 0],
                   [0, 0, r**2 * sp.sin(th) ** 2, 0], [0, 0, 0, r**2]])
    ginv = g.inv()
    # (nabla_W W)^t = Gamma^t_tt
    gamma = sum(ginv[0, l] * (2 * sp.diff(g[l, 0], t) - sp.diff(g[0, 0], x[l])) for l in range(4)) / 2
    return float(sp.simplify(gamma).subs({m: m_value, r: 2 * m_value}))


def test_schwarzschild_surface_gravity_symbolic_oracle():
    kappa_sym = _symbolic_schwarzschild_kappa()
    assert abs(kappa_sym) == pytest.approx(0.25, abs=1e-15)
    hd = surface_gravity_geom(SpacetimeParams(0.0, 1.0, 0.0), "event")
    assert abs(hd.kappa_geom) == pytest.approx(0.25, abs=1e-6)
    assert hd.kappa_geom == pytest.approx(kappa_sym, abs=1e-6)
    assert hd.kappa_spread < 1e-8 * 0.25
    assert hd.nondegenerate


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_kappa_constant_over_sphere(which):
    hd = surface_gravity_geom(KDS, which)
    assert np.std(hd.kappas) < 1e-8 * abs(hd.kappa_geom)
    assert hd.kappa_spread < 1e-8 * abs(hd.kappa_geom)


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_kappa_matches_closed_form(which):
    hd = surface_gravity_geom(KDS, which)
    r_h = KDS.roots.radius(which)
    assert abs(hd.kappa_geom) == pytest.approx(abs(KDS.dmu(r_h)) / (2 * KDS.b * (r_h**2 + KDS.a**2)),
                                               rel=1e-8)
    assert hd.kappa_geom == pytest.approx(kappa_closed_form(KDS, which), rel=1e-8)


def test_kappa_proportional_to_mu_prime_under_rescaling():
    # fixed a/m and Lambda m^2: kappa m and mu'(r_e)/m are scale invariant
    ratios = []
    for m in (1.0, 1.1, 1.35):
        p = SpacetimeParams(0.3 * m, m, 0.05 / m**2)
        hd = surface_gravity_geom(p, "event")
        ratios.append(hd.kappa_geom * m**2 / p.dmu(p.roots.r_e))
    assert np.ptp(ratios) < 1e-4 * abs(ratios[0])


def test_closed_form_ratio_diagnostic():
    # kappa 2b / mu'(r_e) differs from 1 by the factor 1/(r_e^2 + a^2)
    hd = surface_gravity_geom(KDS, "event")
    r_e = KDS.roots.r_e
    assert hd.closed_form_ratio == pytest.approx(-1.0 / (r_e**2 + KDS.a**2), rel=1e-8)


@pytest.mark.parametrize("which", ["event", "cosmological"])
def test_ricci_killing_tangent_vanishes(which):
    for th in (0.4, 1.3, 2.2):
        assert np.abs(ricci_killing_tangent(KDS, which, th)).max() < 1e-5


def test_cosmological_horizon_needs_lambda():
    with pytest.raises(ParameterError):
        surface_gravity_geom(SpacetimeParams(0.0, 1.0, 0.0), "cosmological")


def test_ergosphere_examples():
    v = ergosphere_condition(SpacetimeParams(0.0, 1.0, 0.0))
    assert v.holds and v.direct_holds and v.witness_r is not None
    v = ergosphere_condition(SpacetimeParams(0.0, 1.0, 1.0 / 9.0))
    assert not v.holds
    v = ergosphere_condition(SpacetimeParams(0.3, 1.0, 0.02))
    assert v.holds and v.direct_holds and v.agree and v.margin > 0

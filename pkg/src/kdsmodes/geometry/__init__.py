"""Kerr(-de Sitter) metrics, charts, curvature and horizon data."""

from .charts import (Chart, ChartPoint, MetricEval, adapted_frame, chart_map, check_in_chart,
                     conformal_factor, dual_metric_bl, horizon_charts, intermediate_shift_rates,
                     intermediate_shifts, metric_bl, metric_components, metric_eval, metric_extended, star_shifts,
                     transition_jacobian)
from .curvature import christoffel, einstein_residual, ricci_tensor, step_halving_orders
from .horizon import (ErgosphereVerdict, HorizonData, ergosphere_condition, gauss_legendre_thetas,
                      horizon_killing_field, kappa_closed_form, ricci_killing_tangent,
                      surface_gravity_geom)
from .params import RootSet, SpacetimeParams, find_horizons


def mu_eval(params: SpacetimeParams, r):
    """mu(r) = (r^2 + a^2)(1 - Lambda r^2/3) - 2 m r."""
    return params.mu(r)


__all__ = [
    "Chart", "ChartPoint", "ErgosphereVerdict", "HorizonData", "MetricEval", "RootSet",
    "SpacetimeParams", "adapted_frame", "chart_map", "check_in_chart", "christoffel",
    "conformal_factor", "dual_metric_bl", "einstein_residual", "ergosphere_condition",
    "find_horizons", "gauss_legendre_thetas", "horizon_charts", "horizon_killing_field",
    "intermediate_shift_rates", "intermediate_shifts", "kappa_closed_form", "metric_bl",
    "metric_components", "metric_eval", "metric_extended", "mu_eval", "ricci_killing_tangent", "ricci_tensor", "star_shifts",
    "step_halving_orders", "surface_gravity_geom", "transition_jacobian",
]

"""Christoffel symbols and Ricci curvature by finite differences.

Metric derivatives use fourth-order central stencils with a per-coordinate
step ``h_i = rel_step * max(1, |x_i|)``.  All stencil points are evaluated in
one vectorized metric call.  Ricci is assembled from first and second metric
derivatives, so no finite difference of a finite difference is ever taken.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import StepUnderflow
from .charts import Chart, ChartPoint, MetricEval, metric_components
from .params import SpacetimeParams

_D1 = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
_D2 = ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0))

DEFAULT_REL_STEP = 1e-3


def _steps(x: np.ndarray, rel_step: float) -> np.ndarray:
    h = rel_step * np.maximum(1.0, np.abs(x))
    if np.any(h < 1e4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))):
        raise StepUnderflow(f"step {h.min():.3e} below the round-off floor")
    return h


def metric_jets(params: SpacetimeParams, chart: Chart, x, rel_step: float = DEFAULT_REL_STEP,
                second: bool = True):
    """Metric, inverse, first and (optionally) second coordinate derivatives.

    Returns ``g, ginv, dg, ddg`` with ``dg[k, i, j] = d_k g_ij`` and
    ``ddg[k, l, i, j] = d_k d_l g_ij``.
    """
    x = np.asarray(x, dtype=float)
    h = _steps(x, rel_step)
    offsets = [np.zeros(4)]
    for k in range(4):
        for s, _ in _D1:
            offsets.append(s * h[k] * np.eye(4)[k])
    if second:
        for k, l in itertools.combinations(range(4), 2):
            for (s, _), (t, _) in itertools.product(_D1, _D1):
                offsets.append(s * h[k] * np.eye(4)[k] + t * h[l] * np.eye(4)[l])
    pts = x + np.array(offsets)
    gs, _ = metric_components(params, chart, pts, check=False)
    g, ginv = metric_components(params, chart, x, check=False)

    dg = np.zeros((4, 4, 4))
    ddg = np.zeros((4, 4, 4, 4))
    pos = 1
    for k in range(4):
        block = gs[pos:pos + 4]
        pos += 4
        dg[k] = sum(w * block[n] for n, (_, w) in enumerate(_D1)) / h[k]
        if second:
            stencil = {s: block[n] for n, (s, _) in enumerate(_D1)}
            stencil[0] = g
            ddg[k, k] = sum(w * stencil[s] for s, w in _D2) / h[k] ** 2
    if second:
        for k, l in itertools.combinations(range(4), 2):
            block = gs[pos:pos + 16]
            pos += 16
            acc = np.zeros((4, 4))
            for n, ((_, ws), (_, wt)) in enumerate(itertools.product(_D1, _D1)):
                acc += ws * wt * block[n]
            ddg[k, l] = ddg[l, k] = acc / (h[k] * h[l])
    return g, ginv, dg, ddg


def _christoffel_from(ginv, dg):
    # lowered symbols Gamma_{s,mu,nu} = (d_mu g_{s nu} + d_nu g_{s mu} - d_s g_{mu nu}) / 2
    low = 0.5 * (np.einsum("msn->smn", dg) + np.einsum("nsm->smn", dg) - dg)
    return np.einsum("ls,smn->lmn", ginv, low), low


def christoffel(params: SpacetimeParams, chart: Chart, point: ChartPoint | np.ndarray,
                rel_step: float = DEFAULT_REL_STEP) -> MetricEval:
    """Metric evaluation with Christoffel symbols ``Gamma[l, m, n] = Gamma^l_{mn}``."""
    if not isinstance(point, ChartPoint):
        point = ChartPoint(chart, tuple(point))
    g, ginv, dg, _ = metric_jets(params, point.chart, point.as_array(), rel_step, second=False)
    gamma, _ = _christoffel_from(ginv, dg)
    gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
    return MetricEval(g=g, g_inv=ginv, chart=point.chart, point=point, christoffel=gamma)


def ricci_tensor(params: SpacetimeParams, chart: Chart, x,
                 rel_step: float = DEFAULT_REL_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Ricci tensor R_{mu nu} and metric at ``x``."""
    g, ginv, dg, ddg = metric_jets(params, chart, np.asarray(x, dtype=float), rel_step)
    gamma, low = _christoffel_from(ginv, dg)
    # d_k g^{ls} = -g^{la} d_k g_{ab} g^{bs}
    dginv = -np.einsum("la,kab,bs->kls", ginv, dg, ginv)
    dlow =0.5 * (np.einsum("kmsn->ksmn", ddg) + np.einsum("knsm->ksmn", ddg) - ddg)
    dgamma = np.einsum("kls,smn->klmn", dginv, low) + np.einsum("ls,ksmn->klmn", ginv, dlow)
    ric = (np.einsum("llmn->mn", dgamma) - np.einsum("nlml->mn", dgamma)
           + np.einsum("lls,smn->mn", gamma, gamma) - np.einsum("lns,sml->mn", gamma, gamma))
    return 0.5 * (ric + ric.T), g


def einstein_residual(params: SpacetimeParams, chart: Chart, point: ChartPoint | np.ndarray,
                      rel_step: float = DEFAULT_REL_STEP) -> float:
    """max |Ric - Lambda g| over coordinate components."""
    if isinstance(point, ChartPoint):
        chart, x = point.chart, point.as_array()
    else:
        x = np.asarray(point, dtype=float)
    ric, g = ricci_tensor(params, chart, x, rel_step)
    lam = 0.0 if Chart(chart) is Chart.MISNER else params.Lambda
    return float(np.max(np.abs(ric - lam * g)))


def step_halving_orders(params: SpacetimeParams, chart: Chart, x,
                        steps=(0.08, 0.04, 0.02)) -> np.ndarray:
    """Observed convergence orders of the Ricci residual under step halving.

    Large steps are used so that truncation error dominates round-off; a
    fourth-order stencil gives orders close to 4.
    """
    res = np.array([einstein_residual(params, chart, x, s) for s in steps])
    return np.log2(res[:-1] / res[1:])

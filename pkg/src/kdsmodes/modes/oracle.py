"""Separated radial solver for a = 0, used as an independent check of the 2-D solver.

At a = 0 the angular part of ``r^2 (-Box)`` is the round Laplacian, so each
spherical-harmonic degree l gives a radial quadratic pencil

    P0 = -d_r(mu d_r) + l(l+1) + r^2 V,
    P1 = 2i F r^2 d_r + i (F' r^2 + 2 r F),
    P2 = E r^4,

with ``F`` the horizon shape function and ``E`` the dt*^2 weight of the dual
metric.  Unknowns are Chebyshev coefficients (not nodal values), collocated at
Chebyshev-Gauss points, and the pencil is solved by QZ; nothing is shared with
the nodal tensor-grid assembly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import chebyshev as cheb

from ..errors import EigensolverFailure, LambdaZeroUnsupported, ParameterError, ZeroVector
from ..geometry import SpacetimeParams
from .assembly import SpectralGrid, WaveOperatorSpec
from .solve import Window


@dataclass
class SeparatedPencil:
    """Radial pencil in Chebyshev-coefficient space for one degree ``ell``.

    ``Pj @ c`` gives the j-th coefficient operator at the collocation radii
    ``r`` for the coefficient vector ``c`` of the unknown on ``[lo, hi]``.
    """

    P0: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    r: np.ndarray
    lo: float
    hi: float
    ell: int

    def residual(self, sigma: complex, c: np.ndarray) -> float:
        """||P(sigma) c|| / ||c||."""
        c = np.asarray(c, dtype=complex)
        nc = np.linalg.norm(c)
        if nc == 0:
            raise ZeroVector("residual needs a nonzero coefficient vector")
        return float(np.linalg.norm((self.P0 + sigma * self.P1 + sigma**2 * self.P2) @ c) / nc)

    def evaluate(self, c: np.ndarray, r) -> np.ndarray:
        """Values of the expansion with coefficients ``c`` at radii ``r``."""
        xi = (2.0 * np.asarray(r, dtype=float) - self.lo - self.hi) / (self.hi - self.lo)
        return cheb.chebval(xi, c)


def _radial_lower_order(op_spec: WaveOperatorSpec, r: np.ndarray):
    """Mass/potential and (a^t, a^r) as functions of r; reject angular dependence."""
    th1, th2 = np.full_like(r, 0.7), np.full_like(r, 2.1)
    V = np.full(r.shape, op_spec.mass**2, dtype=complex)
    if op_spec.potential is not None:
        v1 = np.asarray(op_spec.potential(r, th1), dtype=complex)
        v2 = np.asarray(op_spec.potential(r, th2), dtype=complex)
        if not np.allclose(v1, v2, rtol=1e-13, atol=1e-14):
            raise ParameterError("the separated solver needs a potential depending on r only")
        V = V + v1
    at = np.zeros(r.shape, dtype=complex)
    ar = np.zeros(r.shape, dtype=complex)
    if op_spec.first_order is not None:
        c1 = [np.broadcast_to(np.asarray(c, dtype=complex), r.shape) for c in op_spec.first_order(r, th1)]
        c2 = [np.broadcast_to(np.asarray(c, dtype=complex), r.shape) for c in op_spec.first_order(r, th2)]
        if any(np.any(c1[j] != 0) for j in (2, 3)) or not all(np.allclose(p, q) for p, q in zip(c1, c2)):
            raise ParameterError("the separated solver needs radial first-order terms (a^t, a^r) of r only")
        at, ar = c1[0], c1[1]
    return V, at, ar


def separated_pencil(params: SpacetimeParams, op_spec: WaveOperatorSpec | None, ell: int, N: int,
                     c1: float | None = None, c2: float | None = None) -> SeparatedPencil:
    """Assemble the radial pencil of degree ``ell`` with ``N`` Chebyshev coefficients."""
    if params.Lambda == 0:
        raise LambdaZeroUnsupported("mode solving needs a cosmological horizon (Lambda > 0)")
    if params.a != 0:
        raise ParameterError("the separated solver applies to a = 0 only")
    if ell < 0:
        raise ParameterError("ell must be nonnegative")
    op_spec = WaveOperatorSpec() if op_spec is None else op_spec
    roots = params.roots
    r0, rC, re, rc = roots.r0, roots.r_C, roots.r_e, roots.r_c
    c1, c2 = SpectralGrid(16, 8, c1, c2).margins(params)
    lo, hi = re - c1, rc + c2
    if lo <= rC:
        raise ParameterError("r_e - c1 must exceed r_C")

    j = np.arange(N)
    xi = np.cos(np.pi * (j + 0.5) / N)[::-1]
    r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi
    scale = 2.0 / (hi - lo)
    T = cheb.chebvander(xi, N - 1)
    eye = np.eye(N)
    d1 = np.array([np.pad(cheb.chebder(eye[n]), (0, 1)) for n in range(N)]).T * scale
    d2 = np.array([np.pad(cheb.chebder(eye[n], 2), (0, 2)) for n in range(N)]).T * scale**2
    T1, T2 = T @ d1, T @ d2

    lam = params.Lambda
    mu = r**2 * (1.0 - lam * r**2 / 3.0) - 2.0 * params.m * r
    dmu = 2.0 * r - 4.0 * lam * r**3 / 3.0 - 2.0 * params.m
    F = 2.0 * (r - re) / (rc - re) - 1.0
    dF = 2.0 / (rc - re)
    E = -12.0 / (lam * (r - r0) * (r - rC) * (rc - re) ** 2)
    V, at, ar = _radial_lower_order(op_spec, r)

    P0 = (-mu[:, None] * T2 - dmu[:, None] * T1 + (ell * (ell + 1) + r**2 * V)[:, None] * T
          + (r**2 * ar)[:, None] * T1)
    P1 = 2j * (F * r**2)[:, None] * T1 + 1j * (dF * r**2 + 2.0 * r * F - r**2 * at)[:, None] * T
    P2 = (E * r**4)[:, None] * T
    return SeparatedPencil(P0=P0.astype(complex), P1=P1.astype(complex), P2=P2.astype(complex),
                           r=r, lo=lo, hi=hi, ell=ell)


def _qz(pen: SeparatedPencil):
    n = pen.P0.shape[0]
    Z, I = np.zeros((n, n)), np.eye(n)
    A = np.block([[Z, I], [-pen.P0, -pen.P1]])
    B = np.block([[I, Z], [Z, pen.P2]])
    try:
        vals = sla.eig(A, B, right=False)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return vals[np.isfinite(vals)]


def _refine(pen: SeparatedPencil, sigma: complex, cluster: bool):
    """Polish a root of det P(sigma); a cluster keeps its mean and takes the null vector."""
    n = pen.P0.shape[0]
    P = lambda s: pen.P0 + s * pen.P1 + s**2 * pen.P2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu = sla.lu_factor(P(sigma))
    if cluster or np.any(np.diag(lu[0]) == 0):
        # exact or split multiple root: keep sigma, take the null vector
        M = P(sigma)
        _, _, Vh = np.linalg.svd(M)
        c_svd = Vh[-1].conj()
        # re-solve with the dominant component pinned to 1 for a smaller residual
        j = int(np.argmax(np.abs(c_svd)))
        rest = np.delete(np.arange(n), j)
        y = np.linalg.lstsq(M[:, rest], -M[:, j], rcond=None)[0]
        c_pin = np.insert(y, j, 1.0)
        return sigma, min((c_svd, c_pin), key=lambda c: pen.residual(sigma, c))
    c = np.ones(n, dtype=complex)
    best = None
    for _ in range(4):
        c = sla.lu_solve(lu, (pen.P1 + 2 * sigma * pen.P2) @ c)
        if not np.all(np.isfinite(c)):
            break
        c /= np.linalg.norm(c)
        for _ in range(2):
            d = (pen.P1 + 2 * sigma * pen.P2) @ c
            sigma = sigma - np.vdot(d, P(sigma) @ c) / np.vdot(d, d)
        res = pen.residual(sigma, c)
        if best is None or res < best[0]:
            best = (res, sigma, c)
    if best is None:
        raise EigensolverFailure(f"inverse iteration failed near {sigma}")
    return best[1], best[2]


def _group(vals, tol):
    groups = []
    for v in vals[np.argsort(vals.real)]:
        for g in groups:
            if min(abs(v - u) for u in g) < tol:
                g.append(v)
                break
        else:
            groups.append([v])
    return groups


def _spectrum(pen: SeparatedPencil, window: Window, cluster_tol: float):
    vals = _qz(pen)
    vals = vals[window.contains(vals, pad=1e-3)]
    out = []
    for g in _group(vals, cluster_tol):
        s, c = _refine(pen, complex(np.mean(g)), len(g) > 1)
        if window.contains(s):
            out.append((s, pen.residual(s, c), c))
    return out


def separated_oracle(params: SpacetimeParams, op_spec: WaveOperatorSpec | None, ell: int,
                     window: Window | None = None, N: int = 48, *, c1: float | None = None,
                     c2: float | None = None, residual_tol: float = 1e-10,
                     agreement_tol: float = 1e-6, cluster_tol: float = 1e-6,
                     return_details: bool = False):
    """Modes of the degree-``ell`` radial problem at a = 0 inside ``window``.

    The pencil is solved with ``N`` and ``N + 16`` coefficients; a value is
    kept if its residual is below ``residual_tol`` at both sizes and the two
    agree within ``agreement_tol``.  QZ values closer than ``cluster_tol`` are
    merged to their mean (the zero mode of the pure wave operator is a split
    double root).

    Returns
    -------
    numpy.ndarray
        Complex eigenvalues sorted by ``|Im sigma|`` then ``Re sigma``.  With
        ``return_details=True`` a list of dicts with ``sigma``, ``residual``,
        ``coefficients``, ``shift`` and the coarse ``pencil`` is returned.
    """
    window = Window() if window is None else window
    coarse = separated_pencil(params, op_spec, ell, N, c1, c2)
    fine = separated_pencil(params, op_spec, ell, N + 16, c1, c2)
    lo_modes = _spectrum(coarse, window, cluster_tol)
    hi_modes = _spectrum(fine, window, cluster_tol)
    hi_vals = np.array([m[0] for m in hi_modes if m[1] < residual_tol])
    kept = []
    for s, res, c in lo_modes:
        if res >= residual_tol or hi_vals.size == 0:
            continue
        shift = float(np.min(np.abs(hi_vals - s)))
        if shift < agreement_tol:
            kept.append({"sigma": s, "residual": res, "coefficients": c, "shift": shift,
                         "pencil": coarse})
    kept.sort(key=lambda d: (round(abs(d["sigma"].imag), 9), d["sigma"].real))
    if return_details:
        return kept
    return np.array([d["sigma"] for d in kept], dtype=complex)

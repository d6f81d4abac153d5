"""Discretization of the mode-reduced wave operator.

For ``u = exp(-i sigma t - i sum_K omega_K y_K) v`` with Killing coordinates
``y_K`` and densitized dual metric ``Gh = sqrt|g| g^{-1}``, the operator
``sqrt|g| (-Box) u`` becomes

    -D_i Gh^{ij} D_j v + i omega_K (D_i Gh^{iK} v + Gh^{Ki} D_i v) + omega_K omega_L Gh^{KL} v,

a quadratic pencil in ``sigma``.  :func:`conservative_pencil` builds it on any
tensor grid.  For Kerr-de Sitter the spatial variables are ``(r, x = cos theta)``
and ``(r^2 + a^2 cos^2) (-Box)`` has ``Gh = rho^2 G``; the unknown is
``v = sin^{|k|}(theta) w`` and the pole-singular angular terms are replaced by
a regular operator on ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse

from ..errors import GridTooCoarse, LambdaZeroUnsupported, ParameterError
from ..geometry import SpacetimeParams
from ..geometry.charts import _horizon_shape
from ..spectral import cheb_lobatto, diff_matrix, gauss_legendre


@dataclass(frozen=True)
class WaveOperatorSpec:
    """Lower-order terms of ``P = -Box + a^mu d_mu + V``.

    ``first_order(r, theta)`` returns the four star-chart components
    ``(a^t, a^r, a^phi, a^theta)`` and ``potential(r, theta)`` returns V.
    Both must be independent of t_* and phi_*; ``mass`` adds ``mass^2`` to V.
    """

    first_order: Callable | None = None
    potential: Callable | None = None
    mass: float = 0.0

    @property
    def is_trivial(self) -> bool:
        return self.first_order is None and self.potential is None and self.mass == 0.0


@dataclass(frozen=True)
class SpectralGrid:
    """Chebyshev-Lobatto radial nodes on [r_e - c1, r_c + c2] and Gauss-Legendre nodes in cos(theta).

    ``c1``/``c2`` default to ``0.1 (r_c - r_e)``.
    """

    N_r: int
    N_theta: int
    c1: float | None = None
    c2: float | None = None

    def margins(self, params: SpacetimeParams) -> tuple[float, float]:
        roots = params.roots
        default = 0.1 * (roots.r_c - roots.r_e)
        return (default if self.c1 is None else self.c1, default if self.c2 is None else self.c2)

    def validate(self, params: SpacetimeParams) -> None:
        if self.N_r < 16 or self.N_theta < 8:
            raise GridTooCoarse(f"need N_r >= 16 and N_theta >= 8, got {self.N_r}, {self.N_theta}")
        c1, c2 = self.margins(params)
        if c1 <= 0 or c2 <= 0:
            raise ParameterError("horizon margins must be positive")
        if params.roots.r_e - c1 <= params.roots.r_C:
            raise ParameterError("r_e - c1 must exceed r_C")

    def nodes(self, params: SpacetimeParams) -> tuple[np.ndarray, np.ndarray]:
        c1, c2 = self.margins(params)
        roots = params.roots
        return cheb_lobatto(self.N_r, roots.r_e - c1, roots.r_c + c2), gauss_legendre(self.N_theta)

    def refined(self) -> "SpectralGrid":
        return SpectralGrid(math.ceil(1.5 * self.N_r), self.N_theta + 4, self.c1, self.c2)


@dataclass
class ModeProblem:
    """Pencil ``P(sigma) = P2 sigma^2 + P1 sigma + P0`` acting on ``w`` at the tensor nodes.

    Flat index is ``i_r * N_theta + i_x``.  ``omega`` is the angular velocity
    of the time-translation field (0 for d_t*, Omega_h for the horizon field).
    """

    P0: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    params: SpacetimeParams
    op_spec: WaveOperatorSpec
    grid: SpectralGrid
    k: int
    r: np.ndarray
    x: np.ndarray
    omega: float = 0.0
    frame: str = "star"
    D_r: np.ndarray = field(default=None, repr=False)
    D_x: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.P0.shape[0]

    def pencil(self, sigma: complex) -> np.ndarray:
        return self.P0 + sigma * self.P1 + sigma**2 * self.P2

    def pencil_derivative(self, sigma: complex) -> np.ndarray:
        return self.P1 + 2.0 * sigma * self.P2

    def apply(self, sigma: complex, v: np.ndarray) -> np.ndarray:
        """P(sigma) v without forming P(sigma)."""
        return self.P0 @ v + sigma * (self.P1 @ v) + sigma**2 * (self.P2 @ v)

    def apply_derivative(self, sigma: complex, v: np.ndarray) -> np.ndarray:
        """P'(sigma) v without forming P'(sigma)."""
        return self.P1 @ v + 2.0 * sigma * (self.P2 @ v)

    def to_v(self, w: np.ndarray) -> np.ndarray:
        """Values of v = sin^{|k|} theta w on the (N_r, N_theta) grid."""
        s = np.sqrt(1.0 - self.x**2) ** abs(self.k)
        return w.reshape(len(self.r), len(self.x)) * s[None, :]


# ---------------------------------------------------------------------------
# generic engine

def _kron_axis(D: np.ndarray, sizes: list, axis: int) -> sparse.csr_matrix:
    out = sparse.identity(1, format="csr")
    for j, n in enumerate(sizes):
        out = sparse.kron(out, sparse.csr_matrix(D) if j == axis else sparse.identity(n), "csr")
    return out


def conservative_pencil(axes, spatial, mixed_time, mixed_other, time_time, time_other,
                        other_other, diff=None):
    """Pencil of the densitized mode operator on a tensor grid.

    Parameters
    ----------
    axes : list of 1-D node arrays for the spatial variables.
    spatial : dict ``(i, j) -> array`` of Gh^{ij} on the grid (symmetric pairs implied).
    mixed_time : dict ``i -> array`` of Gh^{i t}.
    mixed_other : dict ``i -> array`` of ``sum_K omega_K Gh^{iK}`` over non-time Killing directions.
    time_time : array, Gh^{tt}.
    time_other : array, ``sum_K omega_K Gh^{tK}``.
    other_other : array, ``sum_{K,L} omega_K omega_L Gh^{KL}``.
    diff : list of differentiation matrices, one per axis (default: barycentric).

    Returns
    -------
    P0, P1, P2 : complex dense arrays
    """
    sizes = [len(a) for a in axes]
    n = int(np.prod(sizes))
    D = [diff_matrix(a) if diff is None else diff[j] for j, a in enumerate(axes)]
    big = [_kron_axis(Dj, sizes, j) for j, Dj in enumerate(D)]

    def diag(arr):
        return sparse.diags(np.broadcast_to(arr, sizes).reshape(n).astype(complex), format="csr")

    P0 = sparse.csr_matrix((n, n), dtype=complex)
    P1 = sparse.csr_matrix((n, n), dtype=complex)
    for (i, j), coef in spatial.items():
        P0 = P0 - big[i] @ diag(coef) @ big[j]
        if i != j:
            P0 = P0 - big[j] @ diag(coef) @ big[i]
    for i, coef in mixed_time.items():
        P1 = P1 + 1j * (big[i] @ diag(coef) + diag(coef) @ big[i])
    for i, coef in mixed_other.items():
        P0 = P0 + 1j * (big[i] @ diag(coef) + diag(coef) @ big[i])
    P1 = P1 + 2.0 * diag(time_other)
    P0 = P0 + diag(other_other)
    P2 = diag(time_time)
    return P0.toarray(), P1.toarray(), P2.toarray()


# ---------------------------------------------------------------------------
# Kerr-de Sitter

def densitized_dual(params: SpacetimeParams, r, x, omega: float = 0.0) -> dict:
    """rho^2 G in the star chart, optionally in the frame (t', phi' = phi_* - omega t_*).

    ``phiphi`` excludes the pole-singular part ``b^2/(c sin^2)``, which is
    handled by the angular operator.  ``xx`` is the cos(theta) component.
    """
    a, b = params.a, params.b
    F, w = _horizon_shape(params, r)
    E = -b**2 * w
    R2 = r**2 + a**2
    s2 = 1.0 - x**2
    c = 1.0 + params.Lambda * a**2 / 3.0 * x**2
    out = {
        "rr": params.mu(r), "rt": b * F * R2, "rphi": b * F * a,
        "tt": E * R2**2 + b**2 * a**2 * s2 / c,
        "tphi": E * a * R2 + b**2 * a / c,
        "phiphi": E * a**2,
        "xx": s2 * c,
    }
    if omega:
        tt, tphi = out["tt"], out["tphi"]
        out["phiphi"] = out["phiphi"] - 2.0 * omega * tphi + omega**2 * tt
        out["tphi"] = tphi - omega * tt
        out["rphi"] = out["rphi"] - omega * out["rt"]
    return out


def angular_operator(x: np.ndarray, k: int, lam_a2: float, D: np.ndarray | None = None) -> np.ndarray:
    """Regular form of ``s^{-m} [d_x((1-x^2) c d_x) - m^2 b^2/(c (1-x^2))] s^m`` with m = |k|.

    ``lam_a2`` is ``Lambda a^2 / 3``; ``c = 1 + lam_a2 x^2`` and ``b = 1 + lam_a2``.
    """
    m = abs(k)
    lam = lam_a2
    D = diff_matrix(x) if D is None else D
    c = 1.0 + lam * x**2
    cp = 2.0 * lam * x
    R = lam**2 * x**4 + (lam**2 + 2.0 * lam) * x**2 + (1.0 + lam) ** 2
    D2 = D @ D
    return (np.diag(c * (1.0 - x**2)) @ D2
            + np.diag(cp * (1.0 - x**2) - 2.0 * c * (m + 1) * x) @ D
            - np.diag(cp * m * x + c * m + m**2 * R / c))


def _horizon_omega(params: SpacetimeParams, frame: str) -> float:
    if frame == "star":
        return 0.0
    if frame in ("event", "cosmological", "e", "c"):
        return params.horizon_angular_velocity(frame)
    raise ValueError(f"unknown frame {frame!r}")


def assemble_reduced_operator(params: SpacetimeParams, op_spec: WaveOperatorSpec | None,
                              k: int, grid: SpectralGrid, frame: str = "star") -> ModeProblem:
    """Discretize ``rho^2 P`` for modes ``exp(-i sigma t - i k phi) sin^{|k|}(theta) w(r, cos theta)``.

    Parameters
    ----------
    frame : {"star", "event", "cosmological"}
        ``"star"`` uses ``(t_*, phi_*)``.  A horizon name uses the joint modes of
        ``W = d_t* + Omega_h d_phi*`` and ``d_phi*``, i.e. the coordinates
        ``(t_*, phi_* - Omega_h t_*)``, so eigenvalues are shifted by ``Omega_h k``.

    Raises
    ------
    LambdaZeroUnsupported
        For Lambda = 0.
    GridTooCoarse
        If the grid is below the minimum size or the radial second-derivative
        matrix amplifies round-off beyond 1e-2.
    """
    if params.Lambda == 0:
        raise LambdaZeroUnsupported("mode solving needs a cosmological horizon (Lambda > 0)")
    op_spec = WaveOperatorSpec() if op_spec is None else op_spec
    grid.validate(params)
    omega = _horizon_omega(params, frame)
    r, x = grid.nodes(params)
    Dr = diff_matrix(r)
    Dx = diff_matrix(x)
    if np.linalg.norm(Dr @ Dr, np.inf) * np.finfo(float).eps > 1e-2:
        raise GridTooCoarse("radial differentiation matrix is too ill-conditioned")
    R, X = np.meshgrid(r, x, indexing="ij")
    G = densitized_dual(params, R, X, omega)

    P0, P1, P2 = conservative_pencil(
        [r, x], spatial={(0, 0): G["rr"]}, mixed_time={0: G["rt"]},
        mixed_other={0: k * G["rphi"]}, time_time=G["tt"], time_other=k * G["tphi"],
        other_other=k**2 * G["phiphi"], diff=[Dr, Dx])
    A = angular_operator(x, k, params.Lambda * params.a**2 / 3.0, Dx)
    P0 -= np.kron(np.eye(len(r)), A)

    if not op_spec.is_trivial:
        n = R.size
        theta = np.arccos(X)
        rho2 = (R**2 + params.a**2 * X**2).reshape(n)
        V = np.full(R.shape, op_spec.mass**2, dtype=complex)
        if op_spec.potential is not None:
            V = V + np.asarray(op_spec.potential(R, theta), dtype=complex)
        P0 += np.diag(rho2 * V.reshape(n))
        if op_spec.first_order is not None:
            at, ar, aphi, ath = (np.broadcast_to(np.asarray(c, dtype=complex), R.shape).reshape(n)
                                 for c in op_spec.first_order(R, theta))
            # a^t d_t* + a^phi d_phi* = a^t d_t' + (a^phi - omega a^t) d_phi'
            aphi = aphi - omega * at
            s = np.sqrt(1.0 - X**2).reshape(n)
            m = abs(k)
            Drb = np.kron(Dr, np.eye(len(x)))
            Dxb = np.kron(np.eye(len(r)), Dx)
            # d_theta (s^m w) = s^m (-s d_x w + m x w / s)
            ang = -np.diag(s) @ Dxb + np.diag(m * X.reshape(n) / s)
            P0 += np.diag(rho2) @ (np.diag(ar) @ Drb + np.diag(ath) @ ang - 1j * k * np.diag(aphi))
            P1 += np.diag(rho2 * (-1j) * at)

    return ModeProblem(P0=P0, P1=P1, P2=P2, params=params, op_spec=op_spec, grid=grid, k=k,
                       r=r, x=x, omega=omega, frame="star" if omega == 0 else frame,
                       D_r=Dr, D_x=Dx)


def misner_pencil(n: int, axes) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pencil of the Misner operator from the generic engine.

    The metric ``2 dx1 dx0 + x1 dx0^2 + sum dxj^2`` has unit volume density,
    ``g^{11} = -x1``, ``g^{01} = 1``, ``g^{jj} = 1`` and ``g^{00} = 0``.
    """
    if len(axes) != n:
        raise ValueError("one axis per spatial variable")
    mesh = np.meshgrid(*axes, indexing="ij")
    spatial = {(0, 0): -mesh[0]}
    for j in range(1, n):
        spatial[(j, j)] = np.ones_like(mesh[0])
    zero = np.zeros_like(mesh[0])
    return conservative_pencil(list(axes), spatial, mixed_time={0: np.ones_like(mesh[0])},
                               mixed_other={}, time_time=zero, time_other=zero, other_other=zero)

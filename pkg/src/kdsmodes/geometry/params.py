"""Kerr(-de Sitter) parameters and the horizon polynomial mu(r)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import DegenerateRoots, NotSubextremal, ParameterError


@dataclass(frozen=True)
class SpacetimeParams:
    """Spin ``a``, mass ``m`` and cosmological constant ``Lambda``.

    Construction only checks ``m > 0`` and ``Lambda >= 0``; subextremality is
    checked by :func:`find_horizons` (and hence by :attr:`roots`).
    """

    a: float
    m: float
    Lambda: float = 0.0

    def __post_init__(self):
        for name in ("a", "m", "Lambda"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.m <= 0:
            raise ParameterError(f"mass must be positive, got m={self.m}")
        if self.Lambda < 0:
            raise ParameterError(f"Lambda must be non-negative, got {self.Lambda}")

    @property
    def b(self) -> float:
        return 1.0 + self.Lambda * self.a**2 / 3.0

    @property
    def has_cosmological_horizon(self) -> bool:
        return self.Lambda > 0

    def mu(self, r):
        r = np.asarray(r, dtype=float)
        return (r**2 + self.a**2) * (1.0 - self.Lambda * r**2 / 3.0) - 2.0 * self.m * r

    def dmu(self, r):
        """Analytic derivative mu'(r)."""
        r = np.asarray(r, dtype=float)
        return (2.0 * r * (1.0 - self.Lambda * r**2 / 3.0)
                - (2.0 / 3.0) * self.Lambda * r * (r**2 + self.a**2) - 2.0 * self.m)

    def c_theta(self, theta):
        return 1.0 + self.Lambda * self.a**2 / 3.0 * np.cos(theta) ** 2

    def mu_coefficients(self) -> np.ndarray:
        """Monomial coefficients of mu, highest degree first."""
        a2, lam, m = self.a**2, self.Lambda, self.m
        if lam > 0:
            return np.array([-lam / 3.0, 0.0, 1.0 - lam * a2 / 3.0, -2.0 * m, a2])
        return np.array([1.0, -2.0 * m, a2])

    @cached_property
    def roots(self) -> "RootSet":
        return find_horizons(self)

    def horizon_angular_velocity(self, which: str) -> float:
        return self.a / (self.roots.radius(which) ** 2 + self.a**2)


@dataclass(frozen=True)
class RootSet:
    """Ordered real roots of mu; ``r_c`` is ``inf`` and ``r0`` is ``None`` for Lambda = 0."""

    roots: tuple
    r0: float | None
    r_C: float
    r_e: float
    r_c: float

    def radius(self, which: str) -> float:
        if which in ("event", "e"):
            return self.r_e
        if which in ("cosmological", "c"):
            if not math.isfinite(self.r_c):
                raise ParameterError("no cosmological horizon when Lambda = 0")
            return self.r_c
        raise ValueError(f"unknown horizon {which!r}")

    @property
    def r_mid(self) -> float:
        """Normalization radius for the star-coordinate quadratures."""
        if math.isfinite(self.r_c):
            return 0.5 * (self.r_e + self.r_c)
        return 2.0 * self.r_e


def _newton_polish(params: SpacetimeParams, r: float, steps: int = 2) -> float:
    for _ in range(steps):
        d = float(params.dmu(r))
        if d == 0.0:
            break
        r -= float(params.mu(r)) / d
    return r


def find_horizons(params: SpacetimeParams, *, imag_tol: float = 1e-7,
                  degenerate_tol: float = 1e-6) -> RootSet:
    """Locate and label the real roots of mu.

    Roots come from the eigenvalues of the companion matrix of the quartic
    (quadratic when Lambda = 0) and are polished by two Newton steps.

    Raises
    ------
    DegenerateRoots
        Two roots closer than ``degenerate_tol * max(1, m)``.
    NotSubextremal
        Wrong number of real roots.
    ParameterError
        For ``0 < Lambda m^2 < eps^2``, where ``r_c / r_e`` exceeds ``1/eps``
        and the quartic cannot be resolved in double precision.
    """
    scale = max(1.0, params.m)
    eps = np.finfo(float).eps
    if 0 < params.Lambda * max(params.m, params.a) ** 2 < eps**2:
        raise ParameterError(f"Lambda = {params.Lambda:g} is too small to separate r_c from r_e; "
                             "use Lambda = 0")
    z = np.roots(params.mu_coefficients())
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            if abs(z[i] - z[j]) < degenerate_tol * scale:
                raise DegenerateRoots(
                    f"roots {z[i]:.12g} and {z[j]:.12g} coincide (extremal parameters {params})")

    real = np.sort([zz.real for zz in z if abs(zz.imag) <= imag_tol * max(1.0, abs(zz))])
    expected = 4 if params.Lambda > 0 else 2
    if len(real) != expected:
        raise NotSubextremal(
            f"mu has {len(real)} real roots, expected {expected} (parameters {params})")

    polished = tuple(_newton_polish(params, float(r)) for r in real)
    if params.Lambda > 0:
        r0, r_C, r_e, r_c = polished
    else:
        r0 = None
        r_C, r_e = polished
        r_c = math.inf
    return RootSet(roots=polished, r0=r0, r_C=r_C, r_e=r_e, r_c=r_c)

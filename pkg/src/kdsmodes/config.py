"""Run configuration for the batch front-end.

The configuration is a TOML file with the tables below; every key is
optional and unknown tables or keys are rejected.

.. code-block:: toml

    seed = 0
    out = "out"

    [params]
    a = 0.0
    m = 1.0
    Lambda = 0.02

    [solver]
    k = [0]
    N_r = 48
    N_theta = 12
    # c1 = 0.4          # horizon margins; default 0.1 (r_c - r_e)
    # c2 = 0.4
    window = { re_min = -1.0, re_max = 1.0, im_min = -0.05, im_max = 0.2 }
    residual_tol = 1e-8
    agreement_tol = 1e-6
    oracle_N = 48
    oracle_ell_max = 2

    [geometry]
    n_points = 100
    inverse_tol = 1e-12
    overlap_tol = 1e-10
    vacuum_tol = 1e-5
    n_theta = 16
    normal_form_tol = 1e-10
    radial_samples = 32
    radial_tol = 1e-6
    flow_decades = 2.0
    conormal_grid = 32

    [analyticity]
    # delta = 0.2       # half-width of the interval; default half the smaller margin
    N_cheb = 32
    slope_min = 0.05

    [op_spec]
    mass = 0.0
    potential_r_poly = []   # V(r) = sum_j c_j r^j added to mass^2
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ParameterError
from .geometry import SpacetimeParams
from .modes import SpectralGrid, WaveOperatorSpec, Window


@dataclass(frozen=True)
class SolverConfig:
    k: tuple = (0,)
    N_r: int = 48
    N_theta: int = 12
    c1: float | None = None
    c2: float | None = None
    window: dict = field(default_factory=lambda: dataclasses.asdict(Window()))
    residual_tol: float = 1e-8
    agreement_tol: float = 1e-6
    oracle_N: int = 48
    oracle_ell_max: int = 2

    def make_window(self) -> Window:
        return Window(**self.window)

    def make_grid(self) -> SpectralGrid:
        return SpectralGrid(self.N_r, self.N_theta, self.c1, self.c2)


@dataclass(frozen=True)
class GeometryConfig:
    n_points: int = 100
    inverse_tol: float = 1e-12
    overlap_tol: float = 1e-10
    vacuum_tol: float = 1e-5
    n_theta: int = 16
    normal_form_tol: float = 1e-10
    radial_samples: int = 32
    radial_tol: float = 1e-6
    flow_decades: float = 2.0
    conormal_grid: int = 32


@dataclass(frozen=True)
class AnalyticityConfig:
    delta: float | None = None
    N_cheb: int = 32
    slope_min: float = 0.05


@dataclass(frozen=True)
class OpSpecConfig:
    mass: float = 0.0
    potential_r_poly: tuple = ()

    def make_spec(self) -> WaveOperatorSpec:
        coeffs = np.asarray(self.potential_r_poly, dtype=float)
        if coeffs.size == 0 or not np.any(coeffs):
            return WaveOperatorSpec(mass=self.mass)
        poly = np.polynomial.Polynomial(coeffs)
        return WaveOperatorSpec(mass=self.mass,
                                potential=lambda r, theta: poly(np.asarray(r)) + 0.0 * np.asarray(theta))


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    Attributes
    ----------
    params : SpacetimeParams
    solver, geometry, analyticity, op_spec : block dataclasses
    out : str
        Output directory.
    seed : int
        Seed of the scrambled Sobol sample points.
    """

    params: SpacetimeParams = field(default_factory=lambda: SpacetimeParams(0.0, 1.0, 0.02))
    solver: SolverConfig = field(default_factory=SolverConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    analyticity: AnalyticityConfig = field(default_factory=AnalyticityConfig)
    op_spec: OpSpecConfig = field(default_factory=OpSpecConfig)
    out: str = "out"
    seed: int = 0

    def echo(self) -> dict:
        """Plain-data copy of the configuration for reports and manifests."""
        d = dataclasses.asdict(self)
        d["params"] = {"a": self.params.a, "m": self.params.m, "Lambda": self.params.Lambda}
        return d


_BLOCKS = {"solver": SolverConfig, "geometry": GeometryConfig,
           "analyticity": AnalyticityConfig, "op_spec": OpSpecConfig}
_WINDOW_KEYS = {f.name for f in dataclasses.fields(Window)}


def _check_keys(block: str, data: dict, allowed) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ParameterError(f"unknown key(s) in [{block}]: {', '.join(unknown)}")


def _number(block, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"[{block}] {key} must be a number")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ParameterError(f"[{block}] {key} must be an integer")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"[{block}] {key} must be finite")
    return value


def _build_block(name: str, data: dict):
    cls = _BLOCKS[name]
    if not isinstance(data, dict):
        raise ParameterError(f"[{name}] must be a table")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    _check_keys(name, data, fields)
    defaults = cls()
    kwargs = {}
    for key, value in data.items():
        default = getattr(defaults, key)
        if key == "window":
            if not isinstance(value, dict):
                raise ParameterError("[solver] window must be a table")
            _check_keys("solver.window", value, _WINDOW_KEYS)
            w = dict(default)
            w.update({kk: _number("solver.window", kk, vv) for kk, vv in value.items()})
            kwargs[key] = w
        elif key in ("k", "potential_r_poly"):
            if not isinstance(value, list):
                raise ParameterError(f"[{name}] {key} must be an array")
            kind = int if key == "k" else float
            kwargs[key] = tuple(_number(name, key, v, kind) for v in value)
        elif isinstance(default, int) and not isinstance(default, bool):
            kwargs[key] = _number(name, key, value, int)
        else:
            kwargs[key] = _number(name, key, value)
    return cls(**kwargs)


def _validate(cfg: RunConfig) -> None:
    cfg.params.roots  # raises NotSubextremal / DegenerateRoots
    s = cfg.solver
    if not s.k:
        raise ParameterError("[solver] k must list at least one mode number")
    if s.N_r < 16 or s.N_theta < 8:
        raise ParameterError("[solver] need N_r >= 16 and N_theta >= 8")
    for name in ("residual_tol", "agreement_tol"):
        if getattr(s, name) <= 0:
            raise ParameterError(f"[solver] {name} must be positive")
    for name in ("c1", "c2"):
        if getattr(s, name) is not None and getattr(s, name) <= 0:
            raise ParameterError(f"[solver] {name} must be positive")
    if s.oracle_N < 8 or s.oracle_ell_max < 0:
        raise ParameterError("[solver] oracle_N >= 8 and oracle_ell_max >= 0 required")
    w = s.make_window()
    if not (w.re_min < w.re_max and w.im_min < w.im_max):
        raise ParameterError("[solver] window must have re_min < re_max and im_min < im_max")
    g = cfg.geometry
    for f in dataclasses.fields(g):
        if getattr(g, f.name) <= 0:
            raise ParameterError(f"[geometry] {f.name} must be positive")
    an = cfg.analyticity
    if an.delta is not None and an.delta <= 0:
        raise ParameterError("[analyticity] delta must be positive")
    if an.N_cheb < 8 or an.slope_min <= 0:
        raise ParameterError("[analyticity] N_cheb >= 8 and slope_min > 0 required")
    if cfg.op_spec.mass < 0:
        raise ParameterError("[op_spec] mass must be nonnegative")
    if not 0 <= cfg.seed < 2**64:
        raise ParameterError("seed must be an unsigned 64-bit integer")


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a :class:`RunConfig` from parsed TOML data.

    Raises
    ------
    ParameterError
        On unknown keys, wrong types, nonpositive tolerances or parameters
        without a valid horizon structure.
    """
    _check_keys("top level", data, {"params", "out", "seed", *_BLOCKS})
    kwargs = {}
    p = data.get("params", {})
    if not isinstance(p, dict):
        raise ParameterError("[params] must be a table")
    _check_keys("params", p, {"a", "m", "Lambda"})
    try:
        kwargs["params"] = SpacetimeParams(_number("params", "a", p.get("a", 0.0)),
                                           _number("params", "m", p.get("m", 1.0)),
                                           _number("params", "Lambda", p.get("Lambda", 0.02)))
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    for name in _BLOCKS:
        if name in data:
            kwargs[name] = _build_block(name, data[name])
    if "out" in data:
        if not isinstance(data["out"], str):
            raise ParameterError("out must be a string")
        kwargs["out"] = data["out"]
    if "seed" in data:
        kwargs["seed"] = _number("top level", "seed", data["seed"], int)
    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    """Read a TOML configuration file; ``None`` gives the default configuration."""
    if path is None:
        cfg = RunConfig()
        _validate(cfg)
        return cfg
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"malformed configuration: {exc}") from exc
    return config_from_dict(data)

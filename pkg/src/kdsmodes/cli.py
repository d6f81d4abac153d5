"""Command-line front-end: ``kdsmodes <command> [--config PATH] [--out DIR] [--seed N] [--quiet]``.

Every command writes its outputs atomically into the output directory and
records them, with SHA-256 digests and wall times, in ``manifest.json``.
Exit codes: 0 success, 1 internal error, 2 invalid parameters, 3 unsupported
regime (Lambda = 0 for mode solving).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import GridTooCoarse, IntervalOutOfDomain, LambdaZeroUnsupported, ParameterError
from .modes import eigenfunction

EXIT_OK, EXIT_INTERNAL, EXIT_PARAMS, EXIT_UNSUPPORTED = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# serialization

def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(data) -> str:
    return json.dumps(_plain(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> str:
    """Write UTF-8 text through a temporary file and rename; return its SHA-256."""
    data = text.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Output:
    """Collects the files one command writes."""

    def __init__(self, out_dir: Path):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def json(self, name: str, data) -> None:
        self.files[name] = write_atomic(self.dir / name, json_text(data))

    def csv(self, name: str, header, rows) -> None:
        self.files[name] = write_atomic(self.dir / name, csv_text(header, rows))


def update_manifest(out_dir: Path, cfg: RunConfig, command: str, status: str,
                    wall_time: float, files: dict) -> None:
    path = Path(out_dir) / "manifest.json"
    manifest = {"version": __version__, "commands": {}, "files": {}}
    if path.exists():
        try:
            old = json.loads(path.read_text("utf-8"))
            manifest["commands"].update(old.get("commands", {}))
            manifest["files"].update(old.get("files", {}))
        except (OSError, ValueError):
            pass
    manifest["config"] = cfg.echo()
    manifest["commands"][command] = {"status": status, "wall_time": wall_time,
                                     "files": sorted(files)}
    manifest["files"].update(files)
    write_atomic(path, json_text(manifest))


# ---------------------------------------------------------------------------
# commands

def cmd_horizons(cfg: RunConfig, out: Output) -> dict:
    from .reports import horizons_report
    rep = horizons_report(cfg.params, cfg.geometry.n_theta)
    out.json("horizons.json", rep)
    return rep


def cmd_geometry_check(cfg: RunConfig, out: Output) -> dict:
    from .reports import geometry_report
    g = cfg.geometry
    rep = geometry_report(cfg.params, g.n_points, cfg.seed, g.n_theta)
    worst = lambda key: max(c[key] for c in rep["charts"].values())
    rep["summary"] = {
        "inverse_pair_pass": worst("inverse_pair_max") < g.inverse_tol,
        "overlap_transport_pass": worst("overlap_transport_max") < g.overlap_tol,
        "vacuum_pass": worst("vacuum_residual_max") < g.vacuum_tol,
    }
    out.json("geometry.json", rep)
    return rep


def cmd_gnc_check(cfg: RunConfig, out: Output) -> dict:
    from .reports import gnc_report
    rep = gnc_report(cfg.params, cfg.geometry.n_theta, cfg.geometry.normal_form_tol, cfg.seed)
    out.json("gnc.json", rep)
    return rep


def cmd_radial_points(cfg: RunConfig, out: Output) -> dict:
    from .reports import radial_points_report
    g = cfg.geometry
    rep, rows = radial_points_report(cfg.params, g.radial_samples, g.radial_tol,
                                     g.flow_decades, g.conormal_grid)
    out.json("radial_points.json", rep)
    out.csv("trajectories.csv", ["horizon", "xi1_sign", "tau", "t", "x1", "xi1", "p"], rows)
    return rep


def cmd_analyticity(cfg: RunConfig, out: Output) -> dict:
    from .reports import detector_report
    an = cfg.analyticity
    rep = detector_report(cfg.params, an.delta, an.N_cheb, an.slope_min)
    out.json("analyticity.json", rep)
    rows = []
    for which, d in rep["horizons"].items():
        rows += [(which, name, d[name]["verdict"], d[name]["slope"], d[name]["r_squared"])
                 for name in ("bump", "runge")]
    out.csv("detector.csv", ["horizon", "function", "verdict", "slope", "r_squared"], rows)
    return rep


def cmd_qnm(cfg: RunConfig, out: Output) -> dict:
    from .reports import certificates, oracle_comparison, qnm_run
    if cfg.params.Lambda == 0:
        raise LambdaZeroUnsupported("mode solving needs a cosmological horizon (Lambda > 0)")
    results = qnm_run(cfg)
    spectrum, fits = [], []
    summary = {"modes": {}, "window": dataclasses.asdict(cfg.solver.make_window())}
    for res in results:
        certs = dict(certificates(res, cfg))
        for i, s in enumerate(res.eigenvalues):
            spectrum.append((res.k, s.real, s.imag, res.residuals[i], res.refinement_shift[i]))
            f = eigenfunction(res.problem, res.eigenvectors[i])
            thetas = np.arccos(res.problem.x)
            rows = []
            for th in thetas:
                vals = f(res.problem.r, th)
                rows += [(r, th, v.real, v.imag) for r, v in zip(res.problem.r, vals)]
            out.csv(f"eigenfunction_k{res.k}_{i}.csv", ["r", "theta", "re_v", "im_v"], rows)
            for which, fit in certs[i].items():
                fits.append((res.k, i, which, fit.verdict, fit.slope, fit.r_squared, fit.head_slope,
                             fit.tail_slope, fit.noise_floor, fit.interval[0], fit.interval[1]))
        summary["modes"][str(res.k)] = {
            "count": len(res.eigenvalues),
            "max_residual": max(res.residuals, default=0.0),
            "max_refinement_shift": max(res.refinement_shift, default=0.0),
            "rejected": len(res.rejected),
            "all_analytic_consistent": all(f.analytic_consistent for c in certs.values() for f in c.values()),
        }
    out.csv("spectrum.csv", ["k", "re_sigma", "im_sigma", "residual", "refinement_agreement"], spectrum)
    out.csv("decay_fits.csv", ["k", "mode", "horizon", "verdict", "slope", "r_squared", "head_slope",
                               "tail_slope", "noise_floor", "r_lo", "r_hi"], fits)
    if cfg.params.a == 0 and 0 in cfg.solver.k:
        res0 = results[list(cfg.solver.k).index(0)]
        summary["oracle"] = oracle_comparison(cfg, res0)
    out.json("qnm.json", summary)
    return summary


COMMANDS = {
    "horizons": cmd_horizons,
    "geometry-check": cmd_geometry_check,
    "gnc-check": cmd_gnc_check,
    "radial-points": cmd_radial_points,
    "qnm": cmd_qnm,
    "analyticity": cmd_analyticity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kdsmodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="TOML run configuration")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed for quasi-random samples (u64)")
        p.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.out is not None:
            overrides["out"] = str(args.out)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ParameterError("seed must be an unsigned 64-bit integer")
            overrides["seed"] = args.seed
        cfg = dataclasses.replace(cfg, **overrides)
        out = Output(Path(cfg.out))
        start = time.perf_counter()
        report = COMMANDS[args.command](cfg, out)
        update_manifest(out.dir, cfg, args.command, "ok", time.perf_counter() - start, out.files)
    except LambdaZeroUnsupported as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ParameterError, GridTooCoarse, IntervalOutOfDomain) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except Exception as exc:  # noqa: BLE001 - report anything else as an internal error
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if not args.quiet:
        print(f"{args.command}: wrote {', '.join(sorted(out.files))} to {out.dir}")
        summary = report.get("summary") if isinstance(report, dict) else None
        if summary:
            print(json_text(summary), end="")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

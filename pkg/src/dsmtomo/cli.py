"""Command-line interface: ``dsmtomo <command> [options]``.

Every command reads and writes the two-file grid/sinogram format (plus PGM
and CSV exports). Options may also come from a JSON file given with
``--config``; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import repro
from .analysis import default_gammas, freq_curve, variance_curve
from .dsm import DsmConfig, dsm_reconstruct, gamma_alpha_sweep, tau_axis
from .fbp import FbpFilterSpec, fbp_reconstruct, fbp_reconstruct_3d
from .grids import (
    GridFormatError,
    ImageGrid,
    centered_grid,
    read_grid,
    read_sinogram,
    write_csv,
    write_grid,
    write_pgm,
    write_sinogram,
)
from .metrics import err_l2, err_linf
from .noise import NoiseSpec, add_noise
from .parallel import resolve_threads
from .phantoms import PHANTOM_NAMES, PhantomSpec, make_phantom
from .radon import fibonacci_hemisphere, forward_radon, uniform_angles_2d

log = logging.getLogger("dsmtomo")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2

# config section -> {key: argparse dest}
CONFIG_SCHEMA = {
    "phantom": {"name": "name", "resolution": "resolution", "half_width": "half_width"},
    "angles": {"count": "n_angles", "step_deg": "angle_step", "directions": "directions"},
    "t_axis": {"dt": "dt", "r2": "r2"},
    "noise": {"model": "model", "level": "level", "seed": "seed"},
    "dsm": {"gamma": "gamma", "alpha": "alpha", "limited_phi_deg": "phi_deg",
            "limited_lambda_deg": "lambda_deg"},
    "fbp": {"window": "window", "cutoff": "cutoff"},
}
CONFIG_TOP = {"output_dir": "output_dir", "threads": "threads"}


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


def load_config(path) -> dict:
    """Read a run config and flatten it to argparse destinations."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError("io", f"cannot read config {path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError("validation", f"config {path} is not valid JSON: {exc}", EXIT_VALIDATION) from exc
    if not isinstance(raw, dict):
        raise CliError("validation", "config must be a JSON object", EXIT_VALIDATION)
    flat = {}
    for key, value in raw.items():
        if key in CONFIG_TOP:
            flat[CONFIG_TOP[key]] = value
        elif key in CONFIG_SCHEMA:
            if not isinstance(value, dict):
                raise CliError("validation", f"config section {key!r} must be an object", EXIT_VALIDATION)
            for sub, v in value.items():
                if sub not in CONFIG_SCHEMA[key]:
                    raise CliError("validation", f"unknown config key {key}.{sub}", EXIT_VALIDATION)
                flat[CONFIG_SCHEMA[key][sub]] = v
        else:
            raise CliError("validation", f"unknown config key {key!r}", EXIT_VALIDATION)
    return flat


# -- argument parsing --------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override its values (default: none)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $TOMO_THREADS, else all cores)")


def _grid_opts(p, resolution_help="samples per axis (default: 128)"):
    p.add_argument("--resolution", type=int, default=128, help=resolution_help)
    p.add_argument("--half-width", dest="half_width", type=float, default=0.5,
                   help="domain is [-a, a]^n (default: 0.5)")


def _dsm_opts(p):
    p.add_argument("--gamma", type=float, default=None,
                   help="Sobolev scale (default: 0.4 in 2D, 0.9 in 3D)")
    p.add_argument("--alpha", type=float, default=None, help="probe decay exponent (default: n+1)")
    p.add_argument("--phi-deg", dest="phi_deg", type=float, default=None,
                   help="limited-angle half range Phi in degrees (default: full range)")
    p.add_argument("--lambda-deg", dest="lambda_deg", type=float, default=10.0,
                   help="limited-angle taper width in degrees (default: 10)")


def _fbp_opts(p):
    p.add_argument("--window", choices=("ramp", "hamming"), default="hamming",
                   help="FBP window (default: hamming)")
    p.add_argument("--cutoff", type=float, default=1.0, help="fraction of Nyquist (default: 1.0)")


class _Parser(argparse.ArgumentParser):
    """Report usage problems as validation errors instead of exiting."""

    def error(self, message):
        raise CliError("validation", message, EXIT_VALIDATION)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsmtomo", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default="INFO", help="logging level (default: INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="write a test image")
    _common(p)
    p.add_argument("--name", choices=PHANTOM_NAMES, default="shapes2d", help="phantom (default: shapes2d)")
    _grid_opts(p)
    p.add_argument("--out", required=True, help="output stem")
    p.add_argument("--pgm", help="also export a PGM image (2D only)")

    p = sub.add_parser("radon", help="simulate a sinogram")
    _common(p)
    p.add_argument("--input", required=True, help="image stem")
    p.add_argument("--angle-step", dest="angle_step", type=float, default=0.25,
                   help="2D angular increment in degrees over [-90, 90) (default: 0.25)")
    p.add_argument("--n-angles", dest="n_angles", type=int, default=None,
                   help="2D angle count, overrides --angle-step (default: from step)")
    p.add_argument("--directions", type=int, default=400,
                   help="3D Fibonacci hemisphere directions (default: 400)")
    p.add_argument("--dt", type=float, default=None, help="detector step (default: pixel spacing)")
    p.add_argument("--r2", type=float, default=None,
                   help="radius covered by the t-axis (default: a*sqrt(n))")
    p.add_argument("--out", required=True, help="output stem")

    p = sub.add_parser("noise", help="perturb a sinogram")
    _common(p)
    p.add_argument("--input", required=True, help="sinogram stem")
    p.add_argument("--model", choices=("gaussian", "salt_pepper"), default="gaussian",
                   help="noise model (default: gaussian)")
    p.add_argument("--level", type=float, default=0.2, help="noise level (default: 0.2)")
    p.add_argument("--seed", type=int, default=repro.DEFAULT_SEED, help="PRNG seed (default: 12345)")
    p.add_argument("--out", required=True, help="output stem")

    p = sub.add_parser("reconstruct", help="reconstruct an image from a sinogram")
    _common(p)
    p.add_argument("--method", choices=("dsm", "fbp"), default="dsm", help="method (default: dsm)")
    p.add_argument("--input", required=True, help="sinogram stem")
    _grid_opts(p)
    _dsm_opts(p)
    _fbp_opts(p)
    p.add_argument("--out", required=True, help="output stem")
    p.add_argument("--pgm", help="also export a PGM image (2D only)")

    p = sub.add_parser("metrics", help="relative L2 and Linf errors")
    _common(p)
    p.add_argument("--recon", required=True, help="reconstruction stem")
    p.add_argument("--truth", required=True, help="ground-truth stem")
    p.add_argument("--out", help="CSV path (default: standard output)")

    p = sub.add_parser("analyze", help="probe spectrum, variance curve, or gamma/alpha sweep")
    _common(p)
    p.add_argument("kind", choices=("freq", "variance", "sweep"))
    p.add_argument("--dim", type=int, choices=(2, 3), default=2, help="dimension (default: 2)")
    p.add_argument("--h", type=float, default=None,
                   help="probe radius (default: 0.1 for freq, 0.025 for variance)")
    p.add_argument("--omega-max", dest="omega_max", type=float, default=None,
                   help="largest frequency (default: 1/(2h))")
    p.add_argument("--n-points", dest="n_points", type=int, default=201, help="curve samples (default: 201)")
    p.add_argument("--input", help="sinogram stem (sweep)")
    p.add_argument("--truth", help="ground-truth stem (sweep)")
    p.add_argument("--gammas", default="0.3,0.4,0.5,0.6", help="comma list (default: 0.3,0.4,0.5,0.6)")
    p.add_argument("--alphas", default="3", help="comma list (default: 3)")
    p.add_argument("--out", required=True, help="CSV path")

    p = sub.add_parser("repro", help="run one numerical experiment end to end")
    _common(p)
    p.add_argument("example", type=int, choices=sorted(repro.EXAMPLES))
    p.add_argument("--paper-scale", dest="full_scale", action="store_true",
                   help="200^2 grid and 720 angles (3D: 64^3, 900 directions) instead of 128^2 and 180")
    p.add_argument("--seed", type=int, default=repro.DEFAULT_SEED, help="PRNG seed (default: 12345)")
    p.add_argument("--output-dir", dest="output_dir", default=".", help="directory for the CSV (default: .)")
    return parser


# -- commands ----------------------------------------------------------------

def _stage(msg, *args):
    log.info(msg, *args)


def _threads(args) -> int:
    return resolve_threads(args.threads)


def cmd_phantom(args) -> None:
    spec = PhantomSpec(args.name, args.resolution, args.half_width)
    img = make_phantom(spec)
    write_grid(img, args.out)
    if args.pgm:
        write_pgm(img, args.pgm)
    _stage("phantom %s %s written to %s", spec.name, img.shape, args.out)


def cmd_radon(args) -> None:
    img = read_grid(args.input)
    if img.dim == 2:
        n = args.n_angles if args.n_angles is not None else int(round(180.0 / args.angle_step))
        angles = uniform_angles_2d(n)
    else:
        angles = fibonacci_hemisphere(args.directions)
    dt = float(min(img.spacing)) if args.dt is None else args.dt
    r2 = repro.truth_radius(img) if args.r2 is None else args.r2
    sino = forward_radon(img, angles, tau_axis(r2, dt), threads=_threads(args))
    write_sinogram(sino, args.out)
    _stage("sinogram %d x %d written to %s", sino.n_angles, sino.nt, args.out)


def cmd_noise(args) -> None:
    sino = read_sinogram(args.input)
    out = add_noise(sino, NoiseSpec(args.model, args.level, args.seed))
    write_sinogram(out, args.out)
    _stage("%s noise %.3g (seed %d) written to %s", args.model, args.level, args.seed, args.out)


def target_grid(args, dim: int) -> ImageGrid:
    return centered_grid(args.resolution, dim, args.half_width)


def cmd_reconstruct(args) -> None:
    sino = read_sinogram(args.input)
    grid = target_grid(args, sino.dim)
    threads = _threads(args)
    t = time.perf_counter()
    if args.method == "dsm":
        limited = None
        if args.phi_deg is not None:
            limited = (math.radians(args.phi_deg), math.radians(args.lambda_deg))
        cfg = DsmConfig(sino.dim, float(grid.spacing[0]), args.gamma, args.alpha,
                        args.half_width, limited_angle=limited)
        rec = dsm_reconstruct(sino, cfg, grid, threads=threads)
    else:
        spec = FbpFilterSpec(args.window, args.cutoff)
        if sino.dim == 2:
            rec = fbp_reconstruct(sino, spec, grid, threads=threads)
        else:
            rec = fbp_reconstruct_3d(sino, spec, grid, threads=threads)
    write_grid(rec, args.out)
    if args.pgm:
        write_pgm(rec, args.pgm)
    _stage("%s reconstruction in %.2f s written to %s", args.method, time.perf_counter() - t, args.out)


def cmd_metrics(args) -> None:
    rec, truth = read_grid(args.recon), read_grid(args.truth)
    cols = [("err_l2", [err_l2(rec, truth)]), ("err_linf", [err_linf(rec, truth)])]
    if args.out:
        write_csv(cols, args.out)
    else:
        write_csv(cols, sys.stdout)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"expected a comma separated list of numbers, got {text!r}") from None


def cmd_analyze(args) -> None:
    if args.kind == "freq":
        h = 0.1 if args.h is None else args.h
        curve = freq_curve(args.dim, h, args.omega_max, args.n_points)
        curve.to_csv(args.out, ("omega", "spectrum"))
    elif args.kind == "variance":
        h = 0.025 if args.h is None else args.h
        curve = variance_curve(args.dim, h, default_gammas())
        curve.to_csv(args.out, ("gamma", "log_variance"))
    else:
        if not (args.input and args.truth):
            raise ValueError("sweep needs --input and --truth")
        sino, truth = read_sinogram(args.input), read_grid(args.truth)
        cfg = DsmConfig(sino.dim, float(truth.spacing[0]))
        rows = gamma_alpha_sweep(sino, cfg, truth, _floats(args.gammas), _floats(args.alphas),
                                 threads=_threads(args))
        write_csv([("gamma", [r.gamma for r in rows]), ("alpha", [r.alpha for r in rows]),
                   ("err_l2", [r.err_l2 for r in rows]), ("err_linf", [r.err_linf for r in rows])],
                  args.out)
    _stage("analysis %s written to %s", args.kind, args.out)


def cmd_repro(args) -> None:
    scale = repro.Scale.full() if args.full_scale else repro.Scale.desk()
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _stage("example %d at %s", args.example, scale)
    rows = repro.run_example(args.example, scale, args.seed, _threads(args))
    cols = [(f, [r.as_tuple()[i] for r in rows]) for i, f in enumerate(repro.ROW_FIELDS)]
    path = out_dir / f"example_{args.example}.csv"
    write_csv(cols, path)
    write_csv(cols, sys.stdout)
    _stage("results written to %s", path)


COMMANDS = {
    "phantom": cmd_phantom,
    "radon": cmd_radon,
    "noise": cmd_noise,
    "reconstruct": cmd_reconstruct,
    "metrics": cmd_metrics,
    "analyze": cmd_analyze,
    "repro": cmd_repro,
}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        flat = load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        sub.set_defaults(**{k: v for k, v in flat.items() if k in known})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except CliError as exc:
        print(f"ERROR:{exc.category}:{exc}", file=sys.stderr)
        return exc.code
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        COMMANDS[args.command](args)
    except (FileNotFoundError, OSError, GridFormatError) as exc:
        print(f"ERROR:io:{exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"ERROR:validation:{exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # report, never dump a traceback at the user
        print(f"ERROR:internal:{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

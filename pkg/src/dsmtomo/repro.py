"""End-to-end numerical experiments comparing the sampling index with FBP.

Each ``example_k`` builds a phantom, simulates and perturbs its sinogram,
reconstructs with both methods on the same data and returns result rows.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .dsm import DsmConfig, dsm_reconstruct, gamma_alpha_sweep, precompute_probe_table, tau_axis
from .fbp import FbpFilterSpec, fbp_reconstruct, fbp_reconstruct_3d
from .grids import ImageGrid, Sinogram
from .metrics import err_l2, err_linf
from .noise import NoiseSpec, add_noise
from .phantoms import PhantomSpec, make_phantom
from .radon import AngleSet, fibonacci_hemisphere, forward_radon, uniform_angles_2d

log = logging.getLogger(__name__)

DEFAULT_SEED = 12345
ROW_FIELDS = ("example", "case", "method", "gamma", "alpha", "noise", "err_l2", "err_linf", "seconds")


@dataclass(frozen=True)
class Scale:
    resolution: int = 128
    n_angles: int = 180
    resolution_3d: int = 48
    n_directions: int = 400

    @classmethod
    def desk(cls) -> "Scale":
        return cls()

    @classmethod
    def full(cls) -> "Scale":
        return cls(200, 720, 64, 900)


@dataclass
class Row:
    example: int
    case: str
    method: str
    gamma: float
    alpha: float
    noise: float
    err_l2: float
    err_linf: float
    seconds: float

    def as_tuple(self):
        return tuple(getattr(self, f) for f in ROW_FIELDS)


def simulate(truth: ImageGrid, angles: AngleSet, r2: float | None = None) -> Sinogram:
    """Noise-free sinogram on the symmetric tau axis with step equal to the pixel size."""
    h = float(truth.spacing[0])
    r2 = truth_radius(truth) if r2 is None else r2
    return forward_radon(truth, angles, tau_axis(r2, h))


def truth_radius(truth: ImageGrid) -> float:
    lo, hi = truth.bounds()
    return float(np.max(np.abs(np.concatenate([lo, hi])))) * math.sqrt(truth.dim)


def _timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def compare(example, case, sino, truth, config, noise_level, threads=None, fbp_spec=None, **dsm_kw):
    """DSM and FBP rows on one sinogram."""
    fbp_spec = fbp_spec or FbpFilterSpec("hamming")
    rec, secs = _timed(dsm_reconstruct, sino, config, truth, threads=threads, **dsm_kw)
    rows = [Row(example, case, "dsm", config.gamma, config.alpha, noise_level,
                err_l2(rec, truth), err_linf(rec, truth), secs)]
    if sino.dim == 2:
        frec, fsecs = _timed(fbp_reconstruct, sino, fbp_spec, truth, threads=threads)
    else:
        frec, fsecs = _timed(fbp_reconstruct_3d, sino, fbp_spec, truth, threads=threads)
    rows.append(Row(example, case, "fbp", math.nan, math.nan, noise_level,
                    err_l2(frec, truth), err_linf(frec, truth), fsecs))
    return rows, rec, frec


def _config(truth, gamma=None, alpha=None, **kw) -> DsmConfig:
    return DsmConfig(dim=truth.dim, h=float(truth.spacing[0]), gamma=gamma, alpha=alpha, **kw)


def example_1(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None):
    """Influence of gamma (20% noise) and of alpha (30% noise)."""
    truth = make_phantom(PhantomSpec("shapes2d", scale.resolution))
    clean = simulate(truth, uniform_angles_2d(scale.n_angles))
    rows = []
    for level, gammas, alphas in ((0.2, (0.3, 0.4, 0.5, 0.6), (3,)), (0.3, (0.4,), (3, 4, 5))):
        noisy = add_noise(clean, NoiseSpec("gaussian", level, seed))
        case = "gamma_sweep" if len(gammas) > 1 else "alpha_sweep"
        for r in gamma_alpha_sweep(noisy, _config(truth, 0.4, 3), truth, gammas, alphas, threads):
            rows.append(Row(1, case, "dsm", r.gamma, r.alpha, level, r.err_l2, r.err_linf, r.seconds))
    return rows


def example_2(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None, level=0.2):
    """Shapes image, Gaussian noise, DSM against FBP."""
    truth = make_phantom(PhantomSpec("shapes2d", scale.resolution))
    noisy = add_noise(simulate(truth, uniform_angles_2d(scale.n_angles)), NoiseSpec("gaussian", level, seed))
    rows, _, _ = compare(2, "shapes2d", noisy, truth, _config(truth, 0.4, 3), level, threads)
    return rows


def example_3(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None, level=0.08):
    """Salt-and-pepper noise on both 2D phantoms."""
    rows = []
    for name in ("shapes2d", "shepp_logan"):
        truth = make_phantom(PhantomSpec(name, scale.resolution))
        noisy = add_noise(simulate(truth, uniform_angles_2d(scale.n_angles)),
                          NoiseSpec("salt_pepper", level, seed))
        rows += compare(3, name, noisy, truth, _config(truth, 0.4, 3), level, threads)[0]
    return rows


def example_4(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None, level=0.05, counts=(18, 10)):
    """Sparse angles over the half circle."""
    truth = make_phantom(PhantomSpec("shapes2d", scale.resolution))
    rows = []
    for n in counts:
        noisy = add_noise(simulate(truth, uniform_angles_2d(n)), NoiseSpec("gaussian", level, seed))
        rows += compare(4, f"{n}_angles", noisy, truth, _config(truth, 0.4, 3), level, threads)[0]
    return rows


def limited_sinogram(full: Sinogram, phi: float) -> Sinogram:
    keep = np.abs(full.angles) <= phi + 1e-9
    return Sinogram(2, full.angles[keep], full.t0, full.dt, full.values[keep])


def example_5(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None, level=0.1,
              phis=(math.pi / 3, 2 * math.pi / 9), lam=math.pi / 18):
    """Limited angle data on ``[-Phi, Phi]`` with a taper of width ``lam``."""
    truth = make_phantom(PhantomSpec("shapes2d", scale.resolution))
    full_angles = uniform_angles_2d(scale.n_angles)
    clean = simulate(truth, full_angles)
    rows = []
    for phi in phis:
        noisy = add_noise(limited_sinogram(clean, phi), NoiseSpec("gaussian", level, seed))
        cfg = _config(truth, 0.4, 3, limited_angle=(phi, lam))
        case = f"phi={math.degrees(phi):.0f}deg"
        rows += compare(5, case, noisy, truth, cfg, level, threads, full_angles=full_angles)[0]
    return rows


def count_components(img: ImageGrid, threshold: float = 0.4) -> int:
    """Connected components of ``|img| >= threshold`` (face connectivity)."""
    return int(ndimage.label(np.abs(img.values) >= threshold)[1])


def example_6(scale=Scale.desk(), seed=DEFAULT_SEED, threads=None, level=0.01):
    """Box and two balls in 3D; also reports component counts after thresholding."""
    truth = make_phantom(PhantomSpec("box_balls_3d", scale.resolution_3d))
    log.info("simulating %d plane-integral projections", scale.n_directions)
    noisy = add_noise(simulate(truth, fibonacci_hemisphere(scale.n_directions)),
                      NoiseSpec("gaussian", level, seed))
    rows, rec, frec = compare(6, "box_balls_3d", noisy, truth, _config(truth, 0.9, 4), level, threads)
    rows[0].case = f"box_balls_3d components={count_components(rec)}"
    rows[1].case = f"box_balls_3d components={count_components(frec)}"
    return rows


EXAMPLES = {1: example_1, 2: example_2, 3: example_3, 4: example_4, 5: example_5, 6: example_6}


def run_example(k: int, scale=Scale.desk(), seed=DEFAULT_SEED, threads=None):
    if k not in EXAMPLES:
        raise ValueError(f"example must be one of {sorted(EXAMPLES)}, got {k}")
    return EXAMPLES[k](scale, seed, threads)


def warm_table(truth: ImageGrid, gamma: float, alpha: float):
    """Probe table for the truth grid, handy when timing reconstructions alone."""
    return precompute_probe_table(_config(truth, gamma, alpha))

"""Direct sampling reconstruction of a function from its Radon transform.

The index at a sampling point ``z`` is

    I(z) = d_n R*(H)(z) / n(z),

    H(theta, tau_k) = h * sum_j T(t_j - tau_k) Rf(theta, t_j),

where ``T = (-d^2/dtau^2)^gamma`` applied to the Radon profile of the probe,
and ``n(z)`` is the same quantity computed from the exact transform of the
indicator of the domain. The fractional Laplacian only ever touches the probe
profile; measured data enter through weighted sums.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline

from .grids import ImageGrid, Sinogram
from .metrics import err_l2, err_linf
from .parallel import map_chunks
from .probe import ProbeParams, RadialProfile, frac_laplacian_1d, radon_probe_profile, symmetric_axis
from .radon import AngleSet, back_project, box_sinogram, extend_limited_angle, uniform_angles_2d


class SpacingError(ValueError):
    """Sinogram spacing does not match the probe table spacing."""


def dual_constant(dim: int) -> float:
    """``d_n = pi^(1/2) / ((4 pi)^((n-1)/2) Gamma(n/2))``."""
    return math.sqrt(math.pi) / ((4 * math.pi) ** ((dim - 1) / 2) * math.gamma(dim / 2))


DEFAULT_GAMMA = {2: 0.4, 3: 0.9}


@dataclass(frozen=True)
class DsmConfig:
    """Reconstruction parameters.

    ``r2`` is the radius of a ball containing the domain ``[-a, a]^dim``;
    ``limited_angle`` is ``(Phi, lambda_smooth)`` in radians or ``None``.
    """

    dim: int = 2
    h: float = 1 / 128
    gamma: float | None = None
    alpha: float | None = None
    half_width: float = 0.5
    r2: float | None = None
    limited_angle: tuple[float, float] | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        gamma = DEFAULT_GAMMA[self.dim] if self.gamma is None else float(self.gamma)
        if not 0 < gamma < self.dim / 2:
            raise ValueError(f"gamma must lie in (0, {self.dim / 2}), got {gamma}")
        alpha = float(self.dim + 1 if self.alpha is None else self.alpha)
        r2 = self.half_width * math.sqrt(self.dim) if self.r2 is None else float(self.r2)
        if r2 < self.half_width * math.sqrt(self.dim) - 1e-12:
            raise ValueError("r2 must bound the domain")
        if self.limited_angle is not None:
            if self.dim != 2:
                raise ValueError("limited-angle reconstruction is 2D only")
            phi, lam = (float(v) for v in self.limited_angle)
            object.__setattr__(self, "limited_angle", (phi, lam))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "h", float(self.h))
        ProbeParams(self.dim, self.h, alpha)  # validates h and alpha

    @property
    def probe(self) -> ProbeParams:
        return ProbeParams(self.dim, self.h, self.alpha)

    @property
    def d_n(self) -> float:
        return dual_constant(self.dim)


def tau_axis(r2: float, h: float) -> tuple[float, float, int]:
    """Symmetric axis ``h * (-K ... K)`` with ``K h >= r2``, as ``(t0, dt, nt)``.

    Keeping ``tau = 0`` on the grid makes the index exactly point-symmetric
    for symmetric data.
    """
    k = int(math.ceil(r2 / h - 1e-9))
    return -k * h, h, 2 * k + 1


@dataclass(frozen=True)
class ProbeTable:
    """Filtered probe profile at offsets ``step * (-half_count ... half_count)``."""

    params: ProbeParams
    gamma: float
    step: float
    half_count: int
    values: np.ndarray = field(repr=False)

    def kernel(self, nt: int) -> np.ndarray:
        """Values at offsets ``-(nt-1) ... nt-1`` (length ``2 nt - 1``)."""
        if nt - 1 > self.half_count:
            raise ValueError(
                f"table covers offsets up to {self.half_count} steps, need {nt - 1}"
            )
        c = self.half_count
        return self.values[c - (nt - 1): c + nt]

    @property
    def offsets(self) -> np.ndarray:
        return symmetric_axis(self.step, self.half_count)


def precompute_probe_table(
    config: DsmConfig, half_count: int | None = None, step: float | None = None, extend: int = 4
) -> ProbeTable:
    """Off-line step: Radon profile of the probe, then the fractional Laplacian.

    The profile is sampled on an axis ``extend`` times longer than required,
    filtered spectrally, and cropped back. ``step`` defaults to ``h``.
    """
    step = config.h if step is None else float(step)
    if half_count is None:
        half_count = tau_axis(config.r2, step)[2] - 1
    wide = symmetric_axis(step, extend * half_count)
    raw = radon_probe_profile(config.probe, wide)
    filt = frac_laplacian_1d(raw, config.gamma, pad=4)
    c = extend * half_count
    vals = filt.values[c - half_count: c + half_count + 1].copy()
    vals = 0.5 * (vals + vals[::-1])  # remove rounding asymmetry of the FFT
    vals.setflags(write=False)
    return ProbeTable(config.probe, config.gamma, step, half_count, vals)


def raw_profile_table(config: DsmConfig, half_count: int) -> RadialProfile:
    return radon_probe_profile(config.probe, symmetric_axis(config.h, half_count))


# -- H(theta, tau) -----------------------------------------------------------

def compute_H(sino: Sinogram, table: ProbeTable, threads: int | None = None) -> Sinogram:
    """``H[a, k] = h * sum_j T((j - k) h) g[a, j]`` for every angle, via FFT."""
    if not math.isclose(sino.dt, table.step, rel_tol=1e-9):
        raise SpacingError(f"sinogram dt={sino.dt} differs from table step={table.step}")
    nt = sino.nt
    kern = table.kernel(nt)[::-1]
    size = sfft.next_fast_len(3 * nt - 2, real=True)
    kf = sfft.rfft(kern, size)
    g = sino.values
    out = np.empty_like(g)

    def work(lo, hi):
        prod = sfft.rfft(g[lo:hi], size, axis=1) * kf
        full = sfft.irfft(prod, size, axis=1)
        out[lo:hi] = table.step * full[:, nt - 1: 2 * nt - 1]

    map_chunks(work, sino.n_angles, 64, threads)
    return sino.with_values(out)


def compute_H_direct(sino: Sinogram, table: ProbeTable) -> Sinogram:
    """Reference ``O(N^2)`` summation of :func:`compute_H`."""
    nt = sino.nt
    kern = table.kernel(nt)
    j = np.arange(nt)
    toe = kern[(j[None, :] - j[:, None]) + nt - 1]  # toe[k, j] = T((j - k) h)
    return sino.with_values(table.step * sino.values @ toe.T)


# -- resampling --------------------------------------------------------------

def resample_sinogram(sino: Sinogram, t_axis: tuple[float, float, int]) -> Sinogram:
    """Move data onto another t-axis, zero outside the measured range.

    A pure index shift when the spacing matches and the origins differ by
    whole steps; cubic interpolation otherwise.
    """
    t0, dt, nt = t_axis
    shift = (sino.t0 - t0) / dt
    out = np.zeros((sino.n_angles, nt))
    if math.isclose(sino.dt, dt, rel_tol=1e-12) and abs(shift - round(shift)) < 1e-9:
        s = int(round(shift))
        lo_dst, lo_src = max(s, 0), max(-s, 0)
        n = min(nt - lo_dst, sino.nt - lo_src)
        if n > 0:
            out[:, lo_dst: lo_dst + n] = sino.values[:, lo_src: lo_src + n]
    else:
        t_new = t0 + dt * np.arange(nt)
        spline = CubicSpline(sino.t, sino.values, axis=1, extrapolate=False)
        out = np.nan_to_num(spline(t_new), nan=0.0)
    return Sinogram(sino.dim, sino.angles, t0, dt, out)


# -- index function ----------------------------------------------------------

@dataclass(frozen=True)
class AngularWeights:
    """Sinogram on the angles used by the dual, with taper and quadrature."""

    sino: Sinogram
    taper: np.ndarray | None
    quad: np.ndarray | None


def _angular_setup(sino: Sinogram, config: DsmConfig, full_angles: AngleSet | None) -> AngularWeights:
    if config.limited_angle is None:
        return AngularWeights(sino, None, None)
    if full_angles is None:
        full_angles = infer_full_angles(sino.angles)
    phi, lam = config.limited_angle
    ext, taper, quad = extend_limited_angle(sino, full_angles, phi, lam)
    return AngularWeights(ext, taper, quad)


def infer_full_angles(measured: np.ndarray) -> AngleSet:
    """The uniform half-range set whose step matches the measured angles."""
    if measured.size < 2:
        raise ValueError("need at least two measured angles to infer the step")
    step = float(np.median(np.diff(np.sort(measured))))
    n = int(round(np.pi / step))
    full = uniform_angles_2d(n)
    # align the grid so that measured angles are members
    offset = measured[np.argmin(np.abs(measured))] - full.directions[np.argmin(np.abs(full.directions))]
    return AngleSet(2, full.directions + offset, full.weights)


def normalization_field(
    config: DsmConfig,
    angles: Sinogram | AngleSet,
    grid: ImageGrid,
    table: ProbeTable | None = None,
    taper=None,
    quad=None,
    threads: int | None = None,
) -> ImageGrid:
    """``n(z)``: the index pipeline applied to the exact transform of the domain."""
    if isinstance(angles, Sinogram):
        dirs, dim = angles.angles, angles.dim
    else:
        dirs, dim = angles.directions, angles.dim
    if table is None:
        table = precompute_probe_table(config)
    t_ax = tau_axis(config.r2, config.h)
    box = box_sinogram(AngleSet(dim, dirs, 1.0), t_ax, config.half_width)
    H = compute_H(box, table, threads)
    return _scaled_bp(H, grid, taper, quad, config.d_n, threads)


def _scaled_bp(H, grid, taper, quad, scale, threads):
    bp = back_project(H, grid, taper, quad, threads)
    return bp.with_values(scale * bp.values)


@dataclass
class DsmResult:
    index: ImageGrid
    numerator: ImageGrid
    normalization: ImageGrid


def dsm_reconstruct(
    sino: Sinogram,
    config: DsmConfig,
    grid: ImageGrid,
    table: ProbeTable | None = None,
    full_angles: AngleSet | None = None,
    threads: int | None = None,
    details: bool = False,
):
    """Index function ``d_n R*(H) / n`` on ``grid``.

    With ``config.limited_angle`` set, ``sino`` holds the measured wedge and
    the taper band is filled from the outermost projections.
    """
    if sino.dim != config.dim or grid.dim != config.dim:
        raise ValueError("sinogram, grid and config dimensions differ")
    if table is None:
        table = precompute_probe_table(config)
    t_ax = tau_axis(config.r2, config.h)
    data = resample_sinogram(sino, t_ax)
    setup = _angular_setup(data, config, full_angles)
    H = compute_H(setup.sino, table, threads)
    num = _scaled_bp(H, grid, setup.taper, setup.quad, config.d_n, threads)
    norm = normalization_field(config, setup.sino, grid, table, setup.taper, setup.quad, threads)
    index = grid.with_values(num.values / norm.values)
    if details:
        return DsmResult(index, num, norm)
    return index


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    alpha: float
    err_l2: float
    err_linf: float
    seconds: float = 0.0


def gamma_alpha_sweep(
    sino: Sinogram,
    config: DsmConfig,
    truth: ImageGrid,
    gammas,
    alphas,
    threads: int | None = None,
) -> list[SweepRow]:
    """One reconstruction per ``(gamma, alpha)`` pair, all from the same sinogram."""
    rows = []
    for alpha in alphas:
        for gamma in gammas:
            cfg = replace(config, gamma=float(gamma), alpha=float(alpha))
            start = time.perf_counter()
            rec = dsm_reconstruct(sino, cfg, truth, threads=threads)
            secs = time.perf_counter() - start
            rows.append(SweepRow(float(gamma), float(alpha), err_l2(rec, truth), err_linf(rec, truth), secs))
    return rows

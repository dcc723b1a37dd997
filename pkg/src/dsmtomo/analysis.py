"""Probe spectrum curves and the variance of the index as a function of gamma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .dsm import DsmConfig, normalization_field, precompute_probe_table
from .grids import ImageGrid, write_csv
from .probe import probe_freq_2d, probe_freq_3d
from .radon import AngleSet, fibonacci_hemisphere, uniform_angles_2d


@dataclass(frozen=True)
class CurveResult:
    x: np.ndarray
    y: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("abscissa and ordinate lengths differ")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("curve contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def to_csv(self, path, names=("x", "y")) -> None:
        write_csv([(names[0], self.x), (names[1], self.y)], path)


def probe_freq(dim: int, h: float, omega):
    if dim == 2:
        return probe_freq_2d(h, omega)
    if dim == 3:
        return probe_freq_3d(h, omega)
    raise ValueError(f"dim must be 2 or 3, got {dim}")


def freq_curve(dim: int = 2, h: float = 0.1, omega_max: float | None = None, n_points: int = 201) -> CurveResult:
    """Closed-form probe spectrum on a uniform grid ``[0, omega_max]``.

    The first abscissa is nudged off zero, where the closed forms are a limit.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    omega_max = 1 / (2 * h) if omega_max is None else float(omega_max)
    omega = np.linspace(0.0, omega_max, n_points)
    omega[0] = omega_max * 1e-9
    vals = np.asarray(probe_freq(dim, h, omega), dtype=float)
    return CurveResult(omega, vals, {"dim": dim, "h": h, "omega_max": omega_max})


def default_gammas() -> np.ndarray:
    return np.round(np.arange(0.2, 0.975 + 1e-9, 0.025), 10)


def _origin_grid(dim: int) -> ImageGrid:
    return ImageGrid((1,) * dim, (0.0,) * dim, (1.0,) * dim, np.zeros(1))


def _variance_angles(dim: int) -> AngleSet:
    return uniform_angles_2d(720) if dim == 2 else fibonacci_hemisphere(400)


def center_normalization(dim: int, h: float, gamma: float, alpha: float | None = None) -> float:
    """``n(0)`` for the domain ``[-0.5, 0.5]^dim`` through the reconstruction pipeline."""
    cfg = DsmConfig(dim=dim, h=h, gamma=gamma, alpha=alpha)
    table = precompute_probe_table(cfg)
    field_ = normalization_field(cfg, _variance_angles(dim), _origin_grid(dim), table)
    return float(field_.values.flat[0])


def variance_integral(dim: int, h: float, gamma: float, n_steps: int = 4096) -> float:
    """``|S^{n-1}| * int_0^{1/(2h)} (2 pi w)^{4 gamma} F(w)^2 w^{n-1} dw`` by Simpson's rule."""
    omega = np.linspace(0.0, 1 / (2 * h), n_steps + 1)
    omega[0] = 1e-12
    spec = np.asarray(probe_freq(dim, h, omega), dtype=float)
    integrand = (2 * np.pi * omega) ** (4 * gamma) * spec ** 2 * omega ** (dim - 1)
    sphere = 2 * np.pi if dim == 2 else 4 * np.pi
    return sphere * float(simpson(integrand, x=omega))


def variance_curve(dim: int = 2, h: float = 0.025, gammas=None, n_steps: int = 4096) -> CurveResult:
    """``ln v(gamma)`` normalised so that its maximum over the grid is 0.

    ``v(gamma)`` is the noise variance integral divided by ``n(0)**2``; the
    frequency axis is truncated at ``1/(2h)``.
    """
    gammas = default_gammas() if gammas is None else np.asarray(gammas, dtype=float)
    if np.any(gammas <= 0) or np.any(gammas >= 1):
        raise ValueError("gamma must lie in (0, 1) for a square-integrable spectrum")
    raw = np.empty(gammas.size)
    for i, g in enumerate(gammas):
        n0 = center_normalization(dim, h, float(g))
        raw[i] = variance_integral(dim, h, float(g), n_steps) / n0 ** 2
    logv = np.log(raw)
    logv -= logv.max()
    return CurveResult(gammas, logv, {"dim": dim, "h": h, "n_steps": n_steps})


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in ``R^dim``."""
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)

"""Measurement noise models.

Random numbers come from numpy's Philox4x64 counter-based generator seeded
with the user's 64-bit seed. Draws are consumed in storage order of the
sinogram values (angle-major, then t), so a seed fixes the output bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Sinogram

NOISE_MODELS = ("gaussian", "salt_pepper")


@dataclass(frozen=True)
class NoiseSpec:
    model: str = "gaussian"
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.model!r}; choose from {NOISE_MODELS}")
        if self.level < 0:
            raise ValueError(f"noise level must be >= 0, got {self.level}")
        if self.model == "salt_pepper" and self.level > 1:
            raise ValueError(f"salt-and-pepper level must be <= 1, got {self.level}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def add_gaussian(sino: Sinogram, spec: NoiseSpec) -> Sinogram:
    """``g + eps * delta`` with ``delta = mean(g) * level`` and ``eps ~ N(0, 1)``."""
    if spec.model != "gaussian":
        raise ValueError(f"expected a gaussian spec, got {spec.model!r}")
    if spec.level == 0:
        return sino.with_values(sino.values.copy())
    delta = float(np.mean(sino.values)) * spec.level
    eps = make_rng(spec.seed).standard_normal(sino.values.size).reshape(sino.values.shape)
    return sino.with_values(sino.values + eps * delta)


def add_salt_pepper(sino: Sinogram, spec: NoiseSpec) -> Sinogram:
    """Replace ``round(level * N)`` random entries by the data minimum or maximum."""
    if spec.model != "salt_pepper":
        raise ValueError(f"expected a salt_pepper spec, got {spec.model!r}")
    vals = sino.values.copy()
    n = vals.size
    count = int(round(spec.level * n))
    if count == 0:
        return sino.with_values(vals)
    rng = make_rng(spec.seed)
    lo, hi = float(vals.min()), float(vals.max())
    idx = rng.choice(n, size=count, replace=False)
    pick_hi = rng.random(count) < 0.5
    flat = vals.reshape(-1)
    flat[idx] = np.where(pick_hi, hi, lo)
    return sino.with_values(vals)


def add_noise(sino: Sinogram, spec: NoiseSpec) -> Sinogram:
    if spec.model == "gaussian":
        return add_gaussian(sino, spec)
    return add_salt_pepper(sino, spec)

"""Relative reconstruction errors and index normalisation."""

from __future__ import annotations

import numpy as np

from .grids import ImageGrid


def _check(recon: ImageGrid, truth: ImageGrid) -> None:
    if not recon.same_geometry(truth):
        raise ValueError("reconstruction and truth grids have different geometry")


def err_l2(recon: ImageGrid, truth: ImageGrid) -> float:
    """``||recon - truth||_2 / ||truth||_2`` over every grid point."""
    _check(recon, truth)
    return float(np.linalg.norm(recon.values - truth.values) / np.linalg.norm(truth.values))


def err_linf(recon: ImageGrid, truth: ImageGrid) -> float:
    _check(recon, truth)
    return float(np.abs(recon.values - truth.values).max() / np.abs(truth.values).max())


def normalize_index(img: ImageGrid) -> ImageGrid:
    """Divide by the largest magnitude so the result peaks at +-1."""
    peak = float(np.abs(img.values).max())
    if peak == 0:
        raise ValueError("cannot normalise an all-zero image")
    return img.with_values(img.values / peak)

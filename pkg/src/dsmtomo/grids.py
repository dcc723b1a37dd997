"""Image grids, sinograms and their on-disk formats.

Every persisted object is a pair of files sharing a stem: ``<stem>.json``
holds the metadata, ``<stem>.f64`` the raw little-endian float64 samples in
row-major order (last axis fastest).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class GridFormatError(ValueError):
    """Malformed metadata, wrong kind, or a size mismatch on disk."""


class GridValidationError(ValueError):
    """An in-memory grid or sinogram violates its invariants."""


_F64 = np.dtype("<f8")


@dataclass(frozen=True)
class ImageGrid:
    """Uniform Cartesian samples of a scalar field in 2D or 3D.

    Sample ``j`` along axis ``a`` sits at ``origin[a] + j * spacing[a]``.
    ``values`` is stored with shape ``shape`` (axis 0 first), so the flat
    view is row-major with the last axis fastest.
    """

    shape: tuple[int, ...]
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        origin = tuple(float(o) for o in self.origin)
        spacing = tuple(float(s) for s in self.spacing)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

        if len(shape) not in (2, 3):
            raise GridValidationError(f"dim must be 2 or 3, got {len(shape)}")
        if not (len(shape) == len(origin) == len(spacing)):
            raise GridValidationError("shape, origin and spacing lengths differ")
        if any(s <= 0 for s in spacing):
            raise GridValidationError(f"spacing must be positive: {spacing}")
        if any(n < 1 for n in shape):
            raise GridValidationError(f"shape must be positive: {shape}")

        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != math.prod(shape):
            raise GridValidationError(
                f"{vals.size} values do not fill shape {list(shape)}"
            )
        vals = np.ascontiguousarray(vals.reshape(shape))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return len(self.shape)

    def axes(self) -> list[np.ndarray]:
        """Physical coordinates of the samples, one array per axis."""
        return [o + d * np.arange(n) for o, d, n in zip(self.origin, self.spacing, self.shape)]

    def points(self) -> np.ndarray:
        """All sample coordinates as an ``(npoints, dim)`` array in storage order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of the cell-centred box the samples cover."""
        o = np.asarray(self.origin)
        d = np.asarray(self.spacing)
        n = np.asarray(self.shape)
        return o - d / 2, o + (n - 0.5) * d

    def with_values(self, values) -> "ImageGrid":
        return ImageGrid(self.shape, self.origin, self.spacing, values)

    def same_geometry(self, other: "ImageGrid") -> bool:
        return (
            self.shape == other.shape
            and np.allclose(self.origin, other.origin, rtol=0, atol=1e-12)
            and np.allclose(self.spacing, other.spacing, rtol=0, atol=1e-12)
        )


def centered_grid(resolution: int, dim: int = 2, half_width: float = 0.5, values=None) -> ImageGrid:
    """Cell-centred grid over ``[-half_width, half_width]^dim``."""
    step = 2.0 * half_width / resolution
    origin = -half_width + step / 2
    shape = (resolution,) * dim
    if values is None:
        values = np.zeros(shape)
    return ImageGrid(shape, (origin,) * dim, (step,) * dim, values)


@dataclass(frozen=True)
class Sinogram:
    """Radon data on a set of directions and a uniform offset axis.

    For ``dim == 2`` ``angles`` is a 1D array of angles in radians; for
    ``dim == 3`` it is an ``(n, 3)`` array of unit normals. ``values`` has
    shape ``(n_angles, nt)``.
    """

    dim: int
    angles: np.ndarray
    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim = int(self.dim)
        if dim not in (2, 3):
            raise GridValidationError(f"dim must be 2 or 3, got {dim}")
        ang = np.array(self.angles, dtype=np.float64)
        if dim == 2:
            ang = ang.reshape(-1)
        else:
            ang = ang.reshape(-1, 3)
            norms = np.linalg.norm(ang, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-12):
                raise GridValidationError("3D directions must be unit vectors")
        if not self.dt > 0:
            raise GridValidationError(f"dt must be positive, got {self.dt}")
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != ang.shape[0]:
            raise GridValidationError(
                f"values shape {vals.shape} does not match {ang.shape[0]} angles"
            )
        ang.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "values", vals)

    @property
    def nt(self) -> int:
        return self.values.shape[1]

    @property
    def n_angles(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    def normals(self) -> np.ndarray:
        """Unit normals as an ``(n_angles, dim)`` array."""
        if self.dim == 2:
            return np.stack([np.cos(self.angles), np.sin(self.angles)], axis=1)
        return self.angles

    def covers(self, r: float) -> bool:
        """True when the t-axis spans ``[-r, r]``."""
        tol = 1e-9 * max(1.0, r)
        return self.t0 <= -r + tol and self.t0 + (self.nt - 1) * self.dt >= r - tol

    def with_values(self, values) -> "Sinogram":
        return Sinogram(self.dim, self.angles, self.t0, self.dt, values)


# -- raw two-file format -----------------------------------------------------

def _paths(stem) -> tuple[Path, Path]:
    stem = Path(stem)
    return stem.with_name(stem.name + ".json"), stem.with_name(stem.name + ".f64")


def _write_pair(stem, meta: dict, values: np.ndarray) -> None:
    jpath, fpath = _paths(stem)
    try:
        jpath.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        fpath.write_bytes(np.ascontiguousarray(values, dtype=_F64).tobytes())
    except OSError as exc:
        raise OSError(f"cannot write {stem}: {exc}") from exc


def _read_pair(stem) -> tuple[dict, np.ndarray]:
    jpath, fpath = _paths(stem)
    for p in (jpath, fpath):
        if not p.exists():
            raise FileNotFoundError(f"missing file: {p}")
    try:
        meta = json.loads(jpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"{jpath}: invalid JSON ({exc})") from exc
    if not isinstance(meta, dict):
        raise GridFormatError(f"{jpath}: metadata must be an object")
    raw = fpath.read_bytes()
    if len(raw) % 8:
        raise GridFormatError(f"{fpath}: size {len(raw)} is not a multiple of 8")
    return meta, np.frombuffer(raw, dtype=_F64).astype(np.float64)


def write_grid(grid: ImageGrid, path_stem) -> None:
    """Write ``<stem>.json`` and ``<stem>.f64`` for an image grid."""
    meta = {
        "kind": "grid",
        "dim": grid.dim,
        "shape": list(grid.shape),
        "origin": list(grid.origin),
        "spacing": list(grid.spacing),
    }
    _write_pair(path_stem, meta, grid.values)


def read_grid(path_stem) -> ImageGrid:
    meta, vals = _read_pair(path_stem)
    if meta.get("kind") != "grid":
        raise GridFormatError(f"{path_stem}: expected kind 'grid', got {meta.get('kind')!r}")
    try:
        shape = [int(s) for s in meta["shape"]]
        origin, spacing, dim = meta["origin"], meta["spacing"], int(meta["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GridFormatError(f"{path_stem}: bad metadata ({exc})") from exc
    if dim != len(shape):
        raise GridFormatError(f"{path_stem}: dim {dim} disagrees with shape {shape}")
    if vals.size != math.prod(shape):
        raise GridFormatError(
            f"{path_stem}: size mismatch, {vals.size} values for shape {shape}"
        )
    try:
        return ImageGrid(tuple(shape), tuple(origin), tuple(spacing), vals)
    except GridValidationError as exc:
        raise GridFormatError(f"{path_stem}: {exc}") from exc


def write_sinogram(sino: Sinogram, path_stem) -> None:
    angles = sino.angles.tolist()
    meta = {
        "kind": "sinogram",
        "dim": sino.dim,
        "angles": angles,
        "t0": sino.t0,
        "dt": sino.dt,
        "nt": sino.nt,
    }
    _write_pair(path_stem, meta, sino.values)


def read_sinogram(path_stem) -> Sinogram:
    meta, vals = _read_pair(path_stem)
    if meta.get("kind") != "sinogram":
        raise GridFormatError(
            f"{path_stem}: expected kind 'sinogram', got {meta.get('kind')!r}"
        )
    try:
        dim, nt = int(meta["dim"]), int(meta["nt"])
        angles = np.asarray(meta["angles"], dtype=np.float64)
        t0, dt = float(meta["t0"]), float(meta["dt"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GridFormatError(f"{path_stem}: bad metadata ({exc})") from exc
    n_angles = angles.shape[0] if angles.ndim else 0
    if vals.size != n_angles * nt:
        raise GridFormatError(
            f"{path_stem}: size mismatch, {vals.size} values for {n_angles}x{nt}"
        )
    try:
        return Sinogram(dim, angles, t0, dt, vals.reshape(n_angles, nt))
    except GridValidationError as exc:
        raise GridFormatError(f"{path_stem}: {exc}") from exc


def read_any(path_stem) -> ImageGrid | Sinogram:
    """Dispatch on the ``kind`` field of the sidecar."""
    jpath, _ = _paths(path_stem)
    if not jpath.exists():
        raise FileNotFoundError(f"missing file: {jpath}")
    try:
        kind = json.loads(jpath.read_text(encoding="utf-8")).get("kind")
    except (json.JSONDecodeError, AttributeError) as exc:
        raise GridFormatError(f"{jpath}: invalid metadata") from exc
    if kind == "grid":
        return read_grid(path_stem)
    if kind == "sinogram":
        return read_sinogram(path_stem)
    raise GridFormatError(f"{jpath}: unknown kind {kind!r}")


# -- exports -----------------------------------------------------------------

def write_pgm(grid: ImageGrid, path) -> None:
    """16-bit binary PGM, min→0 and max→65535, top row = largest y.

    Axis 0 is x and axis 1 is y, so the image is the transposed array with
    its rows reversed.
    """
    if grid.dim != 2:
        raise ValueError("PGM export supports 2D grids only")
    v = grid.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        pix = np.rint(65535.0 * (v - lo) / (hi - lo))
    else:
        pix = np.zeros_like(v)
    img = pix.T[::-1].astype(">u2")
    rows, cols = img.shape
    header = f"P5\n{cols} {rows}\n65535\n".encode("ascii")
    try:
        Path(path).write_bytes(header + img.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_csv(columns: Sequence[tuple[str, Sequence]], path) -> None:
    """Write named columns to a path or text stream.

    Floats use Python's shortest round-trip repr.
    """
    lengths = {len(col) for _, col in columns}
    if len(lengths) > 1:
        raise ValueError(f"ragged columns: lengths {sorted(lengths)}")
    names = [name for name, _ in columns]
    rows = zip(*(col for _, col in columns))
    if hasattr(path, "write"):
        _write_rows(path, names, rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, names, rows)


def _write_rows(fh, names, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(names)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if f.is_integer() and abs(f) < 1e16:
            return str(int(f))
        return repr(f)
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)

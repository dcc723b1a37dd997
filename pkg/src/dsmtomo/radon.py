"""Discrete Radon transform, its dual, and exact transforms of the box domain.

2D angles are measured from the x axis, so ``theta`` has normal
``(cos theta, sin theta)``. The dual integrates over a half range of
directions; for data with ``g(theta, t) = g(theta + pi, -t)`` that is half of
the full-sphere integral, and the factor is carried by the quadrature weights
(``pi / N`` per angle in 2D, ``2 pi / N`` per direction on the hemisphere).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grids import GridValidationError, ImageGrid, Sinogram
from .parallel import map_chunks


class CoverageError(ValueError):
    """The sinogram t-axis does not reach every projected grid point."""


@dataclass(frozen=True)
class AngleSet:
    """Directions with their quadrature weights.

    ``directions`` is a 1D array of angles (2D) or an ``(N, 3)`` array of unit
    vectors (3D).
    """

    dim: int
    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        d = d.reshape(-1) if self.dim == 2 else d.reshape(-1, 3)
        w = np.broadcast_to(np.asarray(self.weights, dtype=float), (d.shape[0],)).copy()
        if self.dim not in (2, 3):
            raise GridValidationError(f"dim must be 2 or 3, got {self.dim}")
        if np.any(w <= 0):
            raise GridValidationError("angle weights must be positive")
        if self.dim == 3 and np.any(np.abs(np.linalg.norm(d, axis=1) - 1) > 1e-12):
            raise GridValidationError("3D directions must be unit vectors")
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.directions.shape[0]

    @property
    def measure(self) -> float:
        return float(self.weights.sum())

    def subset(self, mask) -> "AngleSet":
        return AngleSet(self.dim, self.directions[mask], self.weights[mask])


def uniform_angles_2d(n: int, start: float = -np.pi / 2, stop: float = np.pi / 2) -> AngleSet:
    """``n`` equispaced angles on ``[start, stop)``, each weighted by the step."""
    if n < 1:
        raise ValueError("need at least one angle")
    step = (stop - start) / n
    return AngleSet(2, start + step * np.arange(n), np.full(n, step))


def fibonacci_hemisphere(n: int) -> AngleSet:
    """Fibonacci lattice on the upper hemisphere, equal weights ``2 pi / n``."""
    if n < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n)
    z = (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    rho = np.sqrt(1.0 - z * z)
    dirs = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return AngleSet(3, dirs, np.full(n, 2 * np.pi / n))


def normals_of(angles: AngleSet) -> np.ndarray:
    if angles.dim == 2:
        th = angles.directions
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    return angles.directions


def plane_basis(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``theta`` to an orthonormal frame."""
    theta = np.asarray(theta, dtype=float)
    helper = np.array([1.0, 0.0, 0.0]) if abs(theta[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(theta, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(theta, e1)
    return e1, e2


# -- forward transform -------------------------------------------------------

def _sample_image(image: ImageGrid, pts: np.ndarray) -> np.ndarray:
    """Multilinear interpolation at physical points, zero outside the box.

    ``pts`` has the coordinate axis last. Between the outermost sample and
    the box edge the edge value is held, so a constant image integrates to
    exact chord lengths.
    """
    o = np.asarray(image.origin)
    d = np.asarray(image.spacing)
    lo, hi = image.bounds()
    idx = (pts - o) / d
    coords = np.moveaxis(idx, -1, 0).reshape(image.dim, -1)
    vals = ndimage.map_coordinates(image.values, coords, order=1, mode="nearest")
    inside = np.all((pts >= lo) & (pts <= hi), axis=-1).reshape(-1)
    return (vals * inside).reshape(pts.shape[:-1])


def _support_radius(image: ImageGrid) -> float:
    lo, hi = image.bounds()
    return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))


def forward_radon(
    image: ImageGrid,
    angles: AngleSet,
    t_axis: tuple[float, float, int],
    threads: int | None = None,
) -> Sinogram:
    """Line (2D) or plane (3D) integrals of the interpolated image.

    Integration is a midpoint rule of step ``min(spacing) / 2`` over the
    disc that circumscribes the image box.
    """
    if image.dim != angles.dim:
        raise GridValidationError(
            f"image is {image.dim}D but the angle set is {angles.dim}D"
        )
    t0, dt, nt = float(t_axis[0]), float(t_axis[1]), int(t_axis[2])
    if dt <= 0 or nt < 1:
        raise GridValidationError("t-axis needs dt > 0 and nt >= 1")
    t = t0 + dt * np.arange(nt)
    step = min(image.spacing) / 2
    radius = _support_radius(image)
    m = int(np.ceil(radius / step))
    s = step * (np.arange(-m, m) + 0.5)  # midpoints: no sample sits on a box edge
    normals = normals_of(angles)
    out = np.zeros((len(angles), nt))

    if image.dim == 2:
        def work(lo, hi):
            for a in range(lo, hi):
                th = normals[a]
                perp = np.array([-th[1], th[0]])
                pts = t[:, None, None] * th + s[None, :, None] * perp
                out[a] = _sample_image(image, pts).sum(axis=1) * step
        map_chunks(work, len(angles), 8, threads)
    else:
        uu, vv = np.meshgrid(s, s, indexing="ij")
        disc = uu * uu + vv * vv <= radius * radius
        uu, vv = uu[disc], vv[disc]
        lo_box, hi_box = image.bounds()
        o = np.asarray(image.origin)
        d = np.asarray(image.spacing)
        rows = np.nonzero(np.abs(t) <= radius)[0]

        def work(lo, hi):
            for a in range(lo, hi):
                th = normals[a]
                e1, e2 = plane_basis(th)
                inplane = uu[:, None] * e1 + vv[:, None] * e2
                for k in rows:
                    pts = t[k] * th + inplane
                    inside = np.all((pts >= lo_box) & (pts <= hi_box), axis=1)
                    if not inside.any():
                        continue
                    coords = ((pts[inside] - o) / d).T
                    vals = ndimage.map_coordinates(image.values, coords, order=1, mode="nearest")
                    out[a, k] = vals.sum() * step * step
        map_chunks(work, len(angles), 4, threads)
    return Sinogram(image.dim, angles.directions, t0, dt, out)


# -- dual transform ----------------------------------------------------------

def default_quadrature(sino: Sinogram) -> np.ndarray:
    """``pi / N`` per angle in 2D and ``2 pi / N`` per direction in 3D."""
    total = np.pi if sino.dim == 2 else 2 * np.pi
    return np.full(sino.n_angles, total / sino.n_angles)


def back_project(
    sino: Sinogram,
    target: ImageGrid,
    weights=None,
    quad=None,
    threads: int | None = None,
) -> ImageGrid:
    """``sum_a weights[a] * quad[a] * g(theta_a, z . theta_a)`` on the target grid.

    ``g`` is linearly interpolated in t. ``quad`` defaults to
    :func:`default_quadrature`; ``weights`` (the limited-angle taper) to 1.
    """
    if sino.dim != target.dim:
        raise GridValidationError(
            f"sinogram is {sino.dim}D but the target grid is {target.dim}D"
        )
    n = sino.n_angles
    q = default_quadrature(sino) if quad is None else np.broadcast_to(np.asarray(quad, float), (n,))
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise GridValidationError(f"expected {n} angle weights, got {w.shape}")
    coef = w * q

    pts = target.points()
    normals = sino.normals()
    t = sino.t
    t_lo, t_hi = t[0], t[-1]
    tol = 1e-9 * max(1.0, abs(t_hi))
    acc = np.zeros(pts.shape[0])
    for a in range(n):
        if coef[a] == 0:
            continue
        p = pts @ normals[a]
        if p.min() < t_lo - tol or p.max() > t_hi + tol:
            raise CoverageError(
                f"t-axis [{t_lo:.6g}, {t_hi:.6g}] does not cover projections "
                f"[{p.min():.6g}, {p.max():.6g}] at angle index {a}"
            )
        acc += coef[a] * np.interp(p, t, sino.values[a], left=0.0, right=0.0)
    return target.with_values(acc.reshape(target.shape))


# -- exact transforms of the box -------------------------------------------

def chord_length_square(theta, t, a: float = 0.5):
    """Length of ``{x . theta = t} ∩ [-a, a]^2``."""
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    c, s, t = np.broadcast_arrays(c, s, t)
    # x = t*(c, s) + u*(-s, c); intersect the u-intervals of both slabs
    u_lo = np.full(t.shape, -np.inf)
    u_hi = np.full(t.shape, np.inf)
    for base, dirn in ((t * c, -s), (t * s, c)):
        tiny = np.abs(dirn) < 1e-15
        safe = np.where(tiny, 1.0, dirn)
        e1 = (-a - base) / safe
        e2 = (a - base) / safe
        lo = np.where(tiny, np.where(np.abs(base) <= a, -np.inf, np.inf), np.minimum(e1, e2))
        hi = np.where(tiny, np.where(np.abs(base) <= a, np.inf, -np.inf), np.maximum(e1, e2))
        u_lo = np.maximum(u_lo, lo)
        u_hi = np.minimum(u_hi, hi)
    out = np.maximum(u_hi - u_lo, 0.0)
    return out if out.ndim else float(out)


_CUBE_VERTS = np.array(
    [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=float
)
_CUBE_EDGES = np.array(
    [(i, j) for i in range(8) for j in range(i + 1, 8)
     if np.sum(_CUBE_VERTS[i] != _CUBE_VERTS[j]) == 1]
)


def section_area_cube(theta, t, a: float = 0.5):
    """Area of ``{x . theta = t} ∩ [-a, a]^3`` by clipping the plane to the cube.

    ``theta`` is one unit vector; ``t`` may be an array.
    """
    theta = np.asarray(theta, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    verts = a * _CUBE_VERTS
    p0 = verts[_CUBE_EDGES[:, 0]]
    p1 = verts[_CUBE_EDGES[:, 1]]
    d0 = p0 @ theta
    d1 = p1 @ theta
    denom = d1 - d0
    par = np.abs(denom) < 1e-15
    frac = (t[:, None] - d0) / np.where(par, 1.0, denom)
    valid = (~par) & (frac >= 0) & (frac <= 1)
    pts = p0 + frac[..., None] * (p1 - p0)  # (nt, 12, 3)

    e1, e2 = plane_basis(theta)
    uv = np.stack([pts @ e1, pts @ e2], axis=-1)
    cnt = valid.sum(axis=1)
    centre = np.where(
        cnt[:, None] > 0,
        (uv * valid[..., None]).sum(axis=1) / np.maximum(cnt, 1)[:, None],
        0.0,
    )
    ang = np.arctan2(uv[..., 1] - centre[:, None, 1], uv[..., 0] - centre[:, None, 0])
    ang = np.where(valid, ang, np.inf)
    order = np.argsort(ang, axis=1, kind="stable")
    uv = np.take_along_axis(uv, order[..., None], axis=1)
    ok = np.take_along_axis(valid, order, axis=1)
    # pad the unused slots with the last valid vertex: zero-length edges
    last = np.maximum(cnt - 1, 0)
    fill = np.take_along_axis(uv, last[:, None, None].repeat(2, axis=2), axis=1)
    uv = np.where(ok[..., None], uv, fill)
    x, y = uv[..., 0], uv[..., 1]
    area = 0.5 * np.abs((x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y).sum(axis=1))
    return np.where(cnt >= 3, area, 0.0)


def box_sinogram(angles: AngleSet, t_axis: tuple[float, float, int], a: float = 0.5) -> Sinogram:
    """Exact Radon data of the indicator of ``[-a, a]^dim``."""
    t0, dt, nt = float(t_axis[0]), float(t_axis[1]), int(t_axis[2])
    t = t0 + dt * np.arange(nt)
    if angles.dim == 2:
        vals = chord_length_square(angles.directions[:, None], t[None, :], a)
    else:
        vals = np.stack([section_area_cube(th, t, a) for th in angles.directions])
    return Sinogram(angles.dim, angles.directions, t0, dt, vals)


# -- limited angle -----------------------------------------------------------

def limited_angle_weights(angles: AngleSet, Phi: float, lambda_smooth: float) -> np.ndarray:
    """Taper that is 1 on ``|theta| <= Phi`` and falls linearly to 0 over ``lambda_smooth``.

    Angles are read modulo ``pi`` into ``[-pi/2, pi/2)``, which covers the
    mirrored wedge around ``pi`` as well.
    """
    if angles.dim != 2:
        raise ValueError("limited-angle weights are defined for 2D angle sets")
    if not 0 < Phi < np.pi / 2:
        raise ValueError(f"Phi must lie in (0, pi/2), got {Phi}")
    if lambda_smooth < 0:
        raise ValueError("lambda_smooth must be non-negative")
    if Phi + lambda_smooth >= np.pi / 2:
        raise ValueError("Phi + lambda_smooth must stay below pi/2 (wedges overlap)")
    th = np.mod(angles.directions + np.pi / 2, np.pi) - np.pi / 2
    excess = np.abs(th) - Phi
    if lambda_smooth == 0:
        return np.where(excess <= 0, 1.0, 0.0)
    return np.clip(1.0 - excess / lambda_smooth, 0.0, 1.0)


def extend_limited_angle(
    sino: Sinogram, angles: AngleSet, Phi: float, lambda_smooth: float
) -> tuple[Sinogram, np.ndarray, np.ndarray]:
    """Fill the taper band by repeating the outermost measured projection.

    ``sino`` holds the measured angles ``|theta| <= Phi``; ``angles`` is the
    full uniform set the taper is evaluated on. Returns the extended
    sinogram together with its taper weights and quadrature weights.
    """
    w = limited_angle_weights(angles, Phi, lambda_smooth)
    keep = w > 0
    target = angles.directions[keep]
    measured = sino.angles
    clipped = np.clip(target, measured.min(), measured.max())
    src = np.abs(clipped[:, None] - measured[None, :]).argmin(axis=1)
    ext = Sinogram(2, target, sino.t0, sino.dt, sino.values[src])
    return ext, w[keep], angles.weights[keep]

"""Test images and exact Radon transforms of simple shapes.

Pixels take the value at their cell centre, without anti-aliasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import ImageGrid, centered_grid

PHANTOM_NAMES = ("shapes2d", "shepp_logan", "disk", "box_balls_3d")


@dataclass(frozen=True)
class PhantomSpec:
    name: str
    resolution: int = 128
    half_width: float = 0.5

    def __post_init__(self):
        if self.name not in PHANTOM_NAMES:
            raise ValueError(f"unknown phantom {self.name!r}; choose from {PHANTOM_NAMES}")
        if self.resolution < 8:
            raise ValueError(f"resolution must be >= 8, got {self.resolution}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def dim(self) -> int:
        return 3 if self.name == "box_balls_3d" else 2


# -- shape primitives --------------------------------------------------------

@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    axes: tuple[float, float]
    angle: float = 0.0  # radians, rotation of the first axis from x
    value: float = 1.0

    def contains(self, x, y):
        c, s = np.cos(self.angle), np.sin(self.angle)
        dx, dy = x - self.center[0], y - self.center[1]
        u = c * dx + s * dy
        v = -s * dx + c * dy
        return (u / self.axes[0]) ** 2 + (v / self.axes[1]) ** 2 <= 1.0

    @property
    def area(self) -> float:
        return np.pi * self.axes[0] * self.axes[1]

    def radon(self, theta, t):
        theta, t = np.broadcast_arrays(np.asarray(theta, float), np.asarray(t, float))
        phi = theta - self.angle
        a, b = self.axes
        r2 = (a * np.cos(phi)) ** 2 + (b * np.sin(phi)) ** 2
        shift = self.center[0] * np.cos(theta) + self.center[1] * np.sin(theta)
        tt = t - shift
        chord = 2 * a * b * np.sqrt(np.maximum(r2 - tt * tt, 0.0)) / r2
        return self.value * chord


@dataclass(frozen=True)
class Polygon:
    """Convex polygon given by its vertices in counter-clockwise order."""

    vertices: tuple[tuple[float, float], ...]
    value: float = 1.0

    def _edges(self):
        v = np.asarray(self.vertices, dtype=float)
        return v, np.roll(v, -1, axis=0)

    def contains(self, x, y):
        inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
        for (x0, y0), (x1, y1) in zip(*self._edges()):
            inside &= (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0) >= 0
        return inside

    @property
    def area(self) -> float:
        a, b = self._edges()
        return 0.5 * float(np.sum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]))

    def radon(self, theta, t):
        theta, t = np.broadcast_arrays(np.asarray(theta, float), np.asarray(t, float))
        c, s = np.cos(theta), np.sin(theta)
        # line x = t*(c, s) + u*(-s, c); clip u against each half-plane
        u_lo = np.full(t.shape, -np.inf)
        u_hi = np.full(t.shape, np.inf)
        for (x0, y0), (x1, y1) in zip(*self._edges()):
            ex, ey = x1 - x0, y1 - y0
            # constraint ex*(y - y0) - ey*(x - x0) >= 0 is  A + B*u >= 0
            A = ex * (t * s - y0) - ey * (t * c - x0)
            B = ex * c + ey * s
            tiny = np.abs(B) < 1e-15
            root = -A / np.where(tiny, 1.0, B)
            u_lo = np.where(~tiny & (B > 0), np.maximum(u_lo, root), u_lo)
            u_hi = np.where(~tiny & (B < 0), np.minimum(u_hi, root), u_hi)
            dead = tiny & (A < 0)
            u_hi = np.where(dead, -np.inf, u_hi)
        return self.value * np.maximum(u_hi - u_lo, 0.0)


def rectangle(x0, x1, y0, y1, value=1.0) -> Polygon:
    return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), value)


SHAPES2D = (
    Ellipse((-0.25, 0.25), (0.12, 0.12), 0.0, 1.0),
    Ellipse((0.25, 0.25), (0.18, 0.08), np.deg2rad(30.0), 0.8),
    Polygon(((-0.38, -0.1), (-0.24, -0.38), (-0.1, -0.1)), 0.9),
    rectangle(0.1, 0.4, -0.35, -0.15, 0.7),
)

DISK = Ellipse((0.0, 0.0), (0.3, 0.3), 0.0, 1.0)

# Shepp-Logan ellipses on [-1, 1]^2 with the higher-contrast intensities
# used by common toolkits: (value, a, b, x0, y0, angle in degrees).
SHEPP_LOGAN_TABLE = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def shepp_logan_ellipses(half_width: float = 0.5) -> list[Ellipse]:
    # ``a`` is the semi-axis that sits along x before rotation
    return [
        Ellipse((x0 * half_width, y0 * half_width), (a * half_width, b * half_width),
                np.deg2rad(phi), val)
        for val, a, b, x0, y0, phi in SHEPP_LOGAN_TABLE
    ]


BOX_3D = ((-0.3, -0.05),) * 3
BALLS_3D = (((0.2, 0.2, 0.0), 0.12), ((0.2, -0.05, 0.0), 0.12))


def _paint(grid: ImageGrid, shapes, background=0.0, additive=False) -> ImageGrid:
    x, y = np.meshgrid(*grid.axes(), indexing="ij")
    img = np.full(grid.shape, background, dtype=float)
    for sh in shapes:
        m = sh.contains(x, y)
        if additive:
            img[m] += sh.value
        else:
            img[m] = sh.value
    return grid.with_values(img)


def make_phantom(spec: PhantomSpec) -> ImageGrid:
    a = spec.half_width
    grid = centered_grid(spec.resolution, spec.dim, a)
    scale = a / 0.5
    if spec.name == "shapes2d":
        return _paint(grid, scaled_shapes(SHAPES2D, scale))
    if spec.name == "disk":
        return _paint(grid, scaled_shapes((DISK,), scale))
    if spec.name == "shepp_logan":
        return _paint(grid, shepp_logan_ellipses(a), additive=True)
    # box and two balls: 0.5 inside, 0.3 elsewhere
    x, y, z = np.meshgrid(*grid.axes(), indexing="ij")
    inside = np.ones(grid.shape, dtype=bool)
    for coord, (lo, hi) in zip((x, y, z), BOX_3D):
        inside &= (coord >= lo * scale) & (coord <= hi * scale)
    for (cx, cy, cz), r in BALLS_3D:
        inside |= (x - cx * scale) ** 2 + (y - cy * scale) ** 2 + (z - cz * scale) ** 2 <= (r * scale) ** 2
    return grid.with_values(np.where(inside, 0.5, 0.3))


def scaled_shapes(shapes, scale: float):
    out = []
    for sh in shapes:
        if isinstance(sh, Ellipse):
            out.append(Ellipse((sh.center[0] * scale, sh.center[1] * scale),
                               (sh.axes[0] * scale, sh.axes[1] * scale), sh.angle, sh.value))
        else:
            out.append(Polygon(tuple((vx * scale, vy * scale) for vx, vy in sh.vertices), sh.value))
    return out


def phantom_shapes(name: str, half_width: float = 0.5):
    """The primitive shapes of a 2D phantom, for exact projections."""
    if name == "shapes2d":
        return scaled_shapes(SHAPES2D, half_width / 0.5)
    if name == "disk":
        return scaled_shapes((DISK,), half_width / 0.5)
    if name == "shepp_logan":
        return shepp_logan_ellipses(half_width)
    raise ValueError(f"no analytic shape list for {name!r}")


def analytic_radon(shape: str, params: dict, theta, t):
    """Exact line integral of a unit-valued disk, ellipse or square.

    ``params``: disk ``radius`` and optional ``center``; ellipse ``axes``,
    optional ``center`` and ``angle``; square ``half_width`` and optional
    ``center``.
    """
    center = tuple(params.get("center", (0.0, 0.0)))
    if shape == "disk":
        r = float(params["radius"])
        sh = Ellipse(center, (r, r))
    elif shape == "ellipse":
        sh = Ellipse(center, tuple(params["axes"]), float(params.get("angle", 0.0)))
    elif shape == "square":
        a = float(params["half_width"])
        sh = rectangle(center[0] - a, center[0] + a, center[1] - a, center[1] + a)
    else:
        raise ValueError(f"unsupported shape {shape!r}")
    out = sh.radon(theta, t)
    return out if out.ndim else float(out)


def shapes_radon(shapes, theta, t):
    """Sum of exact projections of painted shapes (non-overlapping or additive)."""
    return sum(sh.radon(theta, t) for sh in shapes)

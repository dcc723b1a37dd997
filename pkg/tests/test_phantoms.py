import math

import numpy as np
import pytest
from scipy import integrate

from dsmtomo.phantoms import (
    SHAPES2D,
    Ellipse,
    PhantomSpec,
    Polygon,
    analytic_radon,
    make_phantom,
    phantom_shapes,
    rectangle,
)


@pytest.mark.parametrize("res", (16, 48))
def test_box_balls_range(res):
    v = make_phantom(PhantomSpec("box_balls_3d", res)).values
    assert v.min() == 0.3 and v.max() == 0.5


def test_box_balls_three_components():
    from scipy import ndimage

    v = make_phantom(PhantomSpec("box_balls_3d", 48)).values
    assert ndimage.label(v > 0.4)[1] == 3


def test_disk_membership():
    img = make_phantom(PhantomSpec("disk", 64))
    x = img.axes()[0]
    i0, ic = np.argmin(np.abs(x)), np.argmin(np.abs(x - 0.45))
    assert img.values[i0, i0] == 1.0 and img.values[ic, ic] == 0.0


def test_shapes2d_area_fraction():
    img = make_phantom(PhantomSpec("shapes2d", 512))
    expected = sum(s.area for s in SHAPES2D)
    assert np.count_nonzero(img.values) / img.values.size == pytest.approx(expected, rel=0.02)


def test_shapes2d_values_in_unit_interval():
    v = make_phantom(PhantomSpec("shapes2d", 128)).values
    assert v.min() == 0.0 and v.max() == 1.0
    assert set(np.unique(v)) == {0.0, 0.7, 0.8, 0.9, 1.0}


def test_shepp_logan_range_and_scaling():
    img = make_phantom(PhantomSpec("shepp_logan", 128))
    assert img.values.max() == pytest.approx(1.0)
    assert img.values.min() == pytest.approx(0.0, abs=1e-12)
    wide = make_phantom(PhantomSpec("shepp_logan", 128, half_width=1.0))
    assert np.array_equal(img.values, wide.values)


@pytest.mark.parametrize("bad", [{"name": "lena"}, {"name": "disk", "resolution": 4},
                                 {"name": "disk", "half_width": 0.0}])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        PhantomSpec(**bad)


def test_polygon_orientation_and_area():
    tri = SHAPES2D[2]
    assert isinstance(tri, Polygon)
    assert tri.area == pytest.approx(0.5 * 0.28 * 0.28)
    assert tri.contains(np.array(-0.24), np.array(-0.2))


@pytest.mark.parametrize("t", (0.0, 0.1, 0.29, 0.31))
@pytest.mark.parametrize("theta", (0.0, 1.0, -2.0))
def test_disk_chord(t, theta):
    expected = 2 * math.sqrt(0.09 - t * t) if t <= 0.3 else 0.0
    assert analytic_radon("disk", {"radius": 0.3}, theta, t) == pytest.approx(expected, abs=1e-15)
    assert analytic_radon("disk", {"radius": 0.3}, theta, -t) == pytest.approx(expected, abs=1e-15)


def test_square_chords():
    assert analytic_radon("square", {"half_width": 0.4}, 0.0, 0.0) == pytest.approx(0.8)
    assert analytic_radon("square", {"half_width": 0.4}, math.pi / 4, 0.0) == pytest.approx(0.8 * math.sqrt(2))


def test_unsupported_shape():
    with pytest.raises(ValueError):
        analytic_radon("star", {}, 0.0, 0.0)


SHAPES = [
    ("disk", {"radius": 0.2, "center": (0.1, -0.05)}, math.pi * 0.04),
    ("ellipse", {"axes": (0.3, 0.1), "center": (0.0, 0.1), "angle": 0.6}, math.pi * 0.03),
    ("square", {"half_width": 0.25, "center": (-0.1, 0.0)}, 0.25),
]


@pytest.mark.parametrize("shape, params, area", SHAPES)
@pytest.mark.parametrize("theta", (0.0, 0.4, 2.2))
def test_projection_mass(shape, params, area, theta):
    val, _ = integrate.quad(lambda t: analytic_radon(shape, params, theta, t), -1, 1,
                            limit=200, epsabs=1e-12, epsrel=1e-12)
    assert val == pytest.approx(area, rel=1e-6)


@pytest.mark.parametrize("shape", list(SHAPES2D) + phantom_shapes("shepp_logan"))
def test_every_phantom_primitive_mass(shape):
    theta = 0.37
    if isinstance(shape, Ellipse):
        mid = shape.center[0] * math.cos(theta) + shape.center[1] * math.sin(theta)
        reach = max(shape.axes)
    else:
        proj = [vx * math.cos(theta) + vy * math.sin(theta) for vx, vy in shape.vertices]
        mid, reach = 0.5 * (max(proj) + min(proj)), 0.5 * (max(proj) - min(proj))
    val, _ = integrate.quad(lambda t: shape.radon(theta, t), mid - reach, mid + reach,
                            limit=400, epsabs=1e-13, epsrel=1e-12)
    assert val == pytest.approx(shape.value * shape.area, rel=1e-6)


def test_ellipse_rotation():
    e = Ellipse((0.0, 0.0), (0.3, 0.1), math.pi / 2)
    # rotated by 90 degrees, the long axis lies along y
    assert e.radon(0.0, 0.0) == pytest.approx(0.6)  # vertical line x = 0
    assert e.radon(math.pi / 2, 0.0) == pytest.approx(0.2)


def test_rectangle_helper():
    r = rectangle(0.0, 0.2, 0.0, 0.1)
    assert r.area == pytest.approx(0.02)
    assert r.radon(0.0, 0.1) == pytest.approx(0.1)

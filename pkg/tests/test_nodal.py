import numpy as np
import pytest

from ngl.eigen import analytic_eigenpair
from ngl.nodal import (circle_intersections, extract_nodal_set, nodal_length,
                       singular_points)
from ngl.surface import GridField, PLANAR, make_metric

from conftest import torus_field


def planar_field(fn, grid_n, origin=(-0.5, -0.5), side=1.0):
    h = side / (grid_n - 1)
    coords = origin[0] + np.arange(grid_n) * h
    x, y = np.meshgrid(coords, coords, indexing="ij")
    return GridField(fn(x, y), domain=PLANAR, origin=origin, side=side)


# ---------------------------------------------------------------- lengths


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_sine_wave_lengths(m):
    f = torus_field(lambda x, y: np.sin(2 * np.pi * m * x), 512)
    ns = extract_nodal_set(f)
    assert ns.euclidean_length == pytest.approx(2 * m, rel=1e-3)


def test_circle_curve_length():
    R = 0.3
    f = planar_field(lambda x, y: x * x + y * y - R * R, 512)
    ns = extract_nodal_set(f)
    assert ns.euclidean_length == pytest.approx(2 * np.pi * R, rel=5e-3)


def test_segment_endpoints_on_cell_edges():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * (x + 2 * y)) + 0.2, 64)
    ns = extract_nodal_set(f)
    h = 1.0 / 64
    for x0, y0, x1, y1 in ns.segments:
        # each endpoint has one coordinate exactly on the cell lattice
        on_lattice = [abs(c / h - round(c / h)) < 1e-9 for c in (x0, y0, x1, y1)]
        assert on_lattice[0] or on_lattice[1]
        assert on_lattice[2] or on_lattice[3]


def test_refinement_convergence():
    for fn in (lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y) + 0.3,
               lambda x, y: np.cos(2 * np.pi * (2 * x - y))):
        lengths = []
        for n in (256, 512):
            ns = extract_nodal_set(torus_field(fn, n))
            lengths.append(ns.euclidean_length)
        assert abs(lengths[1] - lengths[0]) / lengths[0] < 0.005


def test_singular_crossings_keep_length_bounded():
    # crossing nodal lines: length must stabilize, not blow up, under refinement
    fn = lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
    l1 = extract_nodal_set(torus_field(fn, 256)).euclidean_length
    l2 = extract_nodal_set(torus_field(fn, 512)).euclidean_length
    # saddle cells clip an O(h) corner at each of the 4 crossings
    assert l1 == pytest.approx(4.0, rel=5e-3)
    assert abs(l2 - l1) / l1 < 0.01


def test_metric_length_constant_factors(sin_x_256):
    ns = extract_nodal_set(sin_x_256)
    m1 = make_metric("flat", 256)
    e_len, m_len = nodal_length(ns, m1)
    assert m_len == e_len
    m4 = make_metric("flat", 256, value=4.0)
    _, m_len4 = nodal_length(ns, m4)
    assert m_len4 == pytest.approx(2 * e_len, abs=1e-10)


def test_metric_length_against_line_integral_oracle():
    # zero lines of sin(2 pi (x - 1/4)) sit where the wave factor varies in y
    f = torus_field(lambda x, y: np.sin(2 * np.pi * (x - 0.25)), 256)
    ns = extract_nodal_set(f)
    metric = make_metric("wave", 256)
    _, m_len = nodal_length(ns, metric)
    ys = (np.arange(200000) + 0.5) / 200000
    oracle = (np.mean(np.sqrt(1 + 0.2 * np.sin(2 * np.pi * ys)))
              + np.mean(np.sqrt(1 - 0.2 * np.sin(2 * np.pi * ys))))
    assert m_len == pytest.approx(oracle, rel=0.002)


# ---------------------------------------------------------------- singular points


def test_singular_points_absent_for_sine(sin_x_256):
    assert singular_points(sin_x_256) == []


def test_singular_points_product():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y), 256)
    pts = singular_points(f)
    expected = {(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)}
    assert len(pts) == 4
    for p in pts:
        assert min(max(abs(p[0] - e[0]), abs(p[1] - e[1])) for e in expected) < 1.0 / 256


def test_singular_points_sum():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x) + np.sin(2 * np.pi * y), 256)
    pts = singular_points(f)
    expected = [(0.25, 0.75), (0.75, 0.25)]
    assert len(pts) == 2
    for p, e in zip(sorted(pts), expected):
        assert abs(p[0] - e[0]) < 1.0 / 256
        assert abs(p[1] - e[1]) < 1.0 / 256


def test_singular_tolerances_validated(sin_x_256):
    with pytest.raises(ValueError):
        singular_points(sin_x_256, tol_f=0.0)


# ---------------------------------------------------------------- circle crossings


def test_circle_intersections_far_line(sin_x_256):
    ns = extract_nodal_set(sin_x_256)
    # nearest zero lines are at distance 0.25 > 0.2
    assert circle_intersections(ns, (0.25, 0.5), 0.2) == 0


def test_circle_intersections_crossing_line(sin_x_256):
    ns = extract_nodal_set(sin_x_256)
    assert circle_intersections(ns, (0.0, 0.0), 0.1) == 2


def test_circle_intersections_two_circles():
    R = 0.3
    f = planar_field(lambda x, y: x * x + y * y - R * R, 512,
                     origin=(-0.6, -0.6), side=1.2)
    ns = extract_nodal_set(f)
    assert circle_intersections(ns, (0.35, 0.0), 0.1) == 2


def test_circle_intersections_empty():
    from ngl.nodal import NodalSet
    assert circle_intersections(NodalSet(np.empty((0, 4))), (0.5, 0.5), 0.1) == 0


# ---------------------------------------------------------------- structure


def test_extraction_deterministic(sin_x_256):
    a = extract_nodal_set(sin_x_256).segments
    b = extract_nodal_set(sin_x_256).segments
    np.testing.assert_array_equal(a, b)


def test_masked_planar_extraction():
    n = 128
    h = 1.0 / (n - 1)
    coords = -0.5 + np.arange(n) * h
    x, y = np.meshgrid(coords, coords, indexing="ij")
    mask = x * x + y * y <= 0.45 ** 2
    f = GridField(x, domain=PLANAR, origin=(-0.5, -0.5), side=1.0, mask=mask)
    ns = extract_nodal_set(f)
    # the line x = 0 clipped to the mask disk has length about 0.9
    assert ns.euclidean_length == pytest.approx(0.9, rel=0.03)


def test_eigenfunction_constant_has_no_nodal_set():
    pair = analytic_eigenpair(0, 0, grid_n=64)
    assert len(extract_nodal_set(pair.field)) == 0

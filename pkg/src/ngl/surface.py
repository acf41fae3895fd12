"""Conformally flat torus metrics, sampled scalar fields, and region evaluation.

The metric is g = q(x, y)(dx^2 + dy^2) on the unit torus [0,1)^2, realized by
one global periodic chart.  Lengths scale by sqrt(q), areas by q.  Everything
downstream (eigenfunctions, nodal sets, growth exponents) consumes the two
primitives defined here: bilinear interpolation of grid samples and sup / L^q
evaluation over disks and annuli.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegionError

TORUS = "torus"
PLANAR = "planar"

_GFD_MAGIC_KEYS = ("grid_n", "domain", "side")


# --------------------------------------------------------------------------
# grid fields


@dataclass
class GridField:
    """Scalar samples on a uniform n x n grid.

    ``values[i, j] = f(x_i, y_j)``.  Torus fields sample ``x_i = i/n`` and
    interpolate periodically; planar fields sample ``x_i = origin + i*h`` with
    ``h = side/(n-1)`` (both endpoints included) and may carry a boolean mask
    restricting the meaningful part of the square (e.g. a disk).
    """

    values: np.ndarray
    domain: str = TORUS
    origin: tuple[float, float] = (0.0, 0.0)
    side: float = 1.0
    mask: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError("expected a square sample array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field samples must all be finite")
        if self.domain not in (TORUS, PLANAR):
            raise ValueError(f"unknown domain {self.domain!r}")

    @property
    def grid_n(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        n = self.grid_n
        return self.side / n if self.domain == TORUS else self.side / (n - 1)

    def axis_coords(self) -> np.ndarray:
        n = self.grid_n
        if self.domain == TORUS:
            return np.arange(n) / n
        return self.origin[0] + np.arange(n) * self.spacing

    def interp(self, x, y):
        """Bilinear interpolation at arbitrary points (periodic on the torus)."""
        if self.domain == TORUS:
            return _bilinear_periodic(self.values, np.asarray(x), np.asarray(y))
        return _bilinear_planar(self.values, np.asarray(x), np.asarray(y),
                                self.origin, self.spacing)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _bilinear_periodic(values, x, y):
    n = values.shape[0]
    gx = np.asarray(x, dtype=float) * n
    gy = np.asarray(y, dtype=float) * n
    i0 = np.floor(gx).astype(np.int64)
    j0 = np.floor(gy).astype(np.int64)
    fx = gx - i0
    fy = gy - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    # nested lerp form: exact on constant fields
    low = values[i0, j0] + fx * (values[i1, j0] - values[i0, j0])
    high = values[i0, j1] + fx * (values[i1, j1] - values[i0, j1])
    return low + fy * (high - low)


def _bilinear_planar(values, x, y, origin, h):
    n = values.shape[0]
    gx = (np.asarray(x, dtype=float) - origin[0]) / h
    gy = (np.asarray(y, dtype=float) - origin[1]) / h
    gx = np.clip(gx, 0.0, n - 1 - 1e-12)
    gy = np.clip(gy, 0.0, n - 1 - 1e-12)
    i0 = np.floor(gx).astype(np.int64)
    j0 = np.floor(gy).astype(np.int64)
    fx = gx - i0
    fy = gy - j0
    low = values[i0, j0] + fx * (values[i0 + 1, j0] - values[i0, j0])
    high = values[i0, j0 + 1] + fx * (values[i0 + 1, j0 + 1] - values[i0, j0 + 1])
    return low + fy * (high - low)


def write_gfd(field: GridField, path) -> None:
    """Dump a field: one JSON header line, then n*n little-endian float64."""
    header = {
        "grid_n": field.grid_n,
        "domain": field.domain,
        "side": field.side,
        "origin": list(field.origin),
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("ascii"))
        f.write(b"\n")
        f.write(field.values.astype("<f8").tobytes(order="C"))


def read_gfd(path) -> GridField:
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode("ascii"))
        n = int(header["grid_n"])
        raw = f.read(8 * n * n)
    values = np.frombuffer(raw, dtype="<f8").reshape(n, n).copy()
    origin = tuple(header.get("origin", (0.0, 0.0)))
    return GridField(values, domain=header["domain"], origin=origin,
                     side=float(header["side"]))


# --------------------------------------------------------------------------
# metric


@dataclass
class ConformalMetric:
    """Conformal factor q sampled on the unit torus, with derived constants.

    Invariants: 0 < q_minus <= q <= q_plus at every sample, volume = mean(q)
    (exact periodic trapezoid rule), alpha0 = q_minus / (5 q_plus).
    """

    q: np.ndarray
    q_minus: float
    q_plus: float
    volume: float
    alpha0: float
    profile: str = ""

    @property
    def grid_n(self) -> int:
        return self.q.shape[0]

    @property
    def spacing(self) -> float:
        return 1.0 / self.grid_n

    @property
    def is_flat(self) -> bool:
        return self.q_plus - self.q_minus <= 1e-13 * self.q_plus

    def sqrt_q_field(self) -> GridField:
        return GridField(np.sqrt(self.q), domain=TORUS)

    def q_field(self) -> GridField:
        return GridField(self.q, domain=TORUS)

    def q_at(self, x, y):
        return _bilinear_periodic(self.q, np.asarray(x), np.asarray(y))


def _profile_flat(x, y, value=1.0):
    return np.full_like(x, float(value))


def _profile_wave(x, y, amplitude=0.2):
    return 1.0 + amplitude * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)


def _profile_stripe(x, y, amplitude=0.3):
    return 1.0 + amplitude * np.sin(2 * np.pi * x)


_PROFILES = {
    "flat": _profile_flat,
    "wave": _profile_wave,
    "stripe": _profile_stripe,
}


def make_metric(profile="flat", grid_n=256, **params) -> ConformalMetric:
    """Sample a named conformal-factor profile on the torus grid.

    Rejects any profile that is not strictly positive at every sample.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    if profile not in _PROFILES:
        raise ValueError(f"unknown metric profile {profile!r}; "
                         f"choose from {sorted(_PROFILES)}")
    coords = np.arange(grid_n) / grid_n
    x, y = np.meshgrid(coords, coords, indexing="ij")
    q = np.asarray(_PROFILES[profile](x, y, **params), dtype=float)
    q_min = float(q.min())
    if q_min <= 0.0:
        raise ValueError("conformal factor must be positive at every sample")
    q_max = float(q.max())
    return ConformalMetric(q=q, q_minus=q_min, q_plus=q_max,
                           volume=float(q.mean()),
                           alpha0=q_min / (5.0 * q_max),
                           profile=profile)


# --------------------------------------------------------------------------
# flat-torus distance and geodesic distance (first-order fast marching)


def flat_torus_distance(p, x, y):
    """Euclidean distance on the flat torus (minimum over period shifts)."""
    dx = np.abs(np.asarray(x) - p[0])
    dy = np.abs(np.asarray(y) - p[1])
    dx = np.minimum(dx, 1.0 - dx)
    dy = np.minimum(dy, 1.0 - dy)
    return np.hypot(dx, dy)


def _eikonal_update(a, b, w):
    # First-order upwind solve of |grad d| = w from axis-neighbor values a, b.
    if a > b:
        a, b = b, a
    if b - a >= w:
        return a + w
    return 0.5 * (a + b + np.sqrt(2.0 * w * w - (b - a) ** 2))


def _fast_march(metric: ConformalMetric, p, stop_radius=None, window=None):
    """March outward from p solving |grad d| = sqrt(q) with 4-neighbor upwind.

    Returns the full n x n distance array (entries not reached before
    ``stop_radius`` are +inf).  ``window`` restricts marching to indices
    within that half-width (in cells) of p, for wavelength-local queries.
    """
    n = metric.grid_n
    h = metric.spacing
    sq = np.sqrt(metric.q)
    dist = np.full((n, n), np.inf)
    accepted = np.zeros((n, n), dtype=bool)
    px, py = float(p[0]) % 1.0, float(p[1]) % 1.0

    ic = int(np.floor(px * n))
    jc = int(np.floor(py * n))
    heap = []
    # Exact local seeding: the metric is smooth, so within a couple of cells
    # of the source the distance is the straight-line length element.
    seed_reach = 3
    sq_p = float(np.sqrt(metric.q_at(px, py)))
    for di in range(-seed_reach, seed_reach + 1):
        for dj in range(-seed_reach, seed_reach + 1):
            i = (ic + di) % n
            j = (jc + dj) % n
            d_flat = flat_torus_distance((px, py), i * h, j * h)
            d0 = 0.5 * (sq_p + sq[i, j]) * float(d_flat)
            if d0 < dist[i, j]:
                dist[i, j] = d0
                heapq.heappush(heap, (d0, i, j))

    if window is not None:
        half = int(window)

        def in_window(i, j):
            di = (i - ic) % n
            if di > n // 2:
                di -= n
            dj = (j - jc) % n
            if dj > n // 2:
                dj -= n
            return abs(di) <= half and abs(dj) <= half
    else:
        def in_window(i, j):
            return True

    stop = np.inf if stop_radius is None else float(stop_radius)
    while heap:
        d, i, j = heapq.heappop(heap)
        if accepted[i, j]:
            continue
        accepted[i, j] = True
        if d > stop:
            continue
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii = (i + di) % n
            jj = (j + dj) % n
            if accepted[ii, jj] or not in_window(ii, jj):
                continue
            a = min(dist[(ii + 1) % n, jj], dist[(ii - 1) % n, jj])
            b = min(dist[ii, (jj + 1) % n], dist[ii, (jj - 1) % n])
            cand = _eikonal_update(a, b, sq[ii, jj] * h)
            if cand < dist[ii, jj]:
                dist[ii, jj] = cand
                heapq.heappush(heap, (cand, ii, jj))
    return dist


def geodesic_distance(metric: ConformalMetric, p) -> GridField:
    """Geodesic distance field from p, by first-order fast marching."""
    px, py = p
    if not (0.0 <= px < 1.0 and 0.0 <= py < 1.0):
        raise ValueError("source point must lie in [0,1)^2")
    return GridField(_fast_march(metric, p), domain=TORUS)


# --------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class EuclideanDisk:
    center: tuple[float, float]
    r: float


@dataclass(frozen=True)
class EuclideanAnnulus:
    center: tuple[float, float]
    r_inner: float
    r_outer: float


@dataclass(frozen=True)
class MetricDisk:
    """Geodesic disk: membership is distance_field <= r."""
    center: tuple[float, float]
    r: float
    distance: GridField


def metric_disk(metric: ConformalMetric, p, r) -> MetricDisk:
    return MetricDisk(center=tuple(p), r=float(r),
                      distance=geodesic_distance(metric, p))


# --------------------------------------------------------------------------
# sup and L^q over regions

_OVERSAMPLE = 4  # refinement factor of the sup lattice


def _delta_torus(coord, center):
    d = coord - center
    return d - np.round(d)


def _fine_lattice_in_disk(field: GridField, center, r):
    """Fine-lattice points (original grid and its 4x refinement) inside a disk."""
    n = field.grid_n
    fine = _OVERSAMPLE * n if field.domain == TORUS else _OVERSAMPLE * (n - 1) + 1
    if field.domain == TORUS:
        hf = 1.0 / (_OVERSAMPLE * n)
        lo_i = int(np.ceil((center[0] - r) / hf))
        hi_i = int(np.floor((center[0] + r) / hf))
        lo_j = int(np.ceil((center[1] - r) / hf))
        hi_j = int(np.floor((center[1] + r) / hf))
        ii = np.arange(lo_i, hi_i + 1)
        jj = np.arange(lo_j, hi_j + 1)
        X = ii[:, None] * hf
        Y = jj[None, :] * hf
        dx = _delta_torus(X, center[0])
        dy = _delta_torus(Y, center[1])
    else:
        hf = field.spacing / _OVERSAMPLE
        ox, oy = field.origin
        lo_i = max(0, int(np.ceil((center[0] - r - ox) / hf)))
        hi_i = min(fine - 1, int(np.floor((center[0] + r - ox) / hf)))
        lo_j = max(0, int(np.ceil((center[1] - r - oy) / hf)))
        hi_j = min(fine - 1, int(np.floor((center[1] + r - oy) / hf)))
        if hi_i < lo_i or hi_j < lo_j:
            return np.empty(0), np.empty(0)
        ii = np.arange(lo_i, hi_i + 1)
        jj = np.arange(lo_j, hi_j + 1)
        X = ox + ii[:, None] * hf
        Y = oy + jj[None, :] * hf
        dx = X - center[0]
        dy = Y - center[1]
    inside = dx * dx + dy * dy <= r * r
    xs = np.broadcast_to(X, inside.shape)[inside]
    ys = np.broadcast_to(Y, inside.shape)[inside]
    return xs, ys


def _ring_points(center, radius, max_step, min_angles=64):
    m = max(min_angles, int(np.ceil(2 * np.pi * radius / max_step)))
    m = 8 * ((m + 7) // 8)  # keep axis tips on the ring
    th = np.arange(m) * (2 * np.pi / m)
    return center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)


def _count_coarse_samples_in_disk(field: GridField, center, r):
    n = field.grid_n
    coords = field.axis_coords()
    if field.domain == TORUS:
        dx = _delta_torus(coords, center[0])
        dy = _delta_torus(coords, center[1])
    else:
        dx = coords - center[0]
        dy = coords - center[1]
    inside = (dx * dx)[:, None] + (dy * dy)[None, :] <= r * r
    if field.mask is not None:
        inside &= field.mask
    return int(inside.sum())


def _grid_sup_disk(field: GridField, center, r):
    if _count_coarse_samples_in_disk(field, center, r) == 0:
        raise EmptyRegionError(
            f"disk of radius {r:g} contains no grid sample (h = {field.spacing:g})")
    xs, ys = _fine_lattice_in_disk(field, center, r)
    best = -np.inf
    if xs.size:
        best = float(np.max(np.abs(field.interp(xs, ys))))
    rx, ry = _ring_points(center, r, field.spacing / _OVERSAMPLE)
    best = max(best, float(np.max(np.abs(field.interp(rx, ry)))))
    return best


def _grid_sup_annulus(field: GridField, center, r_inner, r_outer):
    xs, ys = _fine_lattice_in_disk(field, center, r_outer)
    if field.domain == TORUS:
        dx = _delta_torus(xs, center[0])
        dy = _delta_torus(ys, center[1])
    else:
        dx = xs - center[0]
        dy = ys - center[1]
    keep = dx * dx + dy * dy >= r_inner * r_inner
    best = -np.inf
    if keep.any():
        best = float(np.max(np.abs(field.interp(xs[keep], ys[keep]))))
    for rad in (r_inner, r_outer):
        rx, ry = _ring_points(center, rad, field.spacing / _OVERSAMPLE)
        best = max(best, float(np.max(np.abs(field.interp(rx, ry)))))
    if not np.isfinite(best):
        raise EmptyRegionError("annulus contains no sample")
    return best


def _callable_sup_disk(fn, center, r, n_radii=96, max_step=None):
    radii = np.linspace(0.0, r, n_radii)
    best = float(np.abs(np.asarray(fn(center[0], center[1]))).max())
    step = max_step if max_step is not None else max(r / n_radii, 1e-12)
    for rad in radii[1:]:
        rx, ry = _ring_points(center, rad, step, min_angles=96)
        best = max(best, float(np.max(np.abs(fn(rx, ry)))))
    return best


def _callable_sup_annulus(fn, center, r_inner, r_outer, n_radii=64):
    radii = np.linspace(r_inner, r_outer, n_radii)
    step = max((r_outer - r_inner) / n_radii, 1e-12)
    best = -np.inf
    for rad in radii:
        rx, ry = _ring_points(center, rad, step, min_angles=96)
        best = max(best, float(np.max(np.abs(fn(rx, ry)))))
    return best


def _as_evaluator(fieldlike):
    """Return a vectorized (x, y) -> value callable, or None for grid fields."""
    ev = getattr(fieldlike, "evaluate", None)
    if ev is not None:
        return ev
    if isinstance(fieldlike, GridField):
        return None
    if callable(fieldlike):
        return fieldlike
    raise TypeError(f"cannot evaluate object of type {type(fieldlike)!r}")


def sup_on_region(fieldlike, region):
    """Supremum of |field| over a disk, annulus, or geodesic disk.

    Grid fields are scanned on the original lattice, its 4x bilinear
    refinement, and the region boundary circles.  Objects exposing an
    ``evaluate`` callable (and bare callables) are scanned on dense polar
    rasters that include the boundary exactly.
    """
    ev = _as_evaluator(fieldlike)
    if isinstance(region, EuclideanDisk):
        if ev is not None:
            return _callable_sup_disk(ev, region.center, region.r)
        return _grid_sup_disk(fieldlike, region.center, region.r)
    if isinstance(region, EuclideanAnnulus):
        if ev is not None:
            return _callable_sup_annulus(ev, region.center,
                                         region.r_inner, region.r_outer)
        return _grid_sup_annulus(fieldlike, region.center,
                                 region.r_inner, region.r_outer)
    if isinstance(region, MetricDisk):
        if not isinstance(fieldlike, GridField):
            raise TypeError("metric-disk sup needs a grid field")
        return _metric_disk_sup(fieldlike, region)
    raise TypeError(f"unknown region type {type(region)!r}")


def _metric_disk_sup(field: GridField, region: MetricDisk):
    dist = region.distance
    n = field.grid_n
    if _count_coarse_metric_samples(field, region) == 0:
        raise EmptyRegionError(
            f"metric disk of radius {region.r:g} contains no grid sample")
    # Bounding box from the distance field itself: all samples with d <= r,
    # padded by one cell, refined 4x, then masked by interpolated distance.
    ii, jj = np.nonzero(dist.values <= region.r)
    h = field.spacing
    # unwrap indices around the center for a contiguous box
    ic = int(np.floor(region.center[0] * n))
    jc = int(np.floor(region.center[1] * n))
    di = (ii - ic + n // 2) % n - n // 2
    dj = (jj - jc + n // 2) % n - n // 2
    lo_i, hi_i = di.min() - 1, di.max() + 1
    lo_j, hi_j = dj.min() - 1, dj.max() + 1
    fi = np.arange(lo_i * _OVERSAMPLE, hi_i * _OVERSAMPLE + 1)
    fj = np.arange(lo_j * _OVERSAMPLE, hi_j * _OVERSAMPLE + 1)
    X = (ic + 0.0) * h + fi[:, None] * (h / _OVERSAMPLE)
    Y = (jc + 0.0) * h + fj[None, :] * (h / _OVERSAMPLE)
    Xb = np.broadcast_to(X, (fi.size, fj.size)).ravel()
    Yb = np.broadcast_to(Y, (fi.size, fj.size)).ravel()
    dvals = dist.interp(Xb, Yb)
    keep = dvals <= region.r
    if not keep.any():
        raise EmptyRegionError("metric disk resolves to no fine sample")
    return float(np.max(np.abs(field.interp(Xb[keep], Yb[keep]))))


def _count_coarse_metric_samples(field: GridField, region: MetricDisk):
    inside = region.distance.values <= region.r
    return int(inside.sum())


# ---- L^q norms -----------------------------------------------------------


def _grid_lq_disk(field: GridField, center, r, qexp, sub=8):
    if _count_coarse_samples_in_disk(field, center, r) == 0:
        raise EmptyRegionError(
            f"disk of radius {r:g} contains no grid sample (h = {field.spacing:g})")
    h = field.spacing
    n_cells = int(np.ceil(2 * r / h)) + 2
    # cell (i, j) spans [x0 + i h, x0 + (i+1) h) relative to the disk's box
    x0 = center[0] - r - h
    y0 = center[1] - r - h
    ci = np.arange(n_cells)
    cx = x0 + (ci + 0.5) * h
    cy = y0 + (ci + 0.5) * h
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    d_center = np.hypot(CX - center[0], CY - center[1])
    half_diag = h * np.sqrt(0.5)
    full = d_center <= r - half_diag
    boundary = (~full) & (d_center <= r + half_diag)
    total = 0.0
    if full.any():
        vals = np.abs(field.interp(CX[full], CY[full]))
        total += float(np.sum(vals ** qexp)) * h * h
    if boundary.any():
        bx = CX[boundary]
        by = CY[boundary]
        off = (np.arange(sub) + 0.5) / sub - 0.5
        OX, OY = np.meshgrid(off * h, off * h, indexing="ij")
        px = bx[:, None] + OX.ravel()[None, :]
        py = by[:, None] + OY.ravel()[None, :]
        inside = (px - center[0]) ** 2 + (py - center[1]) ** 2 <= r * r
        if inside.any():
            vals = np.abs(field.interp(px[inside], py[inside]))
            total += float(np.sum(vals ** qexp)) * (h / sub) ** 2
    return total ** (1.0 / qexp)


def _callable_lq_polar(fn, center, r_inner, r_outer, qexp,
                       n_radial=64, n_angular=512):
    """L^q over a disk/annulus by Gauss-Legendre (radial) x trapezoid (angular)."""
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    rad = 0.5 * (r_outer - r_inner) * nodes + 0.5 * (r_outer + r_inner)
    wr = 0.5 * (r_outer - r_inner) * weights
    th = np.arange(n_angular) * (2 * np.pi / n_angular)
    dth = 2 * np.pi / n_angular
    px = center[0] + rad[:, None] * np.cos(th)[None, :]
    py = center[1] + rad[:, None] * np.sin(th)[None, :]
    vals = np.abs(np.asarray(fn(px, py)))
    integral = float(np.sum((vals ** qexp) * rad[:, None] * wr[:, None]) * dth)
    return integral ** (1.0 / qexp)


def _grid_lq_metric_disk(field: GridField, region: MetricDisk, qexp, sub=8):
    if _count_coarse_metric_samples(field, region) == 0:
        raise EmptyRegionError(
            f"metric disk of radius {region.r:g} contains no grid sample")
    h = field.spacing
    dist = region.distance
    inside = dist.values <= region.r
    # cells whose 4 corners are all inside count fully; mixed cells subsample
    c00 = inside
    c10 = np.roll(inside, -1, axis=0)
    c01 = np.roll(inside, -1, axis=1)
    c11 = np.roll(c10, -1, axis=1)
    full = c00 & c10 & c01 & c11
    boundary = (c00 | c10 | c01 | c11) & ~full
    n = field.grid_n
    coords = np.arange(n) * h
    total = 0.0
    if full.any():
        ii, jj = np.nonzero(full)
        cx = coords[ii] + 0.5 * h
        cy = coords[jj] + 0.5 * h
        vals = np.abs(field.interp(cx, cy))
        total += float(np.sum(vals ** qexp)) * h * h
    if boundary.any():
        ii, jj = np.nonzero(boundary)
        off = (np.arange(sub) + 0.5) / sub
        OX, OY = np.meshgrid(off * h, off * h, indexing="ij")
        px = coords[ii][:, None] + OX.ravel()[None, :]
        py = coords[jj][:, None] + OY.ravel()[None, :]
        keep = dist.interp(px.ravel(), py.ravel()).reshape(px.shape) <= region.r
        if keep.any():
            vals = np.abs(field.interp(px[keep], py[keep]))
            total += float(np.sum(vals ** qexp)) * (h / sub) ** 2
    return total ** (1.0 / qexp)


def lq_norm_on_region(fieldlike, region, qexp):
    """L^q norm of the field over a disk, annulus, or geodesic disk."""
    if not (1.0 <= qexp < np.inf):
        raise ValueError("qexp must lie in [1, inf)")
    ev = _as_evaluator(fieldlike)
    if isinstance(region, EuclideanDisk):
        if ev is not None:
            return _callable_lq_polar(ev, region.center, 0.0, region.r, qexp)
        return _grid_lq_disk(fieldlike, region.center, region.r, qexp)
    if isinstance(region, EuclideanAnnulus):
        if ev is not None:
            return _callable_lq_polar(ev, region.center, region.r_inner,
                                      region.r_outer, qexp)
        outer = _grid_lq_disk(fieldlike, region.center, region.r_outer, qexp)
        inner = _grid_lq_disk(fieldlike, region.center, region.r_inner, qexp)
        val = outer ** qexp - inner ** qexp
        return max(val, 0.0) ** (1.0 / qexp)
    if isinstance(region, MetricDisk):
        if not isinstance(fieldlike, GridField):
            raise TypeError("metric-disk L^q needs a grid field")
        return _grid_lq_metric_disk(fieldlike, region, qexp)
    raise TypeError(f"unknown region type {type(region)!r}")


def polyline_metric_length(segments: np.ndarray, metric: ConformalMetric) -> float:
    """Length of straight segments under g, i.e. integral of sqrt(q) ds.

    3-point Gauss quadrature per segment; endpoints are torus coordinates.
    """
    if len(segments) == 0:
        return 0.0
    seg = np.asarray(segments, dtype=float)
    x0, y0, x1, y1 = seg[:, 0], seg[:, 1], seg[:, 2], seg[:, 3]
    euclid = np.hypot(x1 - x0, y1 - y0)
    t_nodes = np.array([0.5 - np.sqrt(0.15), 0.5, 0.5 + np.sqrt(0.15)])
    t_weights = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
    sq = np.sqrt(metric.q)
    total = np.zeros_like(euclid)
    for t, w in zip(t_nodes, t_weights):
        px = x0 + t * (x1 - x0)
        py = y0 + t * (y1 - y0)
        total += w * _bilinear_periodic(sq, px, py)
    return float(np.sum(total * euclid))

"""Nodal sets of sampled fields: extraction, length, singular points, crossings.

Extraction is cell-local marching squares with linear edge interpolation.
Exact zeros at grid nodes count as positive, which makes the 16-case table
total; ambiguous saddle cells are split by the interpolated center sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import ndimage

from .surface import ConformalMetric, GridField, TORUS, polyline_metric_length

# edge ids: 0 bottom (A-B), 1 right (B-C), 2 top (D-C), 3 left (A-D)
_CASE_PAIRS = {
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    8: ((2, 3),), 7: ((2, 3),),
    3: ((3, 1),), 12: ((3, 1),),
    6: ((0, 2),), 9: ((0, 2),),
}


@dataclass
class NodalSet:
    """Zero set of a field as straight segments in chart coordinates."""
    segments: np.ndarray  # (n_seg, 4): x0, y0, x1, y1
    domain: str = TORUS
    origin: tuple[float, float] = (0.0, 0.0)
    side: float = 1.0
    singular_points: list = dataclass_field(default_factory=list)

    @property
    def euclidean_length(self) -> float:
        if len(self.segments) == 0:
            return 0.0
        s = self.segments
        return float(np.sum(np.hypot(s[:, 2] - s[:, 0], s[:, 3] - s[:, 1])))

    def __len__(self):
        return len(self.segments)


def extract_nodal_set(field: GridField) -> NodalSet:
    """Marching-squares zero contour of a sampled field.

    Every segment endpoint lies on a cell edge where the linear interpolant
    vanishes; output is sorted by cell index so it is deterministic.
    """
    v = field.values
    n = field.grid_n
    h = field.spacing
    if field.domain == TORUS:
        fA = v
        fB = np.roll(v, -1, axis=0)
        fD = np.roll(v, -1, axis=1)
        fC = np.roll(fB, -1, axis=1)
        xs = np.arange(n) * h
        ys = np.arange(n) * h
        valid = np.ones((n, n), dtype=bool)
    else:
        fA = v[:-1, :-1]
        fB = v[1:, :-1]
        fD = v[:-1, 1:]
        fC = v[1:, 1:]
        xs = field.origin[0] + np.arange(n - 1) * h
        ys = field.origin[1] + np.arange(n - 1) * h
        if field.mask is not None:
            m = field.mask
            valid = m[:-1, :-1] & m[1:, :-1] & m[:-1, 1:] & m[1:, 1:]
        else:
            valid = np.ones((n - 1, n - 1), dtype=bool)

    X = xs[:, None]
    Y = ys[None, :]
    sA = fA >= 0
    sB = fB >= 0
    sC = fC >= 0
    sD = fD >= 0
    case = (sA * 1 + sB * 2 + sC * 4 + sD * 8).astype(np.int8)

    def crossing(fa, fb):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = fa / (fa - fb)
        return t

    tB = crossing(fA, fB)
    tR = crossing(fB, fC)
    tT = crossing(fD, fC)
    tL = crossing(fA, fD)

    shape = case.shape
    ex = np.empty((4,) + shape)
    ey = np.empty((4,) + shape)
    ex[0] = X + tB * h
    ey[0] = np.broadcast_to(Y, shape)
    ex[1] = np.broadcast_to(X + h, shape)
    ey[1] = Y + tR * h
    ex[2] = X + tT * h
    ey[2] = np.broadcast_to(Y + h, shape)
    ex[3] = np.broadcast_to(X, shape)
    ey[3] = Y + tL * h

    seg_chunks = []
    key_chunks = []
    ci = np.arange(shape[0])[:, None]
    cj = np.arange(shape[1])[None, :]
    CI = np.broadcast_to(ci, shape)
    CJ = np.broadcast_to(cj, shape)

    def emit(mask, e1, e2, pair_rank):
        if not mask.any():
            return
        seg = np.stack([ex[e1][mask], ey[e1][mask],
                        ex[e2][mask], ey[e2][mask]], axis=1)
        key = np.stack([CI[mask], CJ[mask],
                        np.full(int(mask.sum()), pair_rank)], axis=1)
        seg_chunks.append(seg)
        key_chunks.append(key)

    for c, pairs in _CASE_PAIRS.items():
        mask = (case == c) & valid
        for rank, (e1, e2) in enumerate(pairs):
            emit(mask, e1, e2, rank)

    center = 0.25 * (fA + fB + fC + fD)
    for c in (5, 10):
        mask = (case == c) & valid
        if not mask.any():
            continue
        pos = mask & (center >= 0)
        neg = mask & (center < 0)
        if c == 5:
            emit(pos, 0, 1, 0)
            emit(pos, 2, 3, 1)
            emit(neg, 3, 0, 0)
            emit(neg, 1, 2, 1)
        else:
            emit(pos, 3, 0, 0)
            emit(pos, 1, 2, 1)
            emit(neg, 0, 1, 0)
            emit(neg, 2, 3, 1)

    if seg_chunks:
        segments = np.concatenate(seg_chunks, axis=0)
        keys = np.concatenate(key_chunks, axis=0)
        order = np.lexsort((keys[:, 2], keys[:, 1], keys[:, 0]))
        segments = segments[order]
    else:
        segments = np.empty((0, 4))
    return NodalSet(segments=segments, domain=field.domain,
                    origin=field.origin, side=field.side)


def nodal_length(nodal_set: NodalSet, metric: ConformalMetric | None = None):
    """(euclidean_length, metric_length); the latter integrates sqrt(q) ds."""
    euclid = nodal_set.euclidean_length
    if metric is None:
        return euclid, euclid
    return euclid, polyline_metric_length(nodal_set.segments, metric)


def singular_points(field: GridField, tol_f=1e-3, tol_g=1e-2) -> list[tuple[float, float]]:
    """Points where the field and its gradient both nearly vanish.

    Samples with |f| < tol_f * max|f| and central-difference |grad f| below
    tol_g * max|grad f| are flagged; 8-connected clusters of flags reduce to
    their centroids (periodic-aware on the torus).
    """
    if tol_f <= 0 or tol_g <= 0:
        raise ValueError("tolerances must be positive")
    v = field.values
    n = field.grid_n
    h = field.spacing
    if field.domain == TORUS:
        gx = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2 * h)
        gy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2 * h)
    else:
        gx, gy = np.gradient(v, h, edge_order=2)
    grad = np.hypot(gx, gy)
    f_scale = np.max(np.abs(v))
    g_scale = np.max(grad)
    if f_scale == 0:
        return []
    flags = (np.abs(v) < tol_f * f_scale) & (grad < tol_g * max(g_scale, 1e-300))
    if field.mask is not None:
        flags &= field.mask
    if not flags.any():
        return []
    labels, n_lab = ndimage.label(flags, structure=np.ones((3, 3), dtype=int))
    if field.domain == TORUS and n_lab > 1:
        labels = _merge_wrap_labels(labels)
    points = []
    for lab in sorted(set(labels[flags])):
        ii, jj = np.nonzero(labels == lab)
        if field.domain == TORUS:
            points.append((_circular_mean(ii, n) * h, _circular_mean(jj, n) * h))
        else:
            points.append((field.origin[0] + ii.mean() * h,
                           field.origin[1] + jj.mean() * h))
    points.sort()
    return points


def _circular_mean(idx, n):
    ref = idx[0]
    d = (idx - ref + n // 2) % n - n // 2
    return (ref + d.mean()) % n


def _merge_wrap_labels(labels):
    n = labels.shape[0]
    parent = list(range(labels.max() + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for k in range(n):
        for da, db in (((0, k), (n - 1, k)), ((k, 0), (k, n - 1))):
            la = labels[da]
            lb = labels[db]
            if la and lb:
                union(la, lb)
        # diagonal wrap adjacency
        for da, db in (((0, k), (n - 1, (k + 1) % n)),
                       ((0, (k + 1) % n), (n - 1, k)),
                       ((k, 0), ((k + 1) % n, n - 1)),
                       (((k + 1) % n, 0), (k, n - 1))):
            la = labels[da]
            lb = labels[db]
            if la and lb:
                union(la, lb)
    out = labels.copy()
    for lab in range(1, labels.max() + 1):
        out[labels == lab] = find(lab)
    return out


def circle_intersections(nodal_set: NodalSet, center, radius,
                         tol=1e-12) -> int:
    """Number of crossings of the nodal polyline with a circle.

    Transversal crossings count per intersection point; tangential grazings
    count once.  On the torus, each segment is shifted to the period image
    nearest the circle center before intersecting.
    """
    if len(nodal_set) == 0:
        return 0
    seg = nodal_set.segments
    p0 = seg[:, 0:2].copy()
    p1 = seg[:, 2:4].copy()
    if nodal_set.domain == TORUS:
        if radius >= 0.5:
            raise ValueError("torus circle radius must be below 1/2")
        mid = 0.5 * (p0 + p1)
        shift = np.round(mid - np.asarray(center))
        p0 -= shift
        p1 -= shift
    d = p1 - p0
    f = p0 - np.asarray(center, dtype=float)
    a = np.sum(d * d, axis=1)
    b = 2 * np.sum(d * f, axis=1)
    c0 = np.sum(f * f, axis=1) - radius * radius
    disc = b * b - 4 * a * c0
    scale = b * b + np.abs(4 * a * c0) + 1e-300
    count = 0
    two = disc > tol * scale
    if two.any():
        sq = np.sqrt(disc[two])
        aa = a[two]
        bb = b[two]
        for roots in ((-bb - sq) / (2 * aa), (-bb + sq) / (2 * aa)):
            count += int(np.sum((roots >= -1e-9) & (roots < 1.0 - 1e-9)))
    grazing = (np.abs(disc) <= tol * scale) & (a > 0)
    if grazing.any():
        t0 = -b[grazing] / (2 * a[grazing])
        count += int(np.sum((t0 >= -1e-9) & (t0 < 1.0 - 1e-9)))
    return count


def segments_to_csv(nodal_set: NodalSet, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("x0,y0,x1,y1\n")
        for x0, y0, x1, y1 in nodal_set.segments:
            f.write(f"{float(x0)!r},{float(y0)!r},{float(x1)!r},{float(y1)!r}\n")


def singular_points_to_csv(points, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("x,y\n")
        for x, y in points:
            f.write(f"{float(x)!r},{float(y)!r}\n")

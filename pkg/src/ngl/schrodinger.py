"""Localization of eigenfunctions to planar fields with small potential,
disk/annulus configurations, and rapid-growth classification.

Rescaling an eigenfunction by the wavelength around a point p turns the
eigenvalue equation into a flat equation lap(F) + q F = 0 on the 3-disk,
with the spectral parameter absorbed into a potential of small sup norm.
All growth bookkeeping (the doubling quantity beta and its floor beta*,
rapid disks, the square tiling) happens on that planar field.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import ConstraintError, InfiniteGrowthError, ResolutionError
from .eigen import EigenPair
from .growth import growth_exponent
from .surface import (ConformalMetric, EuclideanDisk, GridField, PLANAR,
                      sup_on_region)

PATCH_RADIUS = 3.0          # the planar field lives on |z| <= 3
CORE_RADIUS = 1.0 / 60.0    # all rapid-disk machinery happens inside here
_RESIDUAL_RADIUS = 2.9


def periodic_spline(values, pad=4):
    """C^2 periodic interpolant of torus samples (cubic spline on padded data).

    Bilinear interpolation has zero Laplacian inside cells, which would make
    residual certificates for pulled-back fields meaningless; the cubic
    spline tracks second derivatives to O(h^2).
    """
    n = values.shape[0]
    h = 1.0 / n
    idx = np.arange(-pad, n + pad + 1)
    coords = idx * h
    padded = values[np.ix_(idx % n, idx % n)]
    sp = RectBivariateSpline(coords, coords, padded, kx=3, ky=3, s=0)

    def ev(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        xb = np.broadcast_to(x, shape).ravel() % 1.0
        yb = np.broadcast_to(y, shape).ravel() % 1.0
        out = sp.ev(xb, yb)
        return out.reshape(shape) if shape else float(out[0])

    return ev


@dataclass
class PlanarField:
    """Planar solution F on the 3-disk, sup-normalized, with its potential.

    ``evaluate`` is the exact interpolant used by all quadrature; the stored
    grid exists for residual certification, contour extraction, and dumps.
    """
    field: GridField
    potential: GridField
    eps0: float
    residual: float
    evaluate: object
    potential_evaluate: object
    meta: dict = dataclass_field(default_factory=dict)

    @property
    def grid_n(self) -> int:
        return self.field.grid_n


def _planar_grid(fn, grid_n):
    coords = np.linspace(-PATCH_RADIUS, PATCH_RADIUS, grid_n)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    vals = fn(X, Y)
    mask = X * X + Y * Y <= PATCH_RADIUS ** 2
    return GridField(vals, domain=PLANAR, origin=(-PATCH_RADIUS, -PATCH_RADIUS),
                     side=2 * PATCH_RADIUS, mask=mask)


def _planar_residual(field: GridField, potential: GridField):
    v = field.values
    q = potential.values
    h = field.spacing
    lap = np.zeros_like(v)
    lap[1:-1, 1:-1] = (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2]
                       - 4 * v[1:-1, 1:-1]) / (h * h)
    coords = field.origin[0] + np.arange(field.grid_n) * h
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    inner = X * X + Y * Y <= _RESIDUAL_RADIUS ** 2
    inner[0, :] = inner[-1, :] = inner[:, 0] = inner[:, -1] = False
    defect = lap[inner] + q[inner] * v[inner]
    return float(np.linalg.norm(defect) / max(np.linalg.norm(v[inner]), 1e-300))


def localize(eigenpair: EigenPair, metric: ConformalMetric, p, k0=0.5,
             eps0=0.1, planar_grid_n=1024) -> PlanarField:
    """Rescale an eigenfunction around p to a planar field on the 3-disk.

    F(z) = phi(p + s z) with s = tau k0 / sqrt(lambda) and tau = 2 q_plus
    alpha0; the potential becomes (k0 tau)^2 q at the pulled-back point and
    must stay below eps0 (decrease k0 otherwise).  The rescaled unit must
    span at least 10 torus samples or the interpolant would be noise.
    """
    lam = eigenpair.lam
    if lam <= 0:
        raise ValueError("localization needs a nonconstant eigenfunction")
    tau = 2.0 * metric.q_plus * metric.alpha0
    scale = tau * k0 / np.sqrt(lam)
    h = metric.spacing
    if scale < 10 * h:
        need = int(np.ceil(10 * np.sqrt(lam) / (tau * k0)))
        raise ResolutionError(
            f"one rescaled unit spans {scale / h:.2f} samples (< 10); "
            f"increase grid_n to at least {need}")
    pot_sup = (k0 * tau) ** 2 * metric.q_plus
    if pot_sup >= eps0:
        raise ConstraintError(
            f"potential bound {pot_sup:.4g} is not below eps0 = {eps0:g}; "
            f"decrease k0")

    phi_ev = periodic_spline(eigenpair.field.values)
    px, py = float(p[0]), float(p[1])
    factor = (k0 * tau) ** 2

    def raw_field(x, y):
        return phi_ev(px + scale * np.asarray(x), py + scale * np.asarray(y))

    if metric.is_flat:
        q_const = factor * metric.q_plus

        def potential(x, y):
            return np.full(np.broadcast_shapes(np.asarray(x).shape,
                                               np.asarray(y).shape), q_const)
    else:
        q_ev = periodic_spline(metric.q)

        def potential(x, y):
            return factor * q_ev(px + scale * np.asarray(x),
                                 py + scale * np.asarray(y))

    sup3 = sup_on_region(raw_field, EuclideanDisk((0.0, 0.0), PATCH_RADIUS))
    if sup3 == 0.0:
        raise InfiniteGrowthError("eigenfunction vanishes on the whole patch")

    def field_fn(x, y):
        return raw_field(x, y) / sup3

    grid = _planar_grid(field_fn, planar_grid_n)
    pot_grid = _planar_grid(potential, planar_grid_n)
    residual = _planar_residual(grid, pot_grid)
    return PlanarField(
        field=grid, potential=pot_grid, eps0=eps0, residual=residual,
        evaluate=field_fn, potential_evaluate=potential,
        meta={"lambda": lam, "p": (px, py), "k0": k0, "tau": tau,
              "scale": scale, "potential_sup": pot_sup})


def planar_field_from_function(fn, potential_fn=None, planar_grid_n=512,
                               eps0=0.1, normalize=True) -> PlanarField:
    """Wrap an explicit planar function as a PlanarField (testing and demos).

    The potential defaults to zero, in which case the field should be
    harmonic for the residual to be meaningful.
    """
    sup3 = sup_on_region(fn, EuclideanDisk((0.0, 0.0), PATCH_RADIUS))
    norm = sup3 if (normalize and sup3 > 0) else 1.0

    def field_fn(x, y):
        return np.asarray(fn(x, y)) / norm

    if potential_fn is None:
        def potential_fn(x, y):  # noqa: F811 - deliberate default
            return np.zeros(np.broadcast_shapes(np.asarray(x).shape,
                                                np.asarray(y).shape))

    grid = _planar_grid(field_fn, planar_grid_n)
    pot_grid = _planar_grid(potential_fn, planar_grid_n)
    residual = _planar_residual(grid, pot_grid)
    return PlanarField(field=grid, potential=pot_grid, eps0=eps0,
                       residual=residual, evaluate=field_fn,
                       potential_evaluate=potential_fn,
                       meta={"source": "function"})


def core_field(pf: PlanarField, half_width=1.0 / 48.0, grid_n=1025) -> GridField:
    """Fine planar resampling of F around the core square, for contours.

    The main grid cannot resolve the core disk of radius 1/60, so nodal
    extraction and tiling clip against this dedicated window.
    """
    coords = np.linspace(-half_width, half_width, grid_n)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    vals = pf.evaluate(X, Y)
    return GridField(vals, domain=PLANAR, origin=(-half_width, -half_width),
                     side=2 * half_width)


# --------------------------------------------------------------------------
# growth on the planar field


def beta_star(pf: PlanarField):
    """(beta, beta*) with beta the log sup ratio between the 5/2- and
    1/4-disks and beta* its floor at 1."""
    outer = sup_on_region(pf, EuclideanDisk((0.0, 0.0), 2.5))
    inner = sup_on_region(pf, EuclideanDisk((0.0, 0.0), 0.25))
    if inner == 0.0:
        raise InfiniteGrowthError("field vanishes identically on the 1/4-disk")
    beta = float(np.log(outer / inner))
    return beta, max(beta, 1.0)


# --------------------------------------------------------------------------
# disks, annuli, rapid growth


@dataclass(frozen=True)
class DiskAnnuli:
    """Readout annuli of a disk of radius delta centred at ``center``.

    A      = ((1-2a) delta, (1-a) delta)      cutoff band
    A'     = ((1-3a) delta, (1-4a/3) delta)   inner readout
    A''    = ((1-3a/2) delta, (1-a) delta)    outer readout, inside A
    """
    center: tuple[float, float]
    delta: float
    a: float = 0.1

    def __post_init__(self):
        if not (0 < self.a < 1.0 / 3.0):
            raise ConstraintError("thickness parameter a must lie in (0, 1/3)")
        if self.delta <= 0:
            raise ConstraintError("delta must be positive")

    @property
    def band(self):
        return ((1 - 2 * self.a) * self.delta, (1 - self.a) * self.delta)

    @property
    def inner_readout(self):
        return ((1 - 3 * self.a) * self.delta,
                (1 - 4 * self.a / 3) * self.delta)

    @property
    def outer_readout(self):
        return ((1 - 1.5 * self.a) * self.delta, (1 - self.a) * self.delta)


def check_beta_related(delta, beta_star_value):
    """Radius constraints: delta < 1/60 and delta * beta* < 1/2 (both strict)."""
    if not delta < CORE_RADIUS:
        raise ConstraintError(f"delta = {delta:g} must be below 1/60")
    if not delta * beta_star_value < 0.5:
        raise ConstraintError(
            f"delta * beta* = {delta * beta_star_value:g} must be below 1/2")


def _annulus_f2_integral(pf_eval, center, r_inner, r_outer,
                         n_radial=24, n_angular=512):
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    rad = 0.5 * (r_outer - r_inner) * nodes + 0.5 * (r_outer + r_inner)
    wr = 0.5 * (r_outer - r_inner) * weights
    th = np.arange(n_angular) * (2 * np.pi / n_angular)
    px = center[0] + rad[:, None] * np.cos(th)[None, :]
    py = center[1] + rad[:, None] * np.sin(th)[None, :]
    vals = np.asarray(pf_eval(px, py))
    return float(np.sum(vals * vals * rad[:, None] * wr[:, None])
                 * (2 * np.pi / n_angular))


@dataclass
class RapidResult:
    is_rapid: bool
    int_inner_readout: float
    int_outer_readout: float


def classify_rapid(pf: PlanarField, annuli: DiskAnnuli, m_threshold) -> RapidResult:
    """A disk grows M-rapidly when the outer readout annulus carries at least
    M times the squared mass of the inner readout annulus."""
    cx, cy = annuli.center
    if np.hypot(cx, cy) + annuli.delta > PATCH_RADIUS:
        raise ConstraintError("annuli leave the field domain")
    r0, r1 = annuli.inner_readout
    int_inner = _annulus_f2_integral(pf.evaluate, annuli.center, r0, r1)
    r0, r1 = annuli.outer_readout
    int_outer = _annulus_f2_integral(pf.evaluate, annuli.center, r0, r1)
    return RapidResult(is_rapid=bool(m_threshold * int_inner <= int_outer),
                       int_inner_readout=int_inner,
                       int_outer_readout=int_outer)


def separated_probe_centers(delta):
    """Maximal separation-respecting probe family: a hexagonal lattice of
    pitch 2 gamma delta (gamma = delta^(-1/2)) inside the core disk."""
    pitch = 2.0 * np.sqrt(delta)   # 2 * gamma * delta with gamma = delta^(-1/2)
    reach = CORE_RADIUS - delta
    if reach <= 0:
        return []
    centers = []
    j = 0
    row_step = pitch * np.sqrt(3) / 2
    j_max = int(np.floor(reach / row_step)) if row_step > 0 else 0
    for j in range(-j_max, j_max + 1):
        y = j * row_step
        x_off = 0.5 * pitch if (j % 2) else 0.0
        i_max = int(np.floor((reach + abs(x_off)) / pitch)) + 1
        for i in range(-i_max, i_max + 1):
            x = x_off + i * pitch
            if np.hypot(x, y) <= reach:
                centers.append((x, y))
    centers.sort()
    return centers


@dataclass
class RapidCountReport:
    n_rapid: int
    n_probes: int
    beta: float
    beta_star: float
    ratio: float
    rows: list


def count_rapid_disks(pf: PlanarField, delta, m_threshold, a=0.1) -> RapidCountReport:
    """Count rapid disks over the maximal separated probe family in the core."""
    beta, bstar = beta_star(pf)
    check_beta_related(delta, bstar)
    centers = separated_probe_centers(delta)
    rows = []
    n_rapid = 0
    for c in centers:
        res = classify_rapid(pf, DiskAnnuli(center=c, delta=delta, a=a), m_threshold)
        rows.append({"z": c, "delta": delta,
                     "int_inner": res.int_inner_readout,
                     "int_outer": res.int_outer_readout,
                     "is_rapid": res.is_rapid})
        n_rapid += int(res.is_rapid)
    return RapidCountReport(n_rapid=n_rapid, n_probes=len(centers), beta=beta,
                            beta_star=bstar, ratio=n_rapid / bstar, rows=rows)


def rapid_rows_to_csv(report: RapidCountReport, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("z_x,z_y,delta,int_Aprime,int_Adoubleprime,is_rapid\n")
        for row in report.rows:
            f.write(f"{float(row['z'][0])!r},{float(row['z'][1])!r},"
                    f"{float(row['delta'])!r},"
                    f"{float(row['int_inner'])!r},{float(row['int_outer'])!r},"
                    f"{int(row['is_rapid'])}\n")


# --------------------------------------------------------------------------
# annulus Poincare inequality diagnostic


@dataclass
class PoincareReport:
    grad_energy: float
    l2_mass: float
    scaled_ratio: float
    degenerate: bool


def annulus_poincare_check(profile, annuli: DiskAnnuli, dprofile=None,
                           n_r=4096) -> PoincareReport:
    """For radial f vanishing on the inner band boundary, compare gradient
    energy and mass over the band; the dimensionless quantity is
    delta^2 * grad / mass, bounded below for admissible profiles."""
    r0, r1 = annuli.band
    rr = np.linspace(r0, r1, n_r)
    f = np.asarray(profile(rr), dtype=float)
    scale = np.max(np.abs(f))
    if abs(f[0]) > 1e-8 * max(scale, 1e-300):
        raise ConstraintError("profile must vanish on the inner band boundary")
    if dprofile is not None:
        df = np.asarray(dprofile(rr), dtype=float)
    else:
        df = np.gradient(f, rr)
    w = np.full(n_r, rr[1] - rr[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    grad = float(2 * np.pi * np.sum(df * df * rr * w))
    mass = float(2 * np.pi * np.sum(f * f * rr * w))
    if mass <= 1e-300 * max(grad, 1.0):
        return PoincareReport(grad, mass, float("nan"), degenerate=True)
    return PoincareReport(grad, mass, annuli.delta ** 2 * grad / mass,
                          degenerate=False)


# --------------------------------------------------------------------------
# correspondence between planar growth and surface growth


@dataclass
class GrowthChainReport:
    beta: float
    beta_star: float
    disk_ratio: float       # log sup ratio over the matched surface disks
    beta_p: float           # growth exponent on the metric disk
    radius_plus: float
    radius_minus: float
    chain_upper_holds: bool      # beta* < disk_ratio + 1 (+ tol)
    disk_ratio_below_beta_p: bool


def growth_chain_report(eigenpair: EigenPair, metric: ConformalMetric, p,
                        k0=0.5, pf: PlanarField | None = None,
                        radius_plus=None, radius_minus=None,
                        tol=1e-2) -> GrowthChainReport:
    """Compare planar growth of the localized field with surface growth at p.

    Default disk radii follow the sqrt(q) pinching convention: the outer disk
    is the exact pullback of the 5/2-disk (contained in the metric ball of
    radius k0/sqrt(lambda)); the inner one contains the alpha0-scaled metric
    ball.  The comparison is reported, never asserted: the printed chain can
    fail at strong-growth points.
    """
    if pf is None:
        pf = localize(eigenpair, metric, p, k0=k0, planar_grid_n=256)
    beta, bstar = beta_star(pf)
    lam = eigenpair.lam
    scale = pf.meta.get("scale", 2 * metric.q_plus * metric.alpha0 * k0 / np.sqrt(lam))
    if radius_plus is None:
        radius_plus = 2.5 * scale
    if radius_minus is None:
        radius_minus = metric.alpha0 * k0 / np.sqrt(lam) / np.sqrt(metric.q_minus)
    sup_plus = sup_on_region(eigenpair.field, EuclideanDisk(tuple(p), radius_plus))
    sup_minus = sup_on_region(eigenpair.field, EuclideanDisk(tuple(p), radius_minus))
    if sup_minus == 0.0:
        raise InfiniteGrowthError("field vanishes on the inner matched disk")
    disk_ratio = float(np.log(sup_plus / sup_minus))
    beta_p = growth_exponent(eigenpair.field, p, k0 / np.sqrt(lam),
                             metric.alpha0, metric=metric)
    return GrowthChainReport(
        beta=beta, beta_star=bstar, disk_ratio=disk_ratio, beta_p=beta_p,
        radius_plus=radius_plus, radius_minus=radius_minus,
        chain_upper_holds=bool(bstar < disk_ratio + 1.0 + tol),
        disk_ratio_below_beta_p=bool(disk_ratio <= beta_p + tol))

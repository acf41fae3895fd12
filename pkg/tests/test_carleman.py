import numpy as np
import pytest

from ngl.carleman import (BumpComponent, TestField, build_psi0, build_weight,
                          carleman_c1_check, check_subharmonic_inequality,
                          dbar_fd, dbar_star_fd, dee_fd, default_h_profile,
                          laplacian_fd, random_test_field)
from ngl.errors import ConstraintError


@pytest.fixture(scope="module")
def radial():
    return build_psi0(0.1)


def three_centers(radius=0.01):
    return [(radius * np.cos(t), radius * np.sin(t))
            for t in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]


# --------------------------------------------------------------- radial ODE


def test_psi0_zero_source_is_identity():
    rw = build_psi0(0.1, h_profile=lambda r: np.zeros_like(
        np.asarray(r, dtype=float)), validate=False)
    assert np.max(np.abs(rw.log_psi0)) == 0.0
    assert rw.psi0_at(1.5) == 1.0


def test_psi0_constant_source_closed_form():
    # u = c r^2/4 - (c/2) ln r - c/4 solves u'' + u'/r = c with u(1) = u'(1) = 0
    c = 2.0
    rw = build_psi0(0.1, h_profile=lambda r: c * np.ones_like(
        np.asarray(r, dtype=float)), validate=False)
    r = rw.r_grid
    exact = c * r ** 2 / 4 - (c / 2) * np.log(r) - c / 4
    assert np.max(np.abs(rw.log_psi0 - exact)) < 1e-8


def test_psi0_default_profile_properties(radial):
    assert radial.log_psi0[-1] == pytest.approx(0.0, abs=1e-8)
    assert radial.dlog_psi0[-1] == pytest.approx(0.0, abs=1e-8)
    assert radial.ode_residual < 1e-6
    lo, hi = radial.bounds
    assert 0 < lo <= hi
    assert radial.psi0_at(1.2) == 1.0
    # source bounded below on the cutoff band, zero beyond 1 - a/2
    band = np.linspace(0.8 + 1e-6, 0.9 - 1e-6, 50)
    assert np.all(radial.delta_log_psi0_at(band) >= 1.0 - 1e-12)
    assert np.all(radial.delta_log_psi0_at(np.linspace(0.96, 1.3, 20)) == 0.0)


def test_psi0_residual_on_refined_grid():
    coarse = build_psi0(0.1, n_steps=2000)
    fine = build_psi0(0.1, n_steps=20000)
    # the two solves agree and the fine residual recheck is 100x tighter
    interp = np.interp(coarse.r_grid, fine.r_grid, fine.log_psi0)
    assert np.max(np.abs(interp - coarse.log_psi0)) < 1e-10
    assert fine.ode_residual < coarse.ode_residual


def test_psi0_validation():
    with pytest.raises(ConstraintError):
        build_psi0(0.1, h_profile=lambda r: np.ones_like(np.asarray(r, dtype=float)))
    with pytest.raises(ConstraintError):
        build_psi0(0.4)


def test_default_h_profile_shape():
    h = default_h_profile(0.1)
    assert float(h(0.85)) == 1.0
    assert float(h(0.97)) == 0.0
    mid = float(h(0.925))
    assert 0.0 < mid < 1.0


# --------------------------------------------------------------- weights


def test_weight_without_centers_is_pure_exponential(radial):
    w = build_weight((), 0.0, t=3.0, radial=radial)
    pts = np.array([[0.3, -0.2], [1.0, 2.0]])
    vals = w.phi(pts[:, 0], pts[:, 1])
    expect = np.exp(3.0 * (pts[:, 0] ** 2 + pts[:, 1] ** 2))
    np.testing.assert_allclose(vals, expect, rtol=1e-14)
    assert np.all(w.delta_log_phi(pts[:, 0], pts[:, 1]) == 12.0)


def test_weight_identity_outside_disks(radial):
    w = build_weight([(0.0, 0.0)], 1e-3, t=1.0, radial=radial)
    assert float(w.log_phi0(0.5, 0.5)) == 0.0
    assert float(w.delta_log_phi0(0.5, 0.5)) == 0.0
    # inside the band the source term appears, scaled by delta^-2
    r_mid = 0.85 * 1e-3
    assert float(w.delta_log_phi0(r_mid, 0.0)) == pytest.approx(1e6, rel=1e-6)


def test_weight_center_separation_enforced(radial):
    with pytest.raises(ConstraintError):
        build_weight([(0.0, 0.0), (1e-3, 0.0)], 1e-3, t=1.0, radial=radial)
    with pytest.raises(ConstraintError):
        build_weight((), 0.0, t=0.0, radial=radial)


def test_weight_fd_laplacian_matches_source(radial):
    # discrete Laplacian of log Phi_0 reproduces h(rho/delta)/delta^2 to 5%
    delta = 0.01
    w = build_weight([(0.0, 0.0)], delta, t=1.0, radial=radial)
    step = 0.1 / 50 * delta
    r0 = 0.85 * delta
    xs = np.array([r0, r0 + step, r0 - step, r0, r0])
    ys = np.array([0.0, 0.0, 0.0, step, -step])
    vals = w.log_phi0(xs, ys)
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4 * vals[0]) / step ** 2
    assert lap == pytest.approx(1.0 / delta ** 2, rel=0.05)


# --------------------------------------------------------------- test fields


def test_bump_derivatives_match_finite_differences():
    rng = np.random.Generator(np.random.Philox(key=42))
    u = random_test_field(rng)
    comp = u.components[0]
    x0 = comp.center[0] + 0.31 * comp.profile.support
    y0 = comp.center[1] - 0.17 * comp.profile.support
    h = 1e-6
    val = lambda x, y: np.asarray(u.value(x, y))
    fd_x = (val(x0 + h, y0) - val(x0 - h, y0)) / (2 * h)
    fd_y = (val(x0, y0 + h) - val(x0, y0 - h)) / (2 * h)
    db = complex(np.asarray(u.dbar(x0, y0)))
    assert abs(db - 0.5 * (fd_x + 1j * fd_y)) < 1e-7 * max(abs(db), 1.0)
    lap_fd = (val(x0 + h, y0) + val(x0 - h, y0) + val(x0, y0 + h)
              + val(x0, y0 - h) - 4 * val(x0, y0)) / h ** 2
    lap = complex(np.asarray(u.laplacian(x0, y0)))
    assert abs(lap - lap_fd) < 1e-4 * max(abs(lap), 1.0)
    g2 = float(np.asarray(u.grad_sq(x0, y0)).real)
    assert g2 == pytest.approx(abs(fd_x) ** 2 + abs(fd_y) ** 2, rel=1e-6)


def test_bump_support_is_exact():
    b = BumpComponent((0.5, -0.25), sigma=0.2, support=0.4)
    th = np.linspace(0, 2 * np.pi, 64)
    vals = np.asarray(b.value(0.5 + 0.4001 * np.cos(th),
                              -0.25 + 0.4001 * np.sin(th)))
    assert np.all(vals == 0.0)
    assert float(b.value(0.5, -0.25)) > 0.0


def test_ring_bump_vanishes_on_shrunk_disk(radial):
    w = build_weight(three_centers(), 1e-3, t=1.0, radial=radial)
    rng = np.random.Generator(np.random.Philox(key=7))
    for _ in range(20):
        u = random_test_field(rng, weight=w)
        r = (1 - 2 * w.a) * w.delta
        th = np.linspace(0, 2 * np.pi, 128)
        for cx, cy in w.centers:
            vals = np.asarray(u.value(cx + 0.999 * r * np.cos(th),
                                      cy + 0.999 * r * np.sin(th)))
            assert np.max(np.abs(vals)) == 0.0


# --------------------------------------------------------------- inequalities


@pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
def test_subharmonic_inequality_no_centers(t, radial):
    w = build_weight((), 0.0, t=t, radial=radial)
    for k in range(7):
        rng = np.random.Generator(np.random.Philox(key=(17, k)))
        u = random_test_field(rng)
        rep = check_subharmonic_inequality(u, w)
        assert rep.margin >= -1e-6 * rep.scale


def test_subharmonic_inequality_with_centers(radial):
    w = build_weight(three_centers(), 1e-3, t=5.0, radial=radial)
    for k in range(7):
        rng = np.random.Generator(np.random.Philox(key=(18, k)))
        u = random_test_field(rng, weight=w)
        rep = check_subharmonic_inequality(u, w)
        assert rep.margin >= -1e-6 * rep.scale


def test_subharmonic_zero_field_degenerate(radial):
    w = build_weight((), 0.0, t=1.0, radial=radial)
    u = TestField([BumpComponent((0.0, 0.0), sigma=0.2, support=0.4,
                                 amplitude=0.0)])
    rep = check_subharmonic_inequality(u, w)
    assert rep.lhs == rep.rhs == 0.0
    assert rep.margin == 0.0


def test_subharmonic_near_sharp_gaussian(radial):
    # width^2 = 1/(2t) makes the untruncated gaussian an equality case;
    # the cutoff restores a small positive margin
    t = 5.0
    w = build_weight((), 0.0, t=t, radial=radial)
    sig = 1.0 / np.sqrt(2 * t)
    u = TestField([BumpComponent((0.1, -0.2), sigma=sig, support=6 * sig)])
    rep = check_subharmonic_inequality(u, w)
    assert rep.margin >= -1e-6 * rep.scale
    assert rep.margin < 0.2 * rep.scale


def test_subharmonic_violating_field_rejected(radial):
    w = build_weight(three_centers(), 1e-3, t=1.0, radial=radial)
    u = TestField([BumpComponent((0.01, 0.0), sigma=0.05, support=0.1)])
    with pytest.raises(ConstraintError):
        check_subharmonic_inequality(u, w)


def test_holomorphic_times_wide_bump_small_dbar(radial):
    w = build_weight((), 0.0, t=1e-5, radial=radial)
    u = TestField([BumpComponent((0.0, 0.0), sigma=80.0, support=400.0,
                                 poly=[0.5, 0.1, -0.2, 1.0])])
    rep = check_subharmonic_inequality(u, w)
    u_mass = rep.scale - rep.lhs - abs(rep.rhs)
    assert rep.lhs <= 1e-3 * u_mass
    assert abs(rep.rhs) <= 1e-3 * u_mass


def test_c1_t_scaling_no_centers(radial):
    rng = np.random.Generator(np.random.Philox(key=77))
    u = random_test_field(rng, real_only=True, n_bumps=1)
    ratios = []
    for t in (1.0, 10.0):
        w = build_weight((), 0.0, t=t, radial=radial)
        rep = carleman_c1_check(u, w)
        ratios.append(rep.lhs / rep.t2_term)
    assert ratios[1] <= ratios[0] * (1 + 1e-9)


def test_c1_with_centers_positive_and_stable(radial):
    from ngl.carleman import c1_test_family
    w = build_weight(three_centers(), 1e-3, t=1.0, radial=radial)
    rng = np.random.Generator(np.random.Philox(key=99))
    constants = []
    for f in c1_test_family(rng, w, 30):
        rep = carleman_c1_check(f, w)
        assert not rep.degenerate
        assert rep.lhs > 0 and rep.t2_term > 0
        assert rep.grad_term >= 0
        constants.append(rep.empirical_constant)
    c15 = min(constants[:15])
    c30 = min(constants)
    assert c30 > 0
    assert abs(c30 - c15) / c15 < 0.2
    # the ring strata actually exercise the annulus gradient term
    assert any(carleman_c1_check(f, w).grad_term > 0
               for f in c1_test_family(rng, w, 3))


def test_c1_zero_field_degenerate(radial):
    w = build_weight((), 0.0, t=1.0, radial=radial)
    f = TestField([BumpComponent((0.0, 0.0), sigma=0.2, support=0.4,
                                 amplitude=0.0)])
    rep = carleman_c1_check(f, w)
    assert rep.degenerate


def test_c1_requires_t_at_least_one(radial):
    w = build_weight((), 0.0, t=0.5, radial=radial)
    rng = np.random.Generator(np.random.Philox(key=5))
    f = random_test_field(rng, real_only=True)
    with pytest.raises(ConstraintError):
        carleman_c1_check(f, w)


# --------------------------------------------------------------- fd identities


def _grid(n, L=8.0):
    h = L / n
    c = np.arange(n) * h - L / 2
    X, Y = np.meshgrid(c, c, indexing="ij")
    return h, X, Y, np.exp(-(X ** 2 + Y ** 2))


def test_identity_dbar_dee_quarter_laplacian():
    errs = []
    for n in (128, 256):
        h, X, Y, b = _grid(n)
        psi = b * np.sin(X + 0.3 * Y)
        err = np.max(np.abs(dbar_fd(dee_fd(psi, h), h) - 0.25 * laplacian_fd(psi, h)))
        errs.append(err)
        assert err < 3.0 * h ** 2
    assert errs[1] < errs[0] / 3.0  # second order


def test_identity_holomorphic_kernel():
    for n in (128, 256):
        h, X, Y, _ = _grid(n)
        z = X + 1j * Y
        val = np.abs(dbar_fd(z ** 3 - 2 * z + 1.5, h))[10:-10, 10:-10]
        assert val.max() <= 1.01 * h ** 2  # exact to truncation order


def test_identity_adjointness():
    h, X, Y, b = _grid(256)
    phi = 0.3 * (X ** 2 + Y ** 2)
    u = b * np.exp(1j * X) * np.sin(Y)
    v = b * np.cos(2 * X + Y)
    w = np.exp(-phi)
    ip1 = np.sum(dbar_fd(u, h) * np.conj(v) * w) * h * h
    ip2 = np.sum(u * np.conj(dbar_star_fd(v, h, phi)) * w) * h * h
    assert abs(ip1 - ip2) <= 1e-12 * abs(ip1)


def test_identity_commutator():
    errs = []
    for n in (256, 512):
        h, X, Y, b = _grid(n)
        phi = 0.3 * (X ** 2 + Y ** 2) + 0.1 * X
        u = b * np.sin(X) * np.cos(Y)
        comm = (dbar_fd(dbar_star_fd(u, h, phi), h)
                - dbar_star_fd(dbar_fd(u, h), h, phi))
        target = 0.25 * laplacian_fd(phi, h) * u
        err = np.max(np.abs(comm - target))
        errs.append(err)
        assert err < h  # first order suffices
    assert errs[1] < errs[0]

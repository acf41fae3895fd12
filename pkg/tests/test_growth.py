import numpy as np
import pytest

from ngl.errors import InfiniteGrowthError, ResolutionError
from ngl.eigen import analytic_eigenpair, analytic_spectrum
from ngl.growth import (average_local_growth, donnelly_fefferman_constant,
                        growth_exponent, growth_field, lq_growth_exponent,
                        quartile_trend_ratio, verify_length_growth_bound)
from ngl.surface import make_metric

from conftest import torus_field


def radial_power(n):
    return lambda x, y: np.hypot(np.asarray(x, dtype=float),
                                 np.asarray(y, dtype=float)) ** n


# --------------------------------------------------------------- closed forms


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_monomial_doubling_exponent(n):
    beta = growth_exponent(radial_power(n), (0.0, 0.0), 1.0, 0.5)
    assert beta == pytest.approx(n * np.log(2.0), abs=1e-6)


@pytest.mark.parametrize("n,alpha", [(1, 0.2), (3, 0.1), (10, 0.5)])
def test_monomial_alpha_exponent(n, alpha):
    beta = growth_exponent(radial_power(n), (0.0, 0.0), 1.0, alpha)
    assert beta == pytest.approx(n * np.log(1.0 / alpha), abs=1e-6)


def test_constant_field_zero_growth():
    const = lambda x, y: np.ones(np.broadcast_shapes(np.asarray(x).shape,
                                                     np.asarray(y).shape))
    assert growth_exponent(const, (0.0, 0.0), 1.0, 0.3) == 0.0


def test_growth_scale_invariance():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x) + 0.3, 128)
    g = torus_field(lambda x, y: -7.25 * (np.sin(2 * np.pi * x) + 0.3), 128)
    b1 = growth_exponent(f, (0.3, 0.4), 0.08, 0.25)
    b2 = growth_exponent(g, (0.3, 0.4), 0.08, 0.25)
    assert b1 == pytest.approx(b2, abs=1e-12)


def test_growth_monotone_in_alpha():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x), 256)
    alphas = [0.1, 0.2, 0.4, 0.6, 0.8]
    betas = [growth_exponent(f, (0.0, 0.5), 0.1, a) for a in alphas]
    for b1, b2 in zip(betas, betas[1:]):
        assert b2 <= b1 + 1e-12


def test_growth_sin_against_dense_oracle():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x), 1024)
    beta = growth_exponent(f, (0.25, 0.5), 0.05, 0.2)
    # dense brute-force sampling of the interpolant at 10x resolution
    def dense_sup(r):
        best = 0.0
        for rad in np.linspace(0, r, 512)[1:]:
            th = np.linspace(0, 2 * np.pi, 4096)
            best = max(best, float(np.max(np.abs(
                f.interp(0.25 + rad * np.cos(th), 0.5 + rad * np.sin(th))))))
        return best
    oracle = np.log(dense_sup(0.05) / dense_sup(0.01))
    assert beta == pytest.approx(oracle, abs=1e-3)


def test_infinite_growth_error():
    def spike(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.where(np.hypot(x, y) > 0.5, 1.0, 0.0)
    with pytest.raises(InfiniteGrowthError):
        growth_exponent(spike, (0.0, 0.0), 1.0, 0.2)


def test_growth_preconditions():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x), 64)
    with pytest.raises(ValueError):
        growth_exponent(f, (0.0, 0.5), 0.1, 1.5)
    with pytest.raises(ValueError):
        growth_exponent(f, (0.0, 0.5), -0.1, 0.5)


# --------------------------------------------------------------- L^q variants


def test_lq_constant_field_area_scaling():
    const = lambda x, y: np.ones(np.broadcast_shapes(np.asarray(x).shape,
                                                     np.asarray(y).shape))
    beta = lq_growth_exponent(const, (0.0, 0.0), 1.0, 0.25, 2)
    assert beta == pytest.approx(np.log(1.0 / 0.25), abs=1e-10)


def test_lq_infinite_exponent_dispatch():
    f = torus_field(lambda x, y: np.sin(2 * np.pi * x) + 0.4, 128)
    b_inf = lq_growth_exponent(f, (0.3, 0.4), 0.08, 0.25, np.inf)
    b_sup = growth_exponent(f, (0.3, 0.4), 0.08, 0.25)
    assert b_inf == b_sup


@pytest.mark.parametrize("n", [1, 4])
def test_lq_monomial_radial_integral(n):
    beta = lq_growth_exponent(radial_power(n), (0.0, 0.0), 1.0, 0.25, 2)
    assert beta == pytest.approx((n + 1) * np.log(4.0), abs=1e-8)


# --------------------------------------------------------------- growth field


def test_growth_field_rejects_constant(flat_metric_256):
    pair = analytic_eigenpair(0, 0, grid_n=256)
    with pytest.raises(ValueError):
        growth_field(pair, flat_metric_256, k0=0.5)


def test_growth_field_resolution_guard():
    metric = make_metric("flat", 128)
    pair = analytic_eigenpair(4, 4, grid_n=128)
    with pytest.raises(ResolutionError, match="increase grid_n"):
        growth_field(pair, metric, k0=0.5)


def test_growth_field_y_invariance():
    metric = make_metric("flat", 512)
    pair = analytic_eigenpair(1, 0, phase=-np.pi / 2, grid_n=512)
    samples = growth_field(pair, metric, k0=0.5, sample_grid_m=16)
    by_x = {}
    for s in samples:
        by_x.setdefault(round(s.p[0], 12), []).append(s.beta)
    for betas in by_x.values():
        assert max(betas) - min(betas) < 1e-6


def test_growth_field_1d_reduction_oracle():
    metric = make_metric("flat", 512)
    pair = analytic_eigenpair(1, 0, phase=-np.pi / 2, grid_n=512)
    samples = growth_field(pair, metric, k0=1.0, sample_grid_m=16)
    got = [s for s in samples if s.p == (0.0, 0.5)][0]
    r = 1.0 / (2 * np.pi)
    oracle = np.log(np.sin(2 * np.pi * r) / np.sin(2 * np.pi * 0.2 * r))
    assert got.beta == pytest.approx(oracle, abs=2e-3)
    assert got.outer_radius == pytest.approx(r, abs=1e-12)
    assert got.alpha == 0.2


def test_growth_field_curved_metric_smoke():
    metric = make_metric("wave", 320)
    pair_flat = analytic_eigenpair(1, 0, phase=-np.pi / 2, grid_n=320)
    samples = growth_field(pair_flat, metric, k0=0.5, sample_grid_m=4)
    assert len(samples) == 16
    assert all(np.isfinite(s.beta) and s.beta >= 0 for s in samples)


# --------------------------------------------------------------- averaging


def test_average_constant_samples(flat_metric_256):
    from ngl.growth import GrowthSample
    samples = [GrowthSample((i / 4, j / 4), 0.7, 0.1, 0.2)
               for i in range(4) for j in range(4)]
    assert average_local_growth(samples, flat_metric_256) == pytest.approx(0.7)


def test_average_weights_normalize_on_wave(wave_metric_256):
    from ngl.growth import GrowthSample
    samples = [GrowthSample((i / 8, j / 8), 1.0, 0.1, 0.2)
               for i in range(8) for j in range(8)]
    assert average_local_growth(samples, wave_metric_256) == pytest.approx(1.0, abs=1e-14)


def test_average_needs_enough_samples(flat_metric_256):
    from ngl.growth import GrowthSample
    with pytest.raises(ValueError):
        average_local_growth([GrowthSample((0, 0), 1.0, 0.1, 0.2)],
                             flat_metric_256)


def test_average_quadrature_stable_under_doubling():
    # the default 64 x 64 center grid is within 1% of its doubling
    metric = make_metric("flat", 512)
    pair = analytic_eigenpair(1, 1, grid_n=512)
    a64 = average_local_growth(growth_field(pair, metric, 0.5, 64), metric)
    a128 = average_local_growth(growth_field(pair, metric, 0.5, 128), metric)
    assert abs(a128 - a64) / a64 < 0.01


# --------------------------------------------------------------- family table


def test_length_growth_report_flat_family():
    metric = make_metric("flat", 512)
    spectrum = analytic_spectrum(512, 12)
    report = verify_length_growth_bound(metric, spectrum, k0=0.5,
                                        sample_grid_m=32)
    assert len(report.rows) == 12
    for row in report.rows:
        assert row.lower_ratio > 0 and np.isfinite(row.lower_ratio)
        assert row.upper_ratio > 0 and np.isfinite(row.upper_ratio)
        # pure plane waves: H^1 = 2 sqrt(m^2+n^2), so H^1/sqrt(lam) = 1/pi
        assert row.h1_metric / np.sqrt(row.lam) == pytest.approx(1 / np.pi,
                                                                 rel=0.01)
    summary = report.summary()
    assert summary["lower_spread"] < 100
    assert summary["upper_spread"] < 100
    assert quartile_trend_ratio(report) < 2.0
    assert donnelly_fefferman_constant(report) < 1.0


def test_report_csv_header(tmp_path):
    from ngl.growth import report_to_csv
    metric = make_metric("flat", 320)
    spectrum = analytic_spectrum(320, 4)
    report = verify_length_growth_bound(metric, spectrum, k0=0.5,
                                        sample_grid_m=16)
    path = tmp_path / "table.csv"
    report_to_csv(report, path)
    header = path.read_text().splitlines()[0]
    assert header == "lambda,A,H1_metric,lower_ratio,upper_ratio"


def test_summarize_growth_with_lq_map():
    from ngl.growth import summarize_growth
    metric = make_metric("flat", 512)
    pair = analytic_eigenpair(1, 0, phase=-np.pi / 2, grid_n=512)
    summary = summarize_growth(pair, metric, k0=0.5, sample_grid_m=16,
                               lq_exponents=(2, np.inf), lq_grid_m=4)
    assert summary.lam == pair.lam
    assert summary.sample_count == 256
    assert summary.average > 0
    assert summary.beta_max >= summary.average
    # the L^2 average includes the area factor, it dominates the sup version
    assert summary.lq_averages[2] > 0
    assert np.isfinite(summary.lq_averages[np.inf])

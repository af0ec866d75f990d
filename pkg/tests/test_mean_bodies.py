from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from chordscope import convex_bodies as cb
from chordscope import scalar_fields as sf
from chordscope.mean_bodies import (
    SampledStarBody,
    UnboundedBody,
    ZetaProfile,
    default_grid,
    dual_mixed_volume,
    equality_gap,
    frac_polar_projection_body,
    infinity_limit,
    l_alpha_body,
    log_zero_reference,
    minus_one_limit,
    polar_projection_body,
    r_alpha_field,
    r_alpha_set,
    r_infty_field,
    r_zero,
    zeta,
)
from chordscope.quadrature import make_grid
from chordscope.special_functions import DomainError

UNIT = cb.interval(0.0, 1.0)
LINE = make_grid(1)
TRIANGLE = cb.polytope([[0, 0], [1, 0], [0.2, 0.9]])
HEXAGON = cb.polytope([[1.2, 0.1], [0.5, 1.0], [-0.6, 0.9], [-1.1, -0.2], [-0.3, -1.0], [0.8, -0.7]])


@pytest.mark.parametrize("alpha", [-0.9, -0.5, 0.5, 1.0, 3.0, 50.0, 1e4])
def test_unit_interval_closed_form(alpha):
    rho = r_alpha_set(UNIT, alpha, LINE).rho
    assert np.allclose(rho, (alpha + 1.0) ** (-1.0 / alpha), rtol=1e-12)
    rho_f = r_alpha_field(sf.characteristic(UNIT), alpha, LINE).rho
    assert np.allclose(rho_f, rho, rtol=1e-12)


def test_unit_interval_r_zero():
    assert np.allclose(r_zero(UNIT, LINE).rho, math.exp(-1.0), rtol=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 1.0, 2.0])
def test_r_alpha_set_against_monte_carlo_definition(alpha):
    # rho^alpha(u) is the mean over x in K of rho_{K - x}(u)^alpha
    rng = np.random.default_rng(5)
    x = TRIANGLE.sample_uniform(rng, 60_000)
    grid = make_grid(2, 6)
    body = r_alpha_set(TRIANGLE, alpha, grid)
    a, b = TRIANGLE.normals, TRIANGLE.offsets
    for u, rho in zip(grid.points, body.rho):
        au = a @ u
        exits = np.where(au > 1e-15, (b[None, :] - x @ a.T) / np.where(au > 1e-15, au, 1.0), np.inf)
        vals = exits.min(axis=1) ** alpha
        mean, err = vals.mean(), vals.std() / math.sqrt(len(vals))
        assert abs(rho**alpha - mean) <= 4.0 * err


@pytest.mark.parametrize("alpha", [-0.5, 0.7, 2.0])
def test_r_alpha_exp_field_line_against_quad(alpha):
    f = sf.exp_gauge(1.0, cb.interval(-1.0, 2.0))

    def g(t):  # min-correlation of e^{-||x||} on the line, shift t > 0
        fx = lambda x: math.exp(-(-x if x < 0 else x / 2.0))
        return integrate.quad(lambda x: min(fx(x), fx(x + t)), -80, 160, points=[-t, 0.0], limit=400)[0]

    norm1 = 3.0
    if alpha > 0:
        inner = integrate.quad(lambda t: t ** (alpha - 1) * g(t), 0, 200, limit=400)[0]
        ref = (alpha / norm1 * inner) ** (1 / alpha)
    else:
        inner = integrate.quad(lambda t: t ** (alpha - 1) * (norm1 - g(t)), 0, 200, limit=400)[0]
        inner += norm1 * 200.0**alpha / (-alpha)
        ref = (-alpha / norm1 * inner) ** (1 / alpha)
    got = r_alpha_field(f, alpha, LINE).rho
    assert got[1] == pytest.approx(ref, rel=1e-7)
    assert got[0] == pytest.approx(ref, rel=1e-7)  # covariograms are even


def test_r_alpha_increasing_in_alpha():
    grid = default_grid(TRIANGLE, 64)
    rhos = [r_alpha_set(TRIANGLE, a, grid).rho for a in (-0.7, -0.2, 0.4, 1.0, 4.0)]
    rhos.insert(2, r_zero(TRIANGLE, grid).rho)
    for a, b in zip(rhos, rhos[1:]):
        assert np.all(b >= a - 1e-13)


def test_r_zero_is_the_limit_at_zero():
    grid = default_grid(HEXAGON, 32)
    r0 = r_zero(HEXAGON, grid).rho
    for eps in (1e-5, -1e-5):
        assert np.allclose(r_alpha_set(HEXAGON, eps, grid).rho, r0, rtol=1e-4)


@pytest.mark.parametrize("field", [sf.exp_gauge(1.0, cb.interval(-1.0, 2.0)), sf.cone_power(1.0, TRIANGLE, s=0.5)],
                         ids=["exp-line", "cone"])
def test_r_zero_against_reference_formula(field):
    grid = make_grid(field.dimension, 4)
    logs = np.log(r_zero(field, grid).rho)
    for u, val in zip(grid.points[:2], logs[:2]):
        assert val == pytest.approx(log_zero_reference(field, u), abs=1e-9)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_l_alpha_of_indicator_is_a_dilate_of_r_alpha(alpha):
    grid = default_grid(HEXAGON, 48)
    L = l_alpha_body(sf.characteristic(HEXAGON), alpha, grid).rho
    R = r_alpha_set(HEXAGON, alpha, grid).rho
    assert np.allclose(L / R, (HEXAGON.volume() / alpha) ** (1 / alpha), rtol=1e-12)


@pytest.mark.parametrize("alpha", [-0.8, -0.3])
def test_fractional_polar_projection_of_indicator(alpha):
    grid = default_grid(TRIANGLE, 48)
    P = frac_polar_projection_body(TRIANGLE, alpha, grid).rho
    R = r_alpha_set(TRIANGLE, alpha, grid).rho
    assert np.allclose((P / R) ** alpha, 2.0 * TRIANGLE.volume() / -alpha, rtol=1e-11)


def test_fractional_polar_projection_direct_route():
    f = sf.cone_power(1.0, TRIANGLE, s=1.0)
    grid = make_grid(2, 4)
    a = frac_polar_projection_body(f, -0.5, grid).rho
    b = frac_polar_projection_body(f, -0.5, grid, method="direct").rho
    assert np.allclose(a, b, rtol=1e-9)


def test_polar_projection_body_closed_forms():
    assert np.allclose(polar_projection_body(UNIT, LINE).rho, 1.0)
    disk = cb.ball([0, 0], 1.0)
    assert np.allclose(polar_projection_body(disk, default_grid(disk, 16)).rho, 0.5)
    grid = default_grid(TRIANGLE, 16)
    width = np.array([TRIANGLE.projection_volume(u) for u in grid.points])
    assert np.allclose(polar_projection_body(TRIANGLE, grid).rho, 1.0 / width)


def test_polar_projection_body_of_exp_field_by_finite_differences():
    # gauge = (1/2) int |grad f . u|; check against a finite-difference quadrature on the line
    f = sf.exp_gauge(1.0, cb.interval(-1.0, 2.0), x0=[0.3])
    xs = np.linspace(-60, 120, 400_001)
    vals = f.evaluate(xs[:, None])
    gauge_fd = 0.5 * np.abs(np.diff(vals)).sum()
    assert 1.0 / polar_projection_body(f, LINE).rho[0] == pytest.approx(gauge_fd, rel=1e-8)


def _is_convex_polygon(points: np.ndarray, tol: float) -> bool:
    order = np.argsort(np.arctan2(points[:, 1], points[:, 0]))
    p = points[order]
    e = np.roll(p, -1, axis=0) - p
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool(np.all(cross >= -tol))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_l_alpha_of_log_concave_field_is_convex(alpha):
    grid = make_grid(2, 256)
    for f in (sf.exp_gauge(1.0, HEXAGON), sf.cone_power(1.0, TRIANGLE, s=2.0)):
        body = l_alpha_body(f, alpha, grid)
        pts = body.rho[:, None] * grid.points
        assert _is_convex_polygon(pts, 1e-12 * float(body.rho.max()) ** 2)


def test_convexity_test_detects_a_star_shape():
    grid = make_grid(2, 256)
    theta = np.arctan2(grid.points[:, 1], grid.points[:, 0])
    star = (1.0 + 0.3 * np.cos(5 * theta))[:, None] * grid.points
    assert not _is_convex_polygon(star, 1e-12)


def test_dual_mixed_volume_properties():
    grid = default_grid(HEXAGON, 64)
    K = SampledStarBody(grid, HEXAGON.radial_many(np.zeros(2), grid.points))
    L = r_alpha_set(HEXAGON, 1.0, grid)
    assert dual_mixed_volume(K, L, 0.0) == pytest.approx(K.volume())
    assert dual_mixed_volume(K, L, 2.0) == pytest.approx(L.volume())
    for a in (0.5, 1.0, 1.5):
        assert dual_mixed_volume(K, L, a) <= K.volume() ** ((2 - a) / 2) * L.volume() ** (a / 2)
    # equality for dilates
    assert dual_mixed_volume(K, K.scaled(2.0), 1.0) == pytest.approx(K.volume() ** 0.5 * K.scaled(2.0).volume() ** 0.5)
    with pytest.raises(DomainError):
        dual_mixed_volume(K, SampledStarBody(make_grid(2, 8), np.ones(8)), 1.0)


def test_r_infinity():
    assert isinstance(r_infty_field(sf.exp_gauge(1.0, TRIANGLE)), UnboundedBody)
    D = r_infty_field(sf.cone_power(1.0, TRIANGLE, s=1.0))
    assert D.volume() == pytest.approx(6.0 * TRIANGLE.volume())


def test_endpoint_extrapolation_on_the_unit_interval():
    low = minus_one_limit(UNIT, LINE)
    assert np.allclose(low, 1.0, rtol=1e-3)  # gauge of Pi* chi_[0,1]
    high = infinity_limit(UNIT, LINE)
    assert np.allclose(high, 1.0, rtol=1e-3)  # D[0,1] = [-1, 1]


def test_sampled_body_validation_and_csv():
    grid = make_grid(2, 4)
    body = SampledStarBody(grid, [1.0, 2.0, 1.0, 2.0], "x")
    lines = body.to_csv().splitlines()
    assert lines[0] == "u1,u2,rho,weight"
    assert len(lines) == 5
    assert float(lines[2].split(",")[2]) == 2.0
    with pytest.raises(DomainError):
        SampledStarBody(grid, [1.0, -1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        SampledStarBody(grid, [1.0, 1.0])


def test_grid_dimension_checked():
    with pytest.raises(DomainError):
        r_alpha_field(sf.characteristic(TRIANGLE), 1.0, LINE)


def test_zeta_validation():
    omega = lambda t: np.exp(-np.asarray(t, dtype=float))
    with pytest.raises(DomainError):
        zeta(ZetaProfile(omega, lambda t: np.sqrt(np.asarray(t, dtype=float))), 1.0)  # phi(t)/t decreasing
    with pytest.raises(DomainError):
        zeta(ZetaProfile(lambda t: 1.0 + np.asarray(t, dtype=float), lambda t: np.asarray(t)), 1.0)
    with pytest.raises(DomainError):
        zeta(ZetaProfile(omega, lambda t: np.asarray(t)), -1.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 2.0])
def test_zeta_against_quadpack(alpha):
    # omega = e^{-t}, phi(t) = t + t^2: each branch against a direct scipy quadrature
    omega = lambda t: np.exp(-np.asarray(t, dtype=float))
    prof = ZetaProfile(omega, lambda t: np.asarray(t, dtype=float) + np.asarray(t, dtype=float) ** 2)
    z = zeta(prof, alpha)
    if alpha > 0:
        num = integrate.quad(lambda t: t ** (alpha - 1) * math.exp(-(t + t * t)), 0, math.inf)[0]
        den = math.gamma(alpha)
        assert z == pytest.approx((num / den) ** (1 / alpha), rel=1e-10)
    elif alpha == 0:
        ref = integrate.quad(lambda t: (math.exp(-(t + t * t)) - math.exp(-t)) / t, 0, math.inf)[0]
        assert z == pytest.approx(math.exp(ref), rel=1e-10)
    else:
        num = integrate.quad(lambda t: t ** (alpha - 1) * (1 - math.exp(-(t + t * t))), 0, math.inf, limit=200)[0]
        den = -math.gamma(alpha)
        assert z == pytest.approx((num / den) ** (1 / alpha), rel=1e-8)


def test_equality_gap_zero_for_identical_bodies():
    grid = make_grid(2, 8)
    body = SampledStarBody(grid, np.linspace(1, 2, 8))
    assert equality_gap(body, body, grid) == 0.0

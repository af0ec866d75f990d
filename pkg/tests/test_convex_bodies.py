from __future__ import annotations

import math

import numpy as np
import pytest
import shapely.affinity
import shapely.geometry
from hypothesis import given, settings
from hypothesis import strategies as st

from chordscope import convex_bodies as cb
from chordscope.special_functions import DomainError, unit_ball_volume

TRIANGLE = cb.polytope([[0, 0], [1, 0], [0, 1]])
HEXAGON = cb.polytope([[1.2, 0.1], [0.5, 1.0], [-0.6, 0.9], [-1.1, -0.2], [-0.3, -1.0], [0.8, -0.7]])
CUBE = cb.cube(3)
TETRA = cb.simplex(3, centred=True)


def test_volumes():
    assert cb.ball([0, 0, 0], 2.0).volume() == pytest.approx(unit_ball_volume(3) * 8)
    assert cb.ellipsoid([1, 1], np.diag([2.0, 0.5])).volume() == pytest.approx(math.pi)
    assert CUBE.volume() == pytest.approx(1.0)
    assert cb.simplex(3).volume() == pytest.approx(1.0 / 6.0)
    assert cb.interval(-1.0, 2.5).volume() == pytest.approx(3.5)
    assert cb.regular_polygon(6).volume() == pytest.approx(1.5 * math.sqrt(3.0))


def test_degenerate_polytope_rejected():
    with pytest.raises(DomainError):
        cb.polytope([[0, 0], [1, 1], [2, 2]])


def test_gauge_and_radial():
    B = cb.ball([0, 0], 2.0)
    assert B.gauge([1.0, 0.0]) == pytest.approx(0.5)
    assert B.radial([0, 0], [0.6, 0.8]) == pytest.approx(2.0)
    sq = cb.cube(2, side=2.0)
    assert sq.radial([0, 0], np.array([1.0, 1.0]) / math.sqrt(2)) == pytest.approx(math.sqrt(2))
    assert sq.gauge([0.5, -0.25]) == pytest.approx(0.5)
    assert TRIANGLE.origin_position() == "boundary"
    assert sq.origin_position() == "interior"
    assert sq.translate([3.0, 0.0]).origin_position() == "exterior"


def test_contains():
    pts = np.array([[0.2, 0.2], [0.6, 0.6], [-0.1, 0.0]])
    assert TRIANGLE.contains(pts).tolist() == [True, False, False]


def _shapely(K):
    return shapely.geometry.Polygon(K.vertices)


@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
@settings(max_examples=80, deadline=None)
def test_covariogram_2d_against_shapely(x, y):
    P = _shapely(HEXAGON)
    ref = P.intersection(shapely.affinity.translate(P, x, y)).area
    assert HEXAGON.covariogram([x, y]) == pytest.approx(ref, abs=1e-12)


def test_covariogram_3d_cube_closed_form():
    rng = np.random.default_rng(1)
    for x in rng.uniform(-1.2, 1.2, size=(20, 3)):
        exact = float(np.prod(np.maximum(1.0 - np.abs(x), 0.0)))
        assert CUBE.covariogram(x) == pytest.approx(exact, abs=1e-13)


def test_covariogram_3d_simplex_against_monte_carlo():
    for x in ([0.2, 0.1, -0.1], [0.0, 0.4, 0.3]):
        est = cb.covariogram_mc(TETRA, x, samples=200_000, seed=4)
        assert abs(TETRA.covariogram(x) - est.value) <= 4.0 * est.std_error


@pytest.mark.parametrize("d", [0.0, 0.3, 1.1, 1.9, 2.5])
def test_ball_covariograms_closed_form(d):
    disk = cb.ball([0, 0], 1.0)
    ref2 = 2.0 * math.acos(min(d / 2, 1.0)) - 0.5 * d * math.sqrt(max(4.0 - d * d, 0.0))
    assert disk.covariogram([d, 0.0]) == pytest.approx(ref2, abs=1e-13)
    ball3 = cb.ball([0, 0, 0], 1.0)
    ref3 = math.pi / 12.0 * (4.0 + d) * (2.0 - d) ** 2 if d < 2 else 0.0
    assert ball3.covariogram([0.0, d, 0.0]) == pytest.approx(ref3, abs=1e-13)


@pytest.mark.parametrize("K", [TRIANGLE, HEXAGON, CUBE, TETRA, cb.ellipsoid([0, 0], [[2, 0.5], [0.5, 1]])],
                         ids=["triangle", "hexagon", "cube", "tetra", "ellipse"])
def test_ray_profile_matches_covariogram(K):
    rng = np.random.default_rng(2)
    u = rng.normal(size=K.dimension)
    u /= np.linalg.norm(u)
    ray = K.ray_profile(u)
    ts = np.linspace(0.0, ray.end, 23)
    direct = np.array([K.covariogram(t * u) for t in ts])
    assert np.allclose(ray.evaluate(ts), direct, atol=1e-11 * K.volume())
    assert ray.evaluate(np.array([ray.end * 1.01]))[0] == 0.0
    # the support of g_K along u is the radial function of DK
    assert ray.end == pytest.approx(K.difference_body().radial(np.zeros(K.dimension), u), rel=1e-10)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
@settings(max_examples=60, deadline=None)
def test_covariogram_root_concave_along_rays(theta, a, b):
    u = np.array([math.cos(theta), math.sin(theta)])
    end = HEXAGON.difference_body().radial([0, 0], u)
    ta, tb = a * end, b * end
    ga = HEXAGON.covariogram(ta * u) ** 0.5
    gb = HEXAGON.covariogram(tb * u) ** 0.5
    gm = HEXAGON.covariogram(0.5 * (ta + tb) * u) ** 0.5
    assert gm >= 0.5 * (ga + gb) - 1e-12


def test_covariogram_even_and_peak():
    x = np.array([0.3, -0.4])
    assert HEXAGON.covariogram(x) == pytest.approx(HEXAGON.covariogram(-x), abs=1e-14)
    assert HEXAGON.covariogram([0, 0]) == pytest.approx(HEXAGON.volume())


def test_projection_volume():
    assert CUBE.projection_volume([1, 0, 0]) == pytest.approx(1.0)
    assert CUBE.projection_volume(np.array([1, 1, 0]) / math.sqrt(2)) == pytest.approx(math.sqrt(2))
    assert cb.ball([0, 0, 0], 2.0).projection_volume([0, 0, 1]) == pytest.approx(4.0 * math.pi)
    E = cb.ellipsoid([0, 0], np.diag([3.0, 1.0]))
    assert E.projection_volume([0, 1]) == pytest.approx(6.0)
    # planar width of a triangle against the spread of its vertices
    u = np.array([0.6, 0.8])
    perp = np.array([-0.8, 0.6])
    proj = TRIANGLE.vertices @ perp
    assert TRIANGLE.projection_volume(u) == pytest.approx(proj.max() - proj.min())


def test_difference_body_rogers_shephard_equality_for_simplices():
    for T in (TRIANGLE, TETRA):
        n = T.dimension
        assert T.difference_body().volume() == pytest.approx(math.comb(2 * n, n) * T.volume(), rel=1e-12)
    D = cb.ball([3, 1], 1.5).difference_body()
    assert D.kind == "ball" and D.radius == pytest.approx(3.0)


def test_schwarz_set_and_linear_image():
    S = HEXAGON.schwarz_set()
    assert S.volume() == pytest.approx(HEXAGON.volume())
    assert np.allclose(S.center, 0.0)
    M = np.array([[2.0, 0.3], [-0.1, 0.7]])
    assert HEXAGON.linear_image(M).volume() == pytest.approx(abs(np.linalg.det(M)) * HEXAGON.volume())
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert cb.ball([0, 0], 1.0).linear_image(rot).kind == "ball"
    E = cb.ball([0, 0], 1.0).linear_image(np.diag([2.0, 1.0]))
    assert E.kind == "ellipsoid" and E.volume() == pytest.approx(2 * math.pi)


def test_sample_uniform_inside():
    rng = np.random.default_rng(0)
    pts = HEXAGON.sample_uniform(rng, 2000)
    assert HEXAGON.contains(pts).all()
    lo, hi = HEXAGON.bounding_box()
    assert np.all(pts >= lo) and np.all(pts <= hi)


@pytest.mark.parametrize("K", [TRIANGLE, CUBE, cb.ball([1, 2], 0.5), cb.ellipsoid([0, 0], [[2, 0.5], [0.5, 1]])])
def test_dict_round_trip(K):
    again = cb.body_from_dict(K.to_dict())
    assert again == K
    assert again.volume() == pytest.approx(K.volume())

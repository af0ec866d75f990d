"""Radial mean bodies, the L_alpha body, polar projection bodies and friends.

Every construction returns a :class:`SampledStarBody`: radial values on a
:class:`~chordscope.quadrature.DirectionGrid`.  Two routes are available for
fields.

``levels`` (the default) uses that the superlevel sets of every supported
field are dilates x0 + theta K.  Then g_f(t u) is a theta-mixture of
covariograms of K, and each radial power moment factors as a level moment of
the profile times the corresponding moment of the covariogram of K along u:

    rho_{L_alpha f}(u)^alpha = Lambda(n + alpha) * J_alpha(u),
    J_alpha(u) = integral of t^{alpha-1} g_K(t u) dt.

``direct`` integrates t -> g_f(t u) itself, each value of which is an
adaptive integral over the levels.  It is slower and serves as an
independent cross-check of the factorisation.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .convex_bodies import ConvexBody, RayProfile, ray_profiles
from .quadrature import (
    DirectionGrid,
    extrapolate_limit,
    integrate_algebraic,
    integrate_tail,
    log_y_nodes,
    make_grid,
    pairwise_sum,
    power_nodes,
    singular_integral,
)
from .scalar_fields import ScalarField, characteristic
from .special_functions import EULER_GAMMA, DomainError, unit_ball_volume

__all__ = [
    "SampledStarBody",
    "UnboundedBody",
    "ZetaProfile",
    "default_grid",
    "l_alpha_body",
    "r_alpha_set",
    "r_alpha_field",
    "r_zero",
    "r_infty_field",
    "polar_projection_body",
    "frac_polar_projection_body",
    "dual_mixed_volume",
    "zeta",
    "zeta_profile_from_field",
    "minus_one_limit",
    "infinity_limit",
    "inclusion_margin",
    "equality_gap",
]

LARGE_ALPHA = 20.0
METHODS = ("levels", "direct")


@dataclass(frozen=True)
class SampledStarBody:
    """Radial function of a star body sampled on a direction grid."""

    grid: DirectionGrid
    rho: np.ndarray
    label: str = ""

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float).copy()
        if rho.shape != (len(self.grid),):
            raise DomainError("one radial value per grid direction is required")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise DomainError(f"radial values must be finite and non-negative ({self.label})")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dimension(self) -> int:
        return self.grid.n

    def volume(self) -> float:
        n = self.grid.n
        return self.grid.integrate(self.rho**n) / n

    def scaled(self, factor: float, label: str | None = None) -> "SampledStarBody":
        return SampledStarBody(self.grid, factor * self.rho, label or self.label)

    def to_csv(self) -> str:
        n = self.grid.n
        buf = io.StringIO()
        buf.write(",".join([f"u{i + 1}" for i in range(n)] + ["rho", "weight"]) + "\n")
        for u, r, w in zip(self.grid.points, self.rho, self.grid.weights):
            buf.write(",".join(f"{v:.17g}" for v in (*u, r, w)) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class UnboundedBody:
    """Stands for a star body equal to all of R^n."""

    dimension: int
    label: str = "unbounded"
    is_unbounded: bool = field(default=True, init=False)


def _as_field(f_or_K) -> ScalarField:
    if isinstance(f_or_K, ConvexBody):
        return characteristic(f_or_K)
    if isinstance(f_or_K, ScalarField):
        return f_or_K
    raise DomainError("expected a ConvexBody or a ScalarField")


def default_grid(f_or_K, resolution: int | None = None) -> DirectionGrid:
    """Reference grid for a body or field, adapted to planar polygons."""
    f = _as_field(f_or_K)
    return make_grid(f.dimension, resolution, adapt_to=[f.body])


def _check_grid(f: ScalarField, grid: DirectionGrid) -> None:
    if grid.n != f.dimension:
        raise DomainError("grid and field dimensions differ")


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}")


# ---------------------------------------------------------------------------
# covariogram moments along a ray


def _log_power_moment(ray: RayProfile, alpha: float) -> float:
    """log of the integral of t^{alpha-1} g_K(t u) over [0, rho_DK(u)]."""
    if alpha > LARGE_ALPHA:
        x, w = log_y_nodes(ray.edges, alpha, ray.sqrt_end)
        s = pairwise_sum(w * ray.evaluate(x))
        return alpha * math.log(ray.end) - math.log(alpha) + math.log(s)
    x, w = power_nodes(ray.edges, alpha - 1.0, ray.sqrt_end)
    return math.log(pairwise_sum(w * ray.evaluate(x)))


def _deficit_moment(ray: RayProfile, alpha: float) -> float:
    """Integral of t^{alpha-1} (g_K(0) - g_K(t u)) over (0, inf), -1 < alpha < 0."""
    x, w = power_nodes(ray.edges, alpha, ray.sqrt_end)
    g0 = ray.value0
    inner = pairwise_sum(w * (g0 - ray.evaluate(x)) / x)
    return inner + g0 * ray.end**alpha / (-alpha)


def _log_mean(ray: RayProfile) -> float:
    """log rho_{R_0 K}(u) = log rho_DK(u) + integral over [0, rho_DK] of (g/g0 - 1)/t."""
    x, w = power_nodes(ray.edges, 0.0, ray.sqrt_end)
    g0 = ray.value0
    return math.log(ray.end) + pairwise_sum(w * (ray.evaluate(x) / g0 - 1.0) / x)


@lru_cache(maxsize=512)
def _body_moments(K: ConvexBody, grid: DirectionGrid, alpha: float, kind: str) -> np.ndarray:
    rays = ray_profiles(K, grid)
    if kind == "log_power":
        vals = [_log_power_moment(r, alpha) for r in rays]
    elif kind == "deficit":
        vals = [_deficit_moment(r, alpha) for r in rays]
    else:
        vals = [_log_mean(r) for r in rays]
    out = np.array(vals)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# direct route: integrate g_f(t u) in t


def _direct_power(f: ScalarField, ray: RayProfile, alpha: float) -> float:
    g = np.vectorize(lambda t: f.min_correlation_along(ray, t))
    upper = ray.end * f.profile.support if f.is_compact else None
    return singular_integral(g, alpha, "power", upper=upper, breakpoints=ray.edges[1:-1], rel_tol=1e-10)


def _direct_deficit(f: ScalarField, ray: RayProfile, alpha: float) -> float:
    g = np.vectorize(lambda t: f.min_correlation_along(ray, t))
    upper = ray.end * f.profile.support if f.is_compact else None
    return singular_integral(
        g, alpha, "power_deficit", upper=upper, breakpoints=ray.edges[1:-1], g0=f.lp_norm(1.0), rel_tol=1e-10
    )


def _direct_log(f: ScalarField, ray: RayProfile) -> float:
    """-gamma + integral of (g_f(tu)/||f||_1 - e^{-t}) / t, split at c = rho_DK(u).

    On [0, c] the e^{-t} term is replaced by 1, and beyond c it is dropped;
    the two changes add up to Ein(c) - E1(c) = gamma + log c.
    """
    g0 = f.lp_norm(1.0)
    c = ray.end
    bps = ray.edges[1:-1]

    def near(t):
        t = np.asarray(t, dtype=float)
        vals = np.array([f.min_correlation_along(ray, x) for x in np.atleast_1d(t)])
        return (vals / g0 - 1.0) / t

    def far(t):
        t = np.asarray(t, dtype=float)
        vals = np.array([f.min_correlation_along(ray, x) for x in np.atleast_1d(t)])
        return vals / g0 / t

    head = integrate_algebraic(near, 0.0, c, breakpoints=bps, rel_tol=1e-10).value
    if f.is_compact:
        top = c * f.profile.support
        tail = integrate_algebraic(far, c, top, rel_tol=1e-10).value if top > c else 0.0
    else:
        tail = integrate_tail(far, c, rel_tol=1e-10)
    return math.log(c) + head + tail


def _direct_rays(f: ScalarField, grid: DirectionGrid) -> tuple[RayProfile, ...]:
    return ray_profiles(f.body, grid)


# ---------------------------------------------------------------------------
# constructions


def l_alpha_body(f: ScalarField, alpha: float, grid: DirectionGrid, method: str = "levels") -> SampledStarBody:
    """rho(u)^alpha = integral of t^{alpha-1} g_f(t u) dt, alpha > 0."""
    f = _as_field(f)
    alpha = float(alpha)
    if alpha <= 0:
        raise DomainError("L_alpha needs alpha > 0")
    _check_grid(f, grid)
    _check_method(method)
    n = f.dimension
    if method == "levels":
        logs = f.log_level_moment(n + alpha) + _body_moments(f.body, grid, alpha, "log_power")
        rho = np.exp(logs / alpha)
    else:
        rho = np.array([_direct_power(f, r, alpha) ** (1.0 / alpha) for r in _direct_rays(f, grid)])
    return SampledStarBody(grid, rho, f"L_{alpha:g}")


def r_alpha_set(K: ConvexBody, alpha: float, grid: DirectionGrid) -> SampledStarBody:
    """Radial alpha-th mean body of K from the covariogram along each direction."""
    alpha = float(alpha)
    if alpha == 0.0:
        raise DomainError("alpha = 0 is handled by r_zero")
    if alpha <= -1.0:
        raise DomainError("alpha must exceed -1")
    if grid.n != K.dimension:
        raise DomainError("grid and body dimensions differ")
    vol = K.volume()
    if alpha > 0:
        logs = math.log(alpha / vol) + _body_moments(K, grid, alpha, "log_power")
    else:
        logs = np.log((-alpha / vol) * _body_moments(K, grid, alpha, "deficit"))
    return SampledStarBody(grid, np.exp(logs / alpha), f"R_{alpha:g}K")


def r_alpha_field(f: ScalarField, alpha: float, grid: DirectionGrid, method: str = "levels") -> SampledStarBody:
    """Radial alpha-th mean body of a field, alpha in (-1, 0) or (0, inf)."""
    f = _as_field(f)
    alpha = float(alpha)
    if alpha == 0.0:
        raise DomainError("alpha = 0 is handled by r_zero")
    if alpha <= -1.0:
        raise DomainError("alpha must exceed -1")
    if math.isinf(alpha):
        raise DomainError("alpha = inf is handled by r_infty_field")
    _check_grid(f, grid)
    _check_method(method)
    n = f.dimension
    norm1 = f.lp_norm(1.0)
    if method == "levels":
        ratio = f.log_level_moment(n + alpha) - f.log_level_moment(n)
        if alpha > 0:
            logs = math.log(alpha / f.body.volume()) + ratio + _body_moments(f.body, grid, alpha, "log_power")
        else:
            deficit = _body_moments(f.body, grid, alpha, "deficit")
            logs = math.log(-alpha / f.body.volume()) + ratio + np.log(deficit)
    else:
        rays = _direct_rays(f, grid)
        if alpha > 0:
            vals = np.array([_direct_power(f, r, alpha) for r in rays])
            logs = np.log(alpha / norm1 * vals)
        else:
            vals = np.array([_direct_deficit(f, r, alpha) for r in rays])
            logs = np.log(-alpha / norm1 * vals)
    return SampledStarBody(grid, np.exp(logs / alpha), f"R_{alpha:g}f")


def r_zero(f_or_K, grid: DirectionGrid, method: str = "levels") -> SampledStarBody:
    """The alpha = 0 member: log rho(u) = -gamma + integral of (g(tu)/g(0) - e^{-t}) / t dt."""
    f = _as_field(f_or_K)
    _check_grid(f, grid)
    _check_method(method)
    n = f.dimension
    if method == "levels":
        shift = f.profile.level_log_moment(float(n)) / f.level_moment(float(n))
        logs = _body_moments(f.body, grid, 0.0, "log") + shift
    else:
        logs = np.array([_direct_log(f, r) for r in _direct_rays(f, grid)])
    return SampledStarBody(grid, np.exp(logs), "R_0")


def log_zero_reference(f_or_K, u, rel_tol: float = 1e-11) -> float:
    """log rho_{R_0 f}(u) straight from the -gamma formula (slow; for testing)."""
    f = _as_field(f_or_K)
    ray = f.body.ray_profile(u)
    g0 = f.lp_norm(1.0)

    def body(t):
        t = np.asarray(t, dtype=float)
        vals = np.array([f.min_correlation_along(ray, x) for x in np.atleast_1d(t)])
        return (vals / g0 - np.exp(-t)) / t

    bps = list(ray.edges[1:-1])
    head = integrate_algebraic(body, 0.0, 1.0, breakpoints=[b for b in bps if b < 1.0], rel_tol=rel_tol).value
    tail = integrate_tail(body, 1.0, rel_tol=rel_tol)
    return -EULER_GAMMA + head + tail


def r_infty_field(f_or_K):
    """D supp f for compactly supported fields; an UnboundedBody otherwise."""
    f = _as_field(f_or_K)
    if not f.is_compact:
        return UnboundedBody(f.dimension, "R_inf f = R^n")
    return f.support_body().difference_body()


def polar_projection_body(f_or_K, grid: DirectionGrid) -> SampledStarBody:
    """Gauge (1/2) integral |grad f . u|, by the coarea formula over the level dilates.

    With {f >= r} = x0 + theta(r) K the surface term is theta^{n-1} times
    sum_j |u . nu_j| area_j(K) = 2 |K|u-perp|, so the gauge is
    |K|u-perp| * Lambda(n - 1).
    """
    f = _as_field(f_or_K)
    _check_grid(f, grid)
    n = f.dimension
    lam = f.level_moment(float(n - 1))
    gauge_vals = np.array([f.body.projection_volume(u) for u in grid.points]) * lam
    return SampledStarBody(grid, 1.0 / gauge_vals, "Pi*")


def frac_polar_projection_body(
    f_or_K, alpha: float, grid: DirectionGrid, method: str = "levels"
) -> SampledStarBody:
    """rho(u)^alpha = integral of t^{alpha-1} integral |f(x + tu) - f(x)| dx dt, -1 < alpha < 0."""
    f = _as_field(f_or_K)
    alpha = float(alpha)
    if not -1.0 < alpha < 0.0:
        raise DomainError("the fractional polar projection body needs -1 < alpha < 0")
    _check_grid(f, grid)
    _check_method(method)
    n = f.dimension
    if method == "levels":
        vals = f.level_moment(n + alpha) * _body_moments(f.body, grid, alpha, "deficit")
    else:
        vals = np.array([_direct_deficit(f, r, alpha) for r in _direct_rays(f, grid)])
    return SampledStarBody(grid, (2.0 * vals) ** (1.0 / alpha), f"Pi*_{alpha:g}")


def dual_mixed_volume(K: SampledStarBody, L: SampledStarBody, alpha: float, n: int | None = None) -> float:
    if K.grid != L.grid:
        raise DomainError("dual mixed volume needs both bodies on the same grid")
    n = K.grid.n if n is None else int(n)
    alpha = float(alpha)
    return K.grid.integrate(K.rho ** (n - alpha) * L.rho**alpha) / n


# ---------------------------------------------------------------------------
# the zeta function of a pair (omega, phi)


@dataclass(frozen=True)
class ZetaProfile:
    """omega decreasing on [0, inf); phi increasing with phi(0) = 0 and phi(t)/t increasing.

    ``omega_support`` is where omega vanishes (inf if it never does) and
    ``phi_support`` where omega(phi(t)) vanishes; they let the quadrature
    stop instead of summing zeros.
    """

    omega: Callable
    phi: Callable
    s_prime: float | None = None
    omega_support: float = math.inf
    phi_support: float = math.inf
    breakpoints: tuple = ()

    def validate(self, upto: float | None = None) -> None:
        top = upto or (min(self.omega_support, 20.0) if math.isfinite(self.omega_support) else 20.0)
        ts = np.linspace(0.0, top, 401)[1:]
        om = np.asarray(self.omega(ts), dtype=float)
        if np.any(np.diff(om) > 1e-12 * max(1.0, abs(float(self.omega(np.array([0.0]))[0])))):
            raise DomainError("omega must be decreasing")
        ph = np.asarray(self.phi(ts), dtype=float)
        if abs(float(np.asarray(self.phi(np.array([0.0])))[0])) > 1e-12:
            raise DomainError("phi must vanish at 0")
        ratio = ph / ts
        if np.any(np.diff(ph) < -1e-12) or np.any(np.diff(ratio) < -1e-9 * np.maximum(1.0, np.abs(ratio[1:]))):
            raise DomainError("phi and phi(t)/t must be increasing")


def zeta(profile: ZetaProfile, alpha: float, validate: bool = True) -> float:
    """The three-branch zeta function of (omega, phi) at alpha > -1."""
    alpha = float(alpha)
    if alpha <= -1.0:
        raise DomainError("zeta needs alpha > -1")
    if validate:
        profile.validate()
    om, ph = profile.omega, profile.phi

    def composed(t):
        return np.asarray(om(ph(np.asarray(t, dtype=float))), dtype=float)

    def base(t):
        return np.asarray(om(np.asarray(t, dtype=float)), dtype=float)

    up_phi = profile.phi_support if math.isfinite(profile.phi_support) else None
    up_om = profile.omega_support if math.isfinite(profile.omega_support) else None
    bps = profile.breakpoints
    omega0 = float(base(np.array([0.0]))[0])
    if alpha > 0:
        num = singular_integral(composed, alpha, "power", upper=up_phi, breakpoints=bps)
        den = singular_integral(base, alpha, "power", upper=up_om)
        return (num / den) ** (1.0 / alpha)
    if alpha < 0:
        num = singular_integral(composed, alpha, "power_deficit", upper=up_phi, breakpoints=bps, g0=omega0)
        den = singular_integral(base, alpha, "power_deficit", upper=up_om, g0=omega0)
        return (num / den) ** (1.0 / alpha)

    def diff(t):
        t = np.asarray(t, dtype=float)
        return (composed(t) - base(t)) / (t * omega0)

    head = integrate_algebraic(diff, 0.0, 1.0, breakpoints=[b for b in bps if b < 1.0]).value
    return math.exp(head + integrate_tail(diff, 1.0))


def zeta_profile_from_field(f: ScalarField, u, family: str = "exp", s: float | None = None) -> ZetaProfile:
    """(omega, phi) built from g = g_f(. u) as in the inclusion arguments.

    ``exp``: omega(t) = g(0) e^{-t}, phi(t) = -log(g(tu)/g(0)).
    ``cone``: s' = s/(ns+1), omega(t) = g(0)(1 - s't)_+^{1/s'},
    phi(t) = (1 - (g(tu)/g(0))^{s'}) / s'.
    """
    ray = f.body.ray_profile(u)
    g0 = f.lp_norm(1.0)
    end = ray.end * f.profile.support if f.is_compact else math.inf

    def g(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([f.min_correlation_along(ray, x) for x in t])

    bps = tuple(float(e) for e in ray.edges[1:-1])
    if family == "exp":
        def phi(t):
            t = np.asarray(t, dtype=float)
            vals = g(t) / g0
            with np.errstate(divide="ignore"):
                return np.where(vals > 0, -np.log(np.where(vals > 0, vals, 1.0)), np.inf)

        return ZetaProfile(lambda t: g0 * np.exp(-np.asarray(t, dtype=float)), phi, None, math.inf, end, bps)
    if family == "cone":
        if s is None:
            raise DomainError("the cone family needs s")
        n = f.dimension
        sp = s / (n * s + 1.0)

        def omega(t):
            t = np.asarray(t, dtype=float)
            return g0 * np.maximum(1.0 - sp * t, 0.0) ** (1.0 / sp)

        def phi(t):
            t = np.asarray(t, dtype=float)
            return (1.0 - np.maximum(g(t) / g0, 0.0) ** sp) / sp

        return ZetaProfile(omega, phi, sp, 1.0 / sp, end, bps)
    raise DomainError(f"unknown zeta family {family!r}")


# ---------------------------------------------------------------------------
# endpoints by extrapolation


MINUS_ONE_ALPHAS = (-0.9, -0.99, -0.999)
INFINITY_ALPHAS = (1e3, 1e4, 1e5, 1e6, 1e7)


def minus_one_limit(f_or_K, grid: DirectionGrid, alphas: Sequence[float] = MINUS_ONE_ALPHAS) -> np.ndarray:
    """Extrapolated limit of (1 + alpha) ||f||_1 rho_{R_alpha f}(u)^alpha as alpha -> -1.

    The quantity is smooth in eps = 1 + alpha, so polynomial Richardson
    elimination in eps applies.  The limit is the gauge of Pi* f.
    """
    f = _as_field(f_or_K)
    norm1 = f.lp_norm(1.0)
    rows = []
    for a in alphas:
        body = r_alpha_field(f, a, grid)
        rows.append((1.0 + a) * norm1 * body.rho**a)
    rows = np.array(rows)
    eps = [1.0 + a for a in alphas]
    basis = [lambda e, k=k: e**k for k in range(1, len(alphas))]
    return np.array([extrapolate_limit(eps, rows[:, i], basis) for i in range(rows.shape[1])])


def infinity_limit(f_or_K, grid: DirectionGrid, alphas: Sequence[float] = INFINITY_ALPHAS) -> np.ndarray:
    """Extrapolated limit of rho_{R_alpha f}(u) as alpha -> inf.

    log rho approaches its limit like a log(alpha)/alpha + b/alpha; both terms
    are eliminated by least squares over the alpha sequence.
    """
    f = _as_field(f_or_K)
    if not f.is_compact:
        raise DomainError("the alpha -> inf limit is unbounded for fields without compact support")
    logs = np.array([np.log(r_alpha_field(f, a, grid).rho) for a in alphas])
    basis = [lambda a: math.log(a) / a, lambda a: 1.0 / a]
    return np.exp(np.array([extrapolate_limit(alphas, logs[:, i], basis) for i in range(logs.shape[1])]))


# ---------------------------------------------------------------------------
# comparisons on a grid


def _rho_of(body, grid: DirectionGrid) -> np.ndarray:
    if isinstance(body, SampledStarBody):
        if body.grid != grid:
            raise DomainError("bodies live on different grids")
        return body.rho
    if isinstance(body, ConvexBody):
        return body.radial_many(np.zeros(grid.n), grid.points)
    raise DomainError("cannot compare this object as a star body")


def inclusion_margin(inner, outer, grid: DirectionGrid) -> np.ndarray:
    """rho_outer - rho_inner per direction (>= 0 where inner lies inside outer)."""
    return _rho_of(outer, grid) - _rho_of(inner, grid)


def equality_gap(a, b, grid: DirectionGrid) -> float:
    """max over directions of |rho_a / rho_b - 1|."""
    ra, rb = _rho_of(a, grid), _rho_of(b, grid)
    return float(np.max(np.abs(ra / rb - 1.0)))


def ball_volume_ratio(n: int, volume: float) -> float:
    return volume / unit_ball_volume(n)

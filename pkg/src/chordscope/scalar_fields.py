"""Non-negative fields whose superlevel sets are dilates of one convex body.

Every field here has the form f(x) = phi(||x - x0||_K) with phi decreasing,
so that {f >= r} = x0 + theta(r) K.  The profile object carries phi, its
inverse theta, and the level moments

    Lambda(p) = integral over r in (0, ||f||_inf] of theta(r)^p dr,

which turn most integrals over f into one-dimensional quantities attached to
K.  For example ||f||_1 = |K| Lambda(n).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .convex_bodies import ConvexBody, RayProfile, ball, body_from_dict
from .quadrature import integrate_algebraic, singular_integral
from .special_functions import DomainError, digamma, gamma_fn, log_beta, log_gamma, unit_ball_volume

__all__ = [
    "Profile",
    "CharacteristicProfile",
    "ExpProfile",
    "ConeProfile",
    "ScaledProfile",
    "CallableProfile",
    "ScalarField",
    "characteristic",
    "exp_gauge",
    "cone_power",
    "radial_profile",
    "field_from_dict",
    "superlevel",
    "lp_norm",
    "min_correlation",
    "abs_diff_correlation",
    "schwarz_field",
    "layer_cake_bound",
    "mu_f_measure",
]

_EXP_WINDOW = 80.0
LEVEL_REL_TOL = 1e-11


class Profile:
    """Decreasing profile phi on [0, inf) with inverse theta on (0, peak]."""

    peak: float
    support: float  # phi vanishes beyond this radius (inf if never)
    log_concave: bool = True

    def phi(self, rho: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def theta(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def level_moment(self, p: float) -> float:
        return math.exp(self.log_level_moment(p))

    def log_level_moment(self, p: float) -> float:
        raise NotImplementedError

    def level_log_moment(self, p: float) -> float:
        """Integral of theta(r)^p log theta(r) dr (the p-derivative of Lambda)."""
        raise NotImplementedError

    def power_integral(self, n: int, p: float) -> float:
        """n times the integral of rho^{n-1} phi(rho)^p; equals ||f^p||_1 / |K|."""
        raise NotImplementedError

    def integrate_levels(self, h: Callable, lower: float = 0.0, breakpoints=()) -> float:
        """Integral of h(theta(r)) dr over the levels, with h = 0 for theta < lower."""
        raise NotImplementedError

    def sample_levels(self, rng: np.random.Generator, n: int, size: int) -> np.ndarray:
        """Radii R with density proportional to R^n dr(R); R z (z uniform in K) is then f-distributed."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class CharacteristicProfile(Profile):
    def __init__(self, height: float):
        self.height = _positive("height", height)
        self.peak = self.height
        self.support = 1.0

    def phi(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(rho <= 1.0, self.height, 0.0)

    def theta(self, r):
        r = np.asarray(r, dtype=float)
        return np.where((r > 0) & (r <= self.height), 1.0, 0.0)

    def log_level_moment(self, p):
        return math.log(self.height)

    def level_log_moment(self, p):
        return 0.0

    def power_integral(self, n, p):
        return self.height**p

    def integrate_levels(self, h, lower=0.0, breakpoints=()):
        if lower >= 1.0:
            return 0.0
        return self.height * float(np.asarray(h(np.array([1.0])))[0])

    def sample_levels(self, rng, n, size):
        return np.ones(size)

    def to_dict(self):
        return {"profile": "characteristic", "height": self.height}


class ExpProfile(Profile):
    """phi(rho) = a e^{-rho}."""

    def __init__(self, a: float):
        self.a = _positive("a", a)
        self.peak = self.a
        self.support = math.inf

    def phi(self, rho):
        return self.a * np.exp(-np.asarray(rho, dtype=float))

    def theta(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where((r > 0) & (r <= self.a), np.log(self.a / np.where(r > 0, r, 1.0)), 0.0)

    def log_level_moment(self, p):
        return math.log(self.a) + log_gamma(p + 1.0)

    def level_log_moment(self, p):
        return self.a * gamma_fn(p + 1.0) * digamma(p + 1.0)

    def power_integral(self, n, p):
        a, p = self.a, float(p)
        return singular_integral(lambda x: n * a**p * np.exp(-p * np.asarray(x)), float(n), "power")

    def integrate_levels(self, h, lower=0.0, breakpoints=()):
        a = self.a

        def body(th):
            th = np.asarray(th, dtype=float)
            return a * np.exp(-th) * h(th)

        lo = max(lower, 0.0)
        bps = [b for b in breakpoints if lo < b < lo + _EXP_WINDOW]
        # beyond the window e^{-theta} theta^n is below 1e-25 of the total for n <= 6
        return integrate_algebraic(body, lo, lo + _EXP_WINDOW, breakpoints=bps, rel_tol=LEVEL_REL_TOL).value

    def sample_levels(self, rng, n, size):
        return rng.gamma(n + 1.0, 1.0, size)

    def to_dict(self):
        return {"profile": "exp", "a": self.a}


class ConeProfile(Profile):
    """phi(rho) = c (1 - rho)_+^{1/s}."""

    def __init__(self, c: float, s: float):
        self.c = _positive("c", c)
        self.s = _positive("s", s)
        self.peak = self.c
        self.support = 1.0

    def phi(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.c * np.maximum(1.0 - rho, 0.0) ** (1.0 / self.s)

    def theta(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > 0) & (r <= self.c)
        return np.where(inside, 1.0 - (np.clip(r, 0.0, self.c) / self.c) ** self.s, 0.0)

    def log_level_moment(self, p):
        return math.log(self.c / self.s) + log_beta(1.0 / self.s, p + 1.0)

    def level_log_moment(self, p):
        q = 1.0 / self.s
        return self.level_moment(p) * (digamma(p + 1.0) - digamma(p + 1.0 + q))

    def power_integral(self, n, p):
        scale = n * self.c**p
        return integrate_algebraic(
            lambda x: np.full_like(np.asarray(x, dtype=float), scale), 0.0, 1.0,
            left_exp=n - 1.0, right_exp=p / self.s,
        ).value

    def integrate_levels(self, h, lower=0.0, breakpoints=()):
        lo = max(lower, 0.0)
        if lo >= 1.0:
            return 0.0
        w = self.c / self.s
        bps = [b for b in breakpoints if lo < b < 1.0]
        return integrate_algebraic(
            lambda th: w * h(np.asarray(th, dtype=float)), lo, 1.0,
            right_exp=1.0 / self.s - 1.0, breakpoints=bps, rel_tol=LEVEL_REL_TOL,
        ).value

    def sample_levels(self, rng, n, size):
        return rng.beta(n + 1.0, 1.0 / self.s, size)

    def to_dict(self):
        return {"profile": "cone", "c": self.c, "s": self.s}


class ScaledProfile(Profile):
    """phi(rho / scale): the same levels with every dilate stretched by ``scale``."""

    def __init__(self, base: Profile, scale: float):
        self.base = base
        self.scale = _positive("scale", scale)
        self.peak = base.peak
        self.support = base.support * self.scale
        self.log_concave = base.log_concave

    def phi(self, rho):
        return self.base.phi(np.asarray(rho, dtype=float) / self.scale)

    def theta(self, r):
        return self.scale * self.base.theta(r)

    def log_level_moment(self, p):
        return p * math.log(self.scale) + self.base.log_level_moment(p)

    def level_log_moment(self, p):
        return self.scale**p * (
            self.base.level_log_moment(p) + math.log(self.scale) * self.base.level_moment(p)
        )

    def power_integral(self, n, p):
        return self.scale**n * self.base.power_integral(n, p)

    def integrate_levels(self, h, lower=0.0, breakpoints=()):
        k = self.scale
        return self.base.integrate_levels(
            lambda th: h(k * np.asarray(th, dtype=float)), lower / k, [b / k for b in breakpoints]
        )

    def sample_levels(self, rng, n, size):
        return self.scale * self.base.sample_levels(rng, n, size)

    def to_dict(self):
        return {"profile": "scaled", "scale": self.scale, "base": self.base.to_dict()}


class CallableProfile(Profile):
    """A user-supplied decreasing profile; level moments come from quadrature.

    Only the level-moment route is available: the direct correlation path
    needs the level measure, which a bare callable does not expose.
    """

    log_concave = False

    def __init__(self, phi: Callable, support: float = math.inf):
        self._phi = phi
        self.peak = float(np.asarray(phi(np.array([0.0])))[0])
        if not self.peak > 0:
            raise DomainError("profile must be positive at the origin")
        self.support = float(support)

    def phi(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.where(np.isfinite(rho), self._phi(np.where(np.isfinite(rho), rho, 0.0)), 0.0)

    def _upper(self):
        return None if math.isinf(self.support) else self.support

    def level_moment(self, p):
        # layer cake in the radius: Lambda(p) = p * integral rho^{p-1} phi(rho)
        if p == 0:
            return self.peak
        return p * singular_integral(self.phi, float(p), "power", upper=self._upper())

    def log_level_moment(self, p):
        return math.log(self.level_moment(p))

    def level_log_moment(self, p):
        def g(rho):
            rho = np.asarray(rho, dtype=float)
            return self.phi(rho) * (1.0 + p * np.log(np.where(rho > 0, rho, 1.0)))

        return singular_integral(g, float(p), "power", upper=self._upper())

    def power_integral(self, n, p):
        return singular_integral(lambda x: n * self.phi(x) ** p, float(n), "power", upper=self._upper())

    def integrate_levels(self, h, lower=0.0, breakpoints=()):
        raise DomainError("a callable profile exposes no level measure; use the level-moment path")

    def sample_levels(self, rng, n, size):
        raise DomainError("weighted sampling is not available for callable profiles")

    def to_dict(self):
        raise DomainError("callable profiles cannot be serialised")


def _positive(name: str, value) -> float:
    v = float(value)
    if not (v > 0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return v


class ScalarField:
    """f(x) = phi(||x - x0||_K) for a profile phi and a convex body K.

    For the characteristic kind, K is the support itself and x0 = 0, so the
    gauge of K is never needed.  For the other kinds K must contain the
    origin (possibly on its boundary).
    """

    def __init__(self, kind: str, body: ConvexBody, profile: Profile, x0=None):
        if kind not in ("characteristic", "exp_gauge", "cone_power", "radial_profile"):
            raise DomainError(f"unknown field kind {kind!r}")
        self.kind = kind
        self.body = body
        self.profile = profile
        self.dimension = n = body.dimension
        self.x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
        self.x0.setflags(write=False)
        if kind != "characteristic" and body.origin_position() == "exterior":
            raise DomainError("the profile body must contain the origin")
        self._l1 = body.volume() * profile.level_moment(float(n))

    def __repr__(self) -> str:
        return f"ScalarField({self.kind}, n={self.dimension}, profile={self.profile.to_dict() if not isinstance(self.profile, CallableProfile) else 'callable'})"

    @property
    def peak(self) -> float:
        return self.profile.peak

    @property
    def is_compact(self) -> bool:
        return math.isfinite(self.profile.support)

    @property
    def is_log_concave(self) -> bool:
        return self.profile.log_concave

    def level_moment(self, p: float) -> float:
        return self.profile.level_moment(p)

    def log_level_moment(self, p: float) -> float:
        return self.profile.log_level_moment(p)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "characteristic":
            return np.where(self.body.contains(pts), self.profile.peak, 0.0)
        rho = self.body.gauge_many(pts - self.x0, allow_boundary=True)
        out = np.zeros(len(pts))
        fin = np.isfinite(rho)
        out[fin] = self.profile.phi(rho[fin])
        return out

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)

    def superlevel(self, r: float) -> ConvexBody | None:
        r = float(r)
        if r <= 0:
            raise DomainError("superlevel sets need r > 0")
        if r > self.peak:
            return None
        th = float(self.profile.theta(np.array([r]))[0])
        if th <= 0.0:
            return None
        if self.kind == "characteristic":
            return self.body
        return self.body.dilate(th).translate(self.x0)

    def level_volume(self, r) -> np.ndarray:
        th = self.profile.theta(np.asarray(r, dtype=float))
        return self.body.volume() * th**self.dimension

    def lp_norm(self, p: float) -> float:
        p = float(p)
        if math.isinf(p):
            return self.peak
        if p <= 0:
            raise DomainError("lp_norm needs p > 0")
        if p == 1.0:
            return self._l1
        # layer cake written in the dilate parameter
        return (self.body.volume() * self.profile.power_integral(self.dimension, p)) ** (1.0 / p)

    def support_body(self) -> ConvexBody:
        if not self.is_compact:
            raise DomainError("field has unbounded support")
        if self.kind == "characteristic":
            return self.body
        return self.body.dilate(self.profile.support).translate(self.x0)

    def sampling_length(self) -> float:
        lo, hi = self.body.bounding_box()
        return 2.0 * float(np.max(np.maximum(np.abs(lo), np.abs(hi))) * math.sqrt(self.dimension))

    def sample_weighted(self, rng: np.random.Generator, size: int) -> np.ndarray:
        radii = self.profile.sample_levels(rng, self.dimension, size)
        z = self.body.sample_uniform(rng, size)
        if self.kind == "characteristic":
            return z
        return self.x0 + radii[:, None] * z

    # -- correlations ----------------------------------------------------------

    def min_correlation_along(self, ray: RayProfile, t: float) -> float:
        """g_f(t u) for the direction encoded in a ray profile of K."""
        t = abs(float(t))
        if t == 0.0:
            return self._l1
        if self.kind == "characteristic":
            return self.peak * float(ray.evaluate(t))
        n = self.dimension

        def h(th):
            th = np.asarray(th, dtype=float)
            safe = np.where(th > 0, th, 1.0)
            return np.where(th > 0, safe**n * ray.evaluate(t / safe), 0.0)

        lower = t / ray.end
        breaks = [t / e for e in ray.edges[1:-1] if e > 0]
        return self.profile.integrate_levels(h, lower, breaks)

    def min_correlation(self, t: float, u) -> float:
        return self.min_correlation_along(self.body.ray_profile(u), t)

    def abs_diff_correlation(self, t: float, u) -> float:
        return 2.0 * (self._l1 - self.min_correlation(t, u))

    # -- symmetrisation and level measures ---------------------------------------

    def schwarz_field(self) -> "ScalarField":
        n = self.dimension
        if self.kind == "characteristic":
            return characteristic(self.body.schwarz_set(), self.peak)
        radius = (self.body.volume() / unit_ball_volume(n)) ** (1.0 / n)
        return ScalarField("radial_profile", ball(np.zeros(n), 1.0), ScaledProfile(self.profile, radius))

    def layer_cake_bound(self, alpha: float) -> tuple[float, float]:
        n = self.dimension
        alpha = float(alpha)
        if not 0 < alpha < n:
            raise DomainError("layer_cake_bound needs 0 < alpha < n")
        lhs = self.lp_norm(n / (n + alpha))
        rhs = self.body.volume() ** ((n + alpha) / n) * self.profile.level_moment(n + alpha)
        return lhs, rhs

    def mu_f_measure(self, r: float) -> float:
        r = float(r)
        if r <= 0:
            raise DomainError("mu_f_measure needs r > 0")
        if r > self.peak:
            return 0.0
        return float(self.level_volume(np.array([r]))[0]) / self._l1

    # -- serialisation -------------------------------------------------------------

    def to_dict(self) -> dict:
        prof = self.profile
        if self.kind == "characteristic":
            return {"kind": "characteristic", "body": self.body.to_dict(), "height": prof.height}
        if self.kind == "exp_gauge":
            return {"kind": "exp_gauge", "body": self.body.to_dict(), "a": prof.a, "x0": self.x0.tolist()}
        if self.kind == "cone_power":
            return {"kind": "cone_power", "body": self.body.to_dict(), "c": prof.c, "s": prof.s, "x0": self.x0.tolist()}
        return {"kind": "radial_profile", "body": self.body.to_dict(), "profile": prof.to_dict(), "x0": self.x0.tolist()}


# ---------------------------------------------------------------------------
# constructors


def characteristic(K: ConvexBody, height: float = 1.0) -> ScalarField:
    return ScalarField("characteristic", K, CharacteristicProfile(height))


def exp_gauge(a: float, K: ConvexBody, x0=None) -> ScalarField:
    return ScalarField("exp_gauge", K, ExpProfile(a), x0)


def cone_power(c: float, K: ConvexBody, x0=None, s: float = 1.0) -> ScalarField:
    return ScalarField("cone_power", K, ConeProfile(c, s), x0)


def radial_profile(phi, K: ConvexBody, x0=None) -> ScalarField:
    prof = phi if isinstance(phi, Profile) else CallableProfile(phi)
    return ScalarField("radial_profile", K, prof, x0)


def _profile_from_dict(spec: dict) -> Profile:
    kind = spec.get("profile")
    if kind == "characteristic":
        return CharacteristicProfile(spec["height"])
    if kind == "exp":
        return ExpProfile(spec["a"])
    if kind == "cone":
        return ConeProfile(spec["c"], spec["s"])
    if kind == "scaled":
        return ScaledProfile(_profile_from_dict(spec["base"]), spec["scale"])
    raise DomainError(f"unknown profile {kind!r}")


def field_from_dict(spec: dict) -> ScalarField:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("field description needs a 'kind'")
    kind = spec["kind"]
    if "body" not in spec:
        raise DomainError("field description needs a 'body'")
    K = body_from_dict(spec["body"])
    x0 = spec.get("x0")
    if kind == "characteristic":
        return characteristic(K, spec.get("height", 1.0))
    if kind == "exp_gauge":
        return exp_gauge(spec.get("a", 1.0), K, x0)
    if kind == "cone_power":
        return cone_power(spec.get("c", 1.0), K, x0, spec.get("s", 1.0))
    if kind == "radial_profile":
        return radial_profile(_profile_from_dict(spec["profile"]), K, x0)
    raise DomainError(f"unknown field kind {kind!r}")


# module-level spellings of the methods


def superlevel(f: ScalarField, r: float) -> ConvexBody | None:
    return f.superlevel(r)


def lp_norm(f: ScalarField, p: float) -> float:
    return f.lp_norm(p)


def min_correlation(f: ScalarField, t: float, u) -> float:
    return f.min_correlation(t, u)


def abs_diff_correlation(f: ScalarField, t: float, u) -> float:
    return f.abs_diff_correlation(t, u)


def schwarz_field(f: ScalarField) -> ScalarField:
    return f.schwarz_field()


def layer_cake_bound(f: ScalarField, alpha: float) -> tuple[float, float]:
    return f.layer_cake_bound(alpha)


def mu_f_measure(f: ScalarField, r: float) -> float:
    return f.mu_f_measure(r)

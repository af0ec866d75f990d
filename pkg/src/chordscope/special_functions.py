"""Gamma, Beta and the closed-form constants of the chord inequalities.

Everything here is a pure function of its arguments.  The Gamma function is
a Lanczos approximation (g = 7, nine terms) which is good to a few units in
the last place over the positive axis; the reflection formula covers
``0 < x < 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "SpecialConstants",
    "CONSTANTS",
    "EULER_GAMMA",
    "gamma_fn",
    "log_gamma",
    "digamma",
    "beta_fn",
    "log_beta",
    "beta_continuation_residual",
    "unit_ball_volume",
    "sigma",
    "ball_chord_integral",
    "c_gz",
    "c_s",
    "gamma_normaliser",
]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


EULER_GAMMA = 0.57721566490153286060651209008240243


@dataclass(frozen=True)
class SpecialConstants:
    euler_gamma: float = EULER_GAMMA


CONSTANTS = SpecialConstants()

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_series(z: float) -> float:
    # z is the shifted argument x - 1
    acc = _LANCZOS_COEF[0]
    for k in range(1, 9):
        acc += _LANCZOS_COEF[k] / (z + k)
    return acc


def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} requires a positive finite argument, got {x!r}")
    return x


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x > 0``."""
    x = _check_positive("gamma_fn", x)
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    half = 0.5 * (z + 0.5)
    # split the power so that t**(z+0.5) cannot overflow before Gamma does
    p = t**half
    return _SQRT_2PI * p * math.exp(-t) * p * _lanczos_series(z)


def log_gamma(x: float) -> float:
    """Natural logarithm of Gamma for ``x > 0``."""
    x = _check_positive("log_gamma", x)
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x < 20.0:
        return math.log(gamma_fn(x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_series(z))


def digamma(x: float) -> float:
    """Logarithmic derivative of Gamma for ``x > 0``.

    Upward recurrence to ``x >= 12`` followed by the Stirling series in 1/x^2.
    """
    x = _check_positive("digamma", x)
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132))))
    )
    return acc + math.log(x) - 0.5 * inv - series


def log_beta(a: float, b: float) -> float:
    a = _check_positive("beta_fn", a)
    b = _check_positive("beta_fn", b)
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    a = _check_positive("beta_fn", a)
    b = _check_positive("beta_fn", b)
    if a + b < 150.0:
        return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b)
    return math.exp(log_beta(a, b))


def unit_ball_volume(n: int) -> float:
    """Volume omega_n of the Euclidean unit ball in dimension ``n``."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    return math.pi ** (n / 2.0) / gamma_fn(n / 2.0 + 1.0)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= -1.0 or alpha == 0.0:
        raise DomainError(f"alpha must lie in (-1, 0) or (0, inf), got {alpha!r}")
    return alpha


def _check_dim(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def sigma(n: int, alpha: float) -> float:
    """Sharp constant of the chord Sobolev inequality, closed Gamma form."""
    n = _check_dim(n)
    alpha = _check_alpha(alpha)
    log_val = (
        math.log(n)
        + alpha * math.log(2.0)
        + 0.5 * (n - alpha - 1.0) * math.log(math.pi)
        + log_gamma(0.5 * (alpha + 1.0))
        + (alpha / n) * log_gamma(0.5 * n + 1.0)
        - math.log(abs(alpha))
        - log_gamma(0.5 * (n + alpha) + 1.0)
    )
    return math.exp(log_val)


def ball_chord_integral(n: int, alpha: float) -> float:
    """Chord power integral I_{alpha+1} of the unit ball."""
    n = _check_dim(n)
    alpha = _check_alpha(alpha)
    omega = unit_ball_volume(n)
    return sigma(n, alpha) * abs(alpha) * (alpha + 1.0) * omega ** (alpha / n) / n


def c_gz(n: int, alpha: float) -> float:
    """(n B(alpha+1, n))^{-1/alpha}."""
    n = _check_dim(n)
    alpha = _check_alpha(alpha)
    return math.exp(-(math.log(n) + log_beta(alpha + 1.0, n)) / alpha)


def c_s(n: int, alpha: float, s: float) -> float:
    """((n + 1/s) B(alpha+1, n+1/s))^{-1/alpha}; tends to c_gz as s grows."""
    n = _check_dim(n)
    alpha = _check_alpha(alpha)
    s = _check_positive("c_s", s)
    m = n + 1.0 / s
    return math.exp(-(math.log(m) + log_beta(alpha + 1.0, m)) / alpha)


def gamma_normaliser(alpha: float) -> float:
    """Gamma(alpha+1)^{1/alpha}, continued by exp(-gamma) at alpha = 0."""
    alpha = float(alpha)
    if alpha <= -1.0:
        raise DomainError(f"alpha must exceed -1, got {alpha!r}")
    if alpha == 0.0:
        return math.exp(-EULER_GAMMA)
    return math.exp(log_gamma(alpha + 1.0) / alpha)


def beta_continuation_residual(alpha: float, s: float) -> float:
    """Absolute gap between a quadrature of the Beta integrand and its closed form.

    For alpha > 0 the integrand is t^{alpha-1} (1 - s t)_+^{1/s}; for
    -1 < alpha < 0 the constant is subtracted, t^{alpha-1}((1 - s t)_+^{1/s} - 1).
    Both should integrate to s^{-alpha} B(alpha, 1 + 1/s), with the Beta
    function continued to negative first argument via B(a,b) = B(a+1,b)(a+b)/a.
    """
    from .quadrature import integrate_algebraic

    alpha = _check_alpha(alpha)
    s = _check_positive("beta_continuation_residual", s)
    q = 1.0 / s
    end = 1.0 / s
    if alpha > 0:
        closed = s ** (-alpha) * beta_fn(alpha, 1.0 + q)

        # (1 - s t)^{q} = s^{q} (1/s - t)^{q}: both endpoints carry an algebraic weight
        def h(t):
            return np.full_like(np.asarray(t, dtype=float), s**q)

        value = integrate_algebraic(h, 0.0, end, left_exp=alpha - 1.0, right_exp=q).value
    else:
        closed = s ** (-alpha) * beta_fn(alpha + 1.0, 1.0 + q) * (alpha + 1.0 + q) / alpha

        # (1 - s t)^{q} - 1 vanishes linearly at 0; peel one power of t
        def h(t):
            t = np.asarray(t, dtype=float)
            # expm1/log1p keep the small-t values accurate
            return np.expm1(q * np.log1p(-np.minimum(s * t, 1.0 - 1e-300))) / t

        inner = integrate_algebraic(h, 0.0, end, left_exp=alpha).value
        # beyond 1/s the integrand is -t^{alpha-1}
        tail = -(end**alpha) / (-alpha)
        value = inner + tail
    return abs(value - closed)



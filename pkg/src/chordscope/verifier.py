"""Executable checks for the chord inequalities and the radial-mean-body inclusions.

Each check returns a :class:`VerificationReport`.  Terms are listed in the
order of the chain being checked, and margins are sign-normalised so that a
non-negative margin means the asserted inequality or inclusion holds.

For inclusion chains a term is the largest radial value of the body it
names and the margin between consecutive bodies A and B (A claimed inside B)
is min over grid directions of rho_B - rho_A.  Each margin is also classified
as ``equality`` when max |rho_A / rho_B - 1| is within the equality
tolerance.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convex_bodies import ConvexBody, ball, interval
from .mean_bodies import (
    SampledStarBody,
    _body_moments,
    default_grid,
    dual_mixed_volume,
    infinity_limit,
    l_alpha_body,
    minus_one_limit,
    polar_projection_body,
    r_alpha_field,
    r_alpha_set,
    r_zero,
)
from .quadrature import DirectionGrid, McEstimate, mc_double_integral
from .scalar_fields import ScalarField, characteristic, cone_power
from .special_functions import (
    DomainError,
    ball_chord_integral,
    digamma,
    gamma_normaliser,
    log_beta,
    sigma,
    unit_ball_volume,
)

__all__ = [
    "VerificationReport",
    "QUAD_TOL",
    "EXACT_TOL",
    "EQUALITY_TOL",
    "check_iso_chord",
    "chord_power_integral",
    "check_thm1",
    "check_thm2",
    "check_thm3",
    "check_thm4",
    "check_thm5",
    "check_gz55",
    "check_riesz",
    "check_counterexample_1d",
    "check_limits",
    "CHECKS",
    "reports_to_csv",
]

QUAD_TOL = 1e-6
EXACT_TOL = 1e-9
EQUALITY_TOL = 1e-4
LIMIT_TOL = 1e-3

HOLDS = "holds"
EQUALITY = "equality_within_tol"
VIOLATED = "violated"


@dataclass
class VerificationReport:
    check_id: str
    inputs: dict
    terms: list
    margins: list
    tolerance: float
    status: str
    margin_status: list = field(default_factory=list)
    std_errors: list | None = None
    details: dict = field(default_factory=dict)
    runtime_ms: float | None = None

    @property
    def min_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0

    @property
    def term_values(self) -> list[float]:
        return [v for _, v in self.terms]

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = asdict(self)
        out["terms"] = [{"name": n, "value": v} for n, v in self.terms]
        if not include_runtime:
            out.pop("runtime_ms")
        return _jsonable(out)

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def reports_to_csv(reports: Sequence[VerificationReport], include_runtime: bool = False) -> str:
    """Summary table; runtime_ms stays empty unless requested so the bytes are reproducible."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_id", "status", "min_margin", "tolerance", "runtime_ms", "terms"])
    for r in reports:
        runtime = f"{r.runtime_ms:.1f}" if include_runtime and r.runtime_ms is not None else ""
        terms = ";".join(f"{n}={v:.17g}" for n, v in r.terms)
        writer.writerow([r.check_id, r.status, f"{r.min_margin:.17g}", f"{r.tolerance:.17g}", runtime, terms])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# report assembly


def _finish(
    check_id: str,
    inputs: dict,
    terms: list,
    margins: list,
    tolerance: float,
    equal_flags: list[bool],
    std_errors=None,
    details=None,
    started: float | None = None,
) -> VerificationReport:
    values = [abs(v) for _, v in terms]
    scale = max(values) if values else 1.0
    statuses = []
    for m, eq in zip(margins, equal_flags):
        if m < -tolerance * scale:
            statuses.append(VIOLATED)
        elif eq:
            statuses.append(EQUALITY)
        else:
            statuses.append(HOLDS)
    if VIOLATED in statuses:
        status = VIOLATED
    elif statuses and all(s == EQUALITY for s in statuses):
        status = EQUALITY
    else:
        status = HOLDS
    if not all(math.isfinite(v) for v in values):
        status = VIOLATED
    runtime = None if started is None else 1000.0 * (time.perf_counter() - started)
    return VerificationReport(
        check_id, _jsonable(inputs), [(n, float(v)) for n, v in terms], [float(m) for m in margins],
        float(tolerance), status, statuses, std_errors, _jsonable(details or {}), runtime,
    )


def _scalar_chain(values: Sequence[float], descending: Sequence[bool]) -> tuple[list[float], list[bool]]:
    """Margins for t0 >= t1 (descending) or t0 <= t1, with relative equality flags."""
    margins = []
    flags = []
    scale = max(abs(v) for v in values)
    for i, desc in enumerate(descending):
        a, b = values[i], values[i + 1]
        m = a - b if desc else b - a
        margins.append(m)
        flags.append(abs(a - b) <= EQUALITY_TOL * scale)
    return margins, flags


def _rho(body, grid: DirectionGrid) -> np.ndarray:
    if isinstance(body, SampledStarBody):
        return body.rho
    if isinstance(body, ConvexBody):
        return body.radial_many(np.zeros(grid.n), grid.points)
    return np.asarray(body, dtype=float)


def _inclusion_chain(named: Sequence[tuple[str, object]], grid: DirectionGrid):
    """named[0] inside named[1] inside ... ; returns terms, margins, flags, gaps."""
    rhos = [(name, _rho(b, grid)) for name, b in named]
    terms = [(name, float(np.max(r))) for name, r in rhos]
    margins, flags, gaps = [], [], []
    for (_, inner), (_, outer) in zip(rhos[:-1], rhos[1:]):
        margins.append(float(np.min(outer - inner)))
        gap = float(np.max(np.abs(inner / outer - 1.0)))
        gaps.append(gap)
        flags.append(gap <= EQUALITY_TOL)
    return terms, margins, flags, gaps


def _field(f_or_K) -> ScalarField:
    if isinstance(f_or_K, ConvexBody):
        return characteristic(f_or_K)
    return f_or_K


def _grid_for(f: ScalarField, grid: DirectionGrid | None, resolution: int | None) -> DirectionGrid:
    if grid is not None:
        return grid
    return default_grid(f, resolution)


def _describe(f_or_K) -> dict:
    return f_or_K.to_dict()


# ---------------------------------------------------------------------------
# chord power integrals


def chord_power_integral(K: ConvexBody, alpha: float, grid: DirectionGrid | None = None) -> float:
    """I_{alpha+1}(K) through the covariogram along every direction.

    alpha > 0: alpha(alpha+1)/(n omega_n) times the sphere integral of
    int t^{alpha-1} g_K(tu) dt.  -1 < alpha < 0: -alpha(alpha+1)/(n omega_n)
    times the sphere integral of int t^{alpha-1} (|K| - g_K(tu)) dt.
    """
    alpha = float(alpha)
    if alpha <= -1.0 or alpha == 0.0:
        raise DomainError("chord power integrals need alpha in (-1, 0) or (0, inf)")
    n = K.dimension
    grid = grid or default_grid(K)
    omega = unit_ball_volume(n)
    if alpha > 0:
        vals = np.exp(_body_moments(K, grid, alpha, "log_power"))
        return alpha * (alpha + 1.0) / (n * omega) * grid.integrate(vals)
    vals = _body_moments(K, grid, alpha, "deficit")
    return -alpha * (alpha + 1.0) / (n * omega) * grid.integrate(vals)


def check_iso_chord(K: ConvexBody, alpha: float, grid: DirectionGrid | None = None) -> VerificationReport:
    started = time.perf_counter()
    alpha = float(alpha)
    n = K.dimension
    omega = unit_ball_volume(n)
    value = chord_power_integral(K, alpha, grid)
    ratio = value / ball_chord_integral(n, alpha)
    rhs = (K.volume() / omega) ** ((n + alpha) / n)
    # >= for alpha in (-1, 0) or (n, inf); <= for (0, n); alpha = n is an identity
    descending = alpha < 0 or alpha >= n
    margins, flags = _scalar_chain([ratio, rhs], [descending])
    details = {"chord_power_integral": value, "direction": ">=" if descending else "<="}
    if alpha == n:
        details["identity_value"] = (n + 1.0) * K.volume() ** 2 / omega
    return _finish(
        "iso_chord", {"body": K.to_dict(), "alpha": alpha},
        [("I(K)/I(B)", ratio), ("(|K|/omega_n)^((n+alpha)/n)", rhs)],
        margins, QUAD_TOL, flags, details=details, started=started,
    )


# ---------------------------------------------------------------------------
# affine chord Sobolev chains


def _mc_term(f: ScalarField, alpha: float, samples: int, seed: int, threads: int) -> McEstimate:
    return mc_double_integral(f, alpha, ball(np.zeros(f.dimension), 1.0), samples, seed, threads=threads)


def _sobolev_pieces(f: ScalarField, alpha: float, grid: DirectionGrid):
    n = f.dimension
    body = l_alpha_body(f, alpha, grid)
    sphere = SampledStarBody(grid, np.ones(len(grid)), "B")
    double = n * dual_mixed_volume(sphere, body, alpha, n)
    middle = n * unit_ball_volume(n) ** ((n - alpha) / n) * body.volume() ** (alpha / n)
    return body, double, middle


def _attach_mc(report_args: dict, f, alpha, double, mc_samples, seed, threads):
    if not mc_samples:
        return None
    est = _mc_term(f, alpha, mc_samples, seed, threads)
    report_args["details"]["mc_double_integral"] = est.value
    report_args["details"]["mc_agrees_3sigma"] = abs(est.value - double) <= 3.0 * est.std_error
    return [est.std_error]


def check_thm1(
    f, alpha: float, grid: DirectionGrid | None = None, resolution: int | None = None,
    mc_samples: int = 0, seed: int = 0, threads: int = 1,
) -> VerificationReport:
    started = time.perf_counter()
    f = _field(f)
    n = f.dimension
    alpha = float(alpha)
    if not 0 < alpha < n:
        raise DomainError("check_thm1 needs 0 < alpha < n")
    grid = _grid_for(f, grid, resolution)
    _, double, _ = _sobolev_pieces(f, alpha, grid)
    lhs = sigma(n, alpha) * f.lp_norm(n / (n + alpha))
    margins, flags = _scalar_chain([lhs, double], [True])
    args = {"details": {}}
    std = _attach_mc(args, f, alpha, double, mc_samples, seed, threads)
    rep = _finish(
        "thm1", {"field": _describe(f), "alpha": alpha},
        [("sigma*||f||_{n/(n+alpha)}", lhs), ("double_integral", double)],
        margins, QUAD_TOL, flags, std, args["details"], started,
    )
    if std is not None and not args["details"]["mc_agrees_3sigma"]:
        rep.status = VIOLATED
    return rep


def check_thm2(
    f, alpha: float, grid: DirectionGrid | None = None, resolution: int | None = None,
    mc_samples: int = 0, seed: int = 0, threads: int = 1,
) -> VerificationReport:
    started = time.perf_counter()
    f = _field(f)
    n = f.dimension
    alpha = float(alpha)
    if not 0 < alpha < n:
        raise DomainError("check_thm2 needs 0 < alpha < n")
    grid = _grid_for(f, grid, resolution)
    _, double, middle = _sobolev_pieces(f, alpha, grid)
    lhs = sigma(n, alpha) * f.lp_norm(n / (n + alpha))
    margins, flags = _scalar_chain([lhs, middle, double], [True, True])
    args = {"details": {}}
    std = _attach_mc(args, f, alpha, double, mc_samples, seed, threads)
    rep = _finish(
        "thm2", {"field": _describe(f), "alpha": alpha},
        [("sigma*||f||_{n/(n+alpha)}", lhs), ("n*omega^((n-alpha)/n)*|L_alpha f|^(alpha/n)", middle),
         ("double_integral", double)],
        margins, QUAD_TOL, flags, std, args["details"], started,
    )
    if std is not None and not args["details"]["mc_agrees_3sigma"]:
        rep.status = VIOLATED
    return rep


def check_thm3(
    f, alpha: float, grid: DirectionGrid | None = None, resolution: int | None = None,
    mc_samples: int = 0, seed: int = 0, threads: int = 1,
) -> VerificationReport:
    started = time.perf_counter()
    f = _field(f)
    n = f.dimension
    alpha = float(alpha)
    if not alpha > n:
        raise DomainError("check_thm3 needs alpha > n")
    grid = _grid_for(f, grid, resolution)
    _, double, middle = _sobolev_pieces(f, alpha, grid)
    lhs = sigma(n, alpha) * f.lp_norm(1.0) ** ((n + alpha) / n) * f.lp_norm(math.inf) ** (-alpha / n)
    margins, flags = _scalar_chain([lhs, middle, double], [False, False])
    args = {"details": {}}
    std = _attach_mc(args, f, alpha, double, mc_samples, seed, threads)
    rep = _finish(
        "thm3", {"field": _describe(f), "alpha": alpha},
        [("sigma*||f||_1^((n+alpha)/n)*||f||_inf^(-alpha/n)", lhs),
         ("n*omega^((n-alpha)/n)*|L_alpha f|^(alpha/n)", middle), ("double_integral", double)],
        margins, QUAD_TOL, flags, std, args["details"], started,
    )
    if std is not None and not args["details"]["mc_agrees_3sigma"]:
        rep.status = VIOLATED
    return rep


# ---------------------------------------------------------------------------
# radial mean body chains


def _normalised_r(f: ScalarField, alpha: float, grid: DirectionGrid) -> np.ndarray:
    if alpha == 0.0:
        return r_zero(f, grid).rho / gamma_normaliser(0.0)
    return r_alpha_field(f, alpha, grid).rho / gamma_normaliser(alpha)


def _log_c(n_eff: float, alpha: float) -> float:
    """log of ((n_eff) B(alpha+1, n_eff))^{-1/alpha}, continued to alpha = 0."""
    if alpha == 0.0:
        return digamma(n_eff + 1.0) - digamma(1.0)
    return -(math.log(n_eff) + log_beta(alpha + 1.0, n_eff)) / alpha


def _r_any(f: ScalarField, alpha: float, grid: DirectionGrid) -> np.ndarray:
    if alpha == 0.0:
        return r_zero(f, grid).rho
    return r_alpha_field(f, alpha, grid).rho


def _sorted_alphas(alphas) -> list[float]:
    vals = sorted({float(a) for a in alphas}, reverse=True)
    if not vals or vals[-1] <= -1.0 or any(math.isinf(a) for a in vals):
        raise DomainError("alphas must be finite and exceed -1")
    return vals


def check_thm4(
    f, alphas: Sequence[float] = (5.0, 2.0, 1.0, 0.5, -0.5), grid: DirectionGrid | None = None,
    resolution: int | None = None, pi_star_factor: float = 2.0,
) -> VerificationReport:
    """Gamma-normalised R_beta f inside R_alpha f (alpha < beta), all inside c ||f||_1 Pi* f.

    ``pi_star_factor`` is the constant c of the outer body; ``details`` also
    records how close the chain comes to ||f||_1 Pi* f itself.
    """
    started = time.perf_counter()
    f = _field(f)
    if not f.is_log_concave:
        raise DomainError("check_thm4 needs a log-concave field")
    grid = _grid_for(f, grid, resolution)
    order = _sorted_alphas(alphas)
    named = [(f"R_{a:g} f / Gamma({a:g}+1)^(1/{a:g})", _normalised_r(f, a, grid)) for a in order]
    pi = polar_projection_body(f, grid).rho * f.lp_norm(1.0)
    named.append((f"{pi_star_factor:g}*||f||_1*Pi* f", pi_star_factor * pi))
    terms, margins, flags, gaps = _inclusion_chain(named, grid)
    unit_gap = float(np.max(np.abs(named[-2][1] / pi - 1.0)))
    details = {"equality_gaps": gaps, "gap_to_norm1_pi_star": unit_gap,
               "spread_across_alpha": float(max(np.max(np.abs(r / named[0][1] - 1.0)) for _, r in named[:-1]))}
    return _finish(
        "thm4", {"field": _describe(f), "alphas": order, "pi_star_factor": pi_star_factor},
        terms, margins, QUAD_TOL, flags, details=details, started=started,
    )


def check_thm5(
    f, alphas: Sequence[float] = (5.0, 2.0, 1.0, 0.5, -0.5), grid: DirectionGrid | None = None,
    resolution: int | None = None,
) -> VerificationReport:
    """R_inf f inside c_{n,beta}(s) R_beta f inside ... inside (n + 1/s) ||f||_1 Pi* f."""
    started = time.perf_counter()
    f = _field(f)
    if f.kind != "cone_power":
        raise DomainError("check_thm5 needs a cone_power field")
    n = f.dimension
    s = f.profile.s
    grid = _grid_for(f, grid, resolution)
    order = _sorted_alphas(alphas)
    m = n + 1.0 / s
    named = [("R_inf f", f.support_body().difference_body())]
    for a in order:
        named.append((f"c_(n,{a:g})(s) R_{a:g} f", math.exp(_log_c(m, a)) * _r_any(f, a, grid)))
    named.append(("(n+1/s)*||f||_1*Pi* f", m * f.lp_norm(1.0) * polar_projection_body(f, grid).rho))
    terms, margins, flags, gaps = _inclusion_chain(named, grid)
    return _finish(
        "thm5", {"field": _describe(f), "s": s, "alphas": order},
        terms, margins, QUAD_TOL, flags, details={"equality_gaps": gaps}, started=started,
    )


def check_gz55(
    K: ConvexBody, alphas: Sequence[float] = (5.0, 2.0, 1.0, 0.5, -0.5), grid: DirectionGrid | None = None,
    resolution: int | None = None,
) -> VerificationReport:
    """DK inside c_{n,beta} R_beta K inside c_{n,alpha} R_alpha K inside n |K| Pi* K."""
    started = time.perf_counter()
    n = K.dimension
    grid = grid or default_grid(K, resolution)
    order = _sorted_alphas(alphas)
    named = [("DK", K.difference_body())]
    for a in order:
        rho = r_zero(K, grid).rho if a == 0.0 else r_alpha_set(K, a, grid).rho
        named.append((f"c_(n,{a:g}) R_{a:g} K", math.exp(_log_c(float(n), a)) * rho))
    named.append(("n|K| Pi* K", n * K.volume() * polar_projection_body(K, grid).rho))
    terms, margins, flags, gaps = _inclusion_chain(named, grid)
    return _finish(
        "gz55", {"body": K.to_dict(), "alphas": order},
        terms, margins, QUAD_TOL, flags, details={"equality_gaps": gaps}, started=started,
    )


# ---------------------------------------------------------------------------
# symmetrisation


def check_riesz(
    A, alpha: float, regime: str | None = None, grid: DirectionGrid | None = None,
    resolution: int | None = None,
) -> VerificationReport:
    """|L_alpha f| against |L_alpha f*|: at most for 0 < alpha < n, at least for alpha > n."""
    started = time.perf_counter()
    f = _field(A)
    n = f.dimension
    alpha = float(alpha)
    if regime is None:
        regime = "sub_n" if alpha < n else "super_n"
    if regime == "sub_n" and not 0 < alpha < n:
        raise DomainError("regime sub_n needs 0 < alpha < n")
    if regime == "super_n" and not alpha > n:
        raise DomainError("regime super_n needs alpha > n")
    if regime not in ("sub_n", "super_n"):
        raise DomainError(f"unknown regime {regime!r}")
    fs = f.schwarz_field()
    grid_f = _grid_for(f, grid, resolution)
    grid_s = grid or default_grid(fs, resolution)
    vol_f = l_alpha_body(f, alpha, grid_f).volume()
    vol_s = l_alpha_body(fs, alpha, grid_s).volume()
    margins, flags = _scalar_chain([vol_f, vol_s], [regime == "super_n"])
    return _finish(
        "riesz", {"field": _describe(f), "alpha": alpha, "regime": regime},
        [("|L_alpha f|", vol_f), ("|L_alpha f*|", vol_s)], margins, QUAD_TOL, flags, started=started,
    )


# ---------------------------------------------------------------------------
# the one-dimensional counterexample


COUNTEREXAMPLE_EXACT = {"c_(1,1) R_1 f": 2.0 / 3.0, "c_(1,1/2) R_1/2 f": 16.0 / 25.0}


def counterexample_field() -> ScalarField:
    """f(x) = 2x on [0, 1]: a cone of slope 2 with apex at 1 over the body [-1, 0]."""
    return cone_power(2.0, interval(-1.0, 0.0), x0=[1.0], s=1.0)


def check_counterexample_1d() -> VerificationReport:
    """The log-concave analogue of the simplex chain fails for f(x) = 2x on [0, 1].

    The report asserts that c_{1,1} R_1 f is *not* contained in
    c_{1,1/2} R_{1/2} f: the margin is the amount by which the former sticks
    out, so a positive margin confirms the failure.
    """
    started = time.perf_counter()
    f = counterexample_field()
    grid = DirectionGrid(1, np.array([[-1.0], [1.0]]), np.array([1.0, 1.0]), "line")
    one = math.exp(_log_c(1.0, 1.0)) * r_alpha_field(f, 1.0, grid).rho
    half = math.exp(_log_c(1.0, 0.5)) * r_alpha_field(f, 0.5, grid).rho
    errors = {
        "c_(1,1) R_1 f": float(np.max(np.abs(one - 2.0 / 3.0))),
        "c_(1,1/2) R_1/2 f": float(np.max(np.abs(half - 16.0 / 25.0))),
    }
    terms = [("c_(1,1/2) R_1/2 f", float(half[1])), ("c_(1,1) R_1 f", float(one[1]))]
    margin = float(np.min(one - half))
    rep = _finish(
        "counterexample_1d", {"field": _describe(f), "alpha": 0.5, "beta": 1.0},
        terms, [margin], EXACT_TOL, [False],
        details={"exact": COUNTEREXAMPLE_EXACT, "abs_errors": errors,
                 "left_endpoints": {"c_(1,1) R_1 f": float(-one[0]), "c_(1,1/2) R_1/2 f": float(-half[0])}},
        started=started,
    )
    if max(errors.values()) > EXACT_TOL or margin <= 0:
        rep.status = VIOLATED
    return rep


# ---------------------------------------------------------------------------
# endpoints


def check_limits(f, grid: DirectionGrid | None = None, resolution: int | None = None) -> VerificationReport:
    """Extrapolated alpha -> -1 and alpha -> inf endpoints against Pi* f and D supp f.

    Terms are the allowance followed by the relative gap at each endpoint;
    each margin is the allowance minus that gap.
    """
    started = time.perf_counter()
    f = _field(f)
    grid = _grid_for(f, grid, resolution)
    gauge_pi = 1.0 / polar_projection_body(f, grid).rho
    low = minus_one_limit(f, grid)
    gap_low = float(np.max(np.abs(low / gauge_pi - 1.0)))
    terms = [("allowed_gap", LIMIT_TOL), ("gap_minus_one", gap_low)]
    details = {"minus_one_extrapolated": low, "pi_star_gauge": gauge_pi}
    if f.is_compact:
        high = infinity_limit(f, grid)
        target = f.support_body().difference_body().radial_many(np.zeros(grid.n), grid.points)
        gap_high = float(np.max(np.abs(high / target - 1.0)))
        terms.append(("gap_infinity", gap_high))
        details["infinity_extrapolated"] = high
        details["d_supp_radial"] = target
    margins = [LIMIT_TOL - v for _, v in terms[1:]]
    return _finish(
        "limits", {"field": _describe(f)}, terms, margins, 0.0, [False] * len(margins),
        details=details, started=started,
    )


CHECKS: dict[str, Callable[..., VerificationReport]] = {
    "iso_chord": check_iso_chord,
    "thm1": check_thm1,
    "thm2": check_thm2,
    "thm3": check_thm3,
    "thm4": check_thm4,
    "thm5": check_thm5,
    "gz55": check_gz55,
    "riesz": check_riesz,
    "counterexample_1d": check_counterexample_1d,
    "limits": check_limits,
}

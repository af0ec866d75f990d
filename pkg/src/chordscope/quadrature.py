"""Integration engines.

Three families live here:

* one-dimensional quadrature with algebraic endpoint weights (Gauss-Jacobi
  panels at the singular ends, adaptive Gauss-Kronrod elsewhere),
* weighted direction grids on the sphere,
* seeded Monte Carlo for the double integrals, driven by a counter-based
  generator so the result does not depend on how batches are scheduled.

Gauss-Legendre nodes come from numpy and Gauss-Jacobi nodes from scipy.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .special_functions import DomainError, gamma_fn, unit_ball_volume

__all__ = [
    "QuadResult",
    "gauss_legendre01",
    "gauss_jacobi01",
    "integrate_algebraic",
    "singular_integral",
    "integrate_tail",
    "DirectionGrid",
    "make_grid",
    "REFERENCE_RESOLUTION",
    "McEstimate",
    "substream",
    "mc_double_integral",
    "power_nodes",
    "log_y_nodes",
    "extrapolate_limit",
    "pairwise_sum",
]


# ---------------------------------------------------------------------------
# node sets


@lru_cache(maxsize=None)
def gauss_legendre01(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi01(m: int, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the weight x**gamma on [0, 1], gamma > -1."""
    if gamma <= -1.0:
        raise DomainError(f"Gauss-Jacobi weight exponent must exceed -1, got {gamma}")
    if gamma == 0.0:
        return gauss_legendre01(m)
    y, w = roots_jacobi(m, 0.0, float(gamma))
    # weight (1+y)^gamma dy = 2^{gamma+1} x^gamma dx on the unit interval
    return 0.5 * (y + 1.0), w / 2.0 ** (gamma + 1.0)


# Gauss-Kronrod 7/15 on [-1, 1]
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG7 = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G7_MASK = np.zeros(15, dtype=bool)
_G7_MASK[[1, 3, 5, 7, 9, 11, 13]] = True
_G7_WEIGHTS = np.concatenate([_WG7[:-1], _WG7[::-1]])


def _evaluate(h: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(h(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(h(float(xi))) for xi in x])


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int


@dataclass(order=True)
class _Panel:
    neg_error: float
    a: float = field(compare=False)
    b: float = field(compare=False)
    kind: str = field(compare=False)
    value: float = field(compare=False)
    error: float = field(compare=False)


def integrate_algebraic(
    h: Callable,
    a: float,
    b: float,
    left_exp: float = 0.0,
    right_exp: float = 0.0,
    breakpoints: Iterable[float] = (),
    rel_tol: float = 1e-13,
    abs_tol: float = 0.0,
    max_panels: int = 4000,
) -> QuadResult:
    """Integral of (x - a)**left_exp * (b - x)**right_exp * h(x) over [a, b].

    Panels touching a singular endpoint use Gauss-Jacobi rules of two orders
    (their difference is the error estimate); interior panels use
    Gauss-Kronrod 7/15.  The panel with the largest error is bisected until
    the summed error meets the tolerance.
    """
    a = float(a)
    b = float(b)
    if not (b > a):
        if b == a:
            return QuadResult(0.0, 0.0, 0)
        raise ValueError("integration interval must satisfy a < b")
    if left_exp <= -1.0 or right_exp <= -1.0:
        raise DomainError("endpoint exponents must exceed -1")
    evals = 0
    length = b - a

    def weight(x):
        wv = np.ones_like(x)
        if left_exp != 0.0:
            wv = wv * (x - a) ** left_exp
        if right_exp != 0.0:
            wv = wv * (b - x) ** right_exp
        return wv

    def rule(lo: float, hi: float, kind: str) -> tuple[float, float]:
        nonlocal evals
        width = hi - lo
        if kind == "left":
            vals = []
            for m in (12, 24):
                xj, wj = gauss_jacobi01(m, float(left_exp))
                x = lo + width * xj
                f = _evaluate(h, x)
                if right_exp != 0.0:
                    f = f * (b - x) ** right_exp
                evals += m
                vals.append(width ** (left_exp + 1.0) * float(np.dot(wj, f)))
            return vals[1], abs(vals[1] - vals[0])
        if kind == "right":
            vals = []
            for m in (12, 24):
                xj, wj = gauss_jacobi01(m, float(right_exp))
                x = hi - width * xj
                f = _evaluate(h, x)
                if left_exp != 0.0:
                    f = f * (x - a) ** left_exp
                evals += m
                vals.append(width ** (right_exp + 1.0) * float(np.dot(wj, f)))
            return vals[1], abs(vals[1] - vals[0])
        mid = 0.5 * (lo + hi)
        half = 0.5 * width
        x = mid + half * _GK_NODES
        f = _evaluate(h, x) * weight(x)
        evals += 15
        k15 = half * float(np.dot(_GK_WEIGHTS, f))
        g7 = half * float(np.dot(_G7_WEIGHTS, f[_G7_MASK]))
        return k15, abs(k15 - g7)

    cuts = sorted({a, b, *[float(p) for p in breakpoints if a < float(p) < b]})
    if len(cuts) == 2 and left_exp != 0.0 and right_exp != 0.0:
        cuts = [a, 0.5 * (a + b), b]
    heap: list[_Panel] = []
    for i, (lo, hi) in enumerate(zip(cuts[:-1], cuts[1:])):
        if i == 0 and left_exp != 0.0:
            kind = "left"
        elif i == len(cuts) - 2 and right_exp != 0.0:
            kind = "right"
        else:
            kind = "gk"
        v, e = rule(lo, hi, kind)
        heapq.heappush(heap, _Panel(-e, lo, hi, kind, v, e))

    eps = np.finfo(float).eps

    def totals():
        return (
            math.fsum(p.value for p in heap),
            math.fsum(p.error for p in heap),
            math.fsum(abs(p.value) for p in heap),
        )

    total, err, mass = totals()
    min_width = 64.0 * eps * max(abs(a), abs(b), length)
    # the last term is a round-off floor: below it refinement only chases noise
    while err > max(abs_tol, rel_tol * abs(total), 50.0 * eps * mass) and len(heap) < max_panels:
        worst = heapq.heappop(heap)
        if worst.b - worst.a < min_width:
            # cannot refine further; keep it and stop
            heapq.heappush(heap, worst)
            break
        mid = 0.5 * (worst.a + worst.b)
        if worst.kind == "left":
            kinds = ("left", "gk")
        elif worst.kind == "right":
            kinds = ("gk", "right")
        else:
            kinds = ("gk", "gk")
        for (lo, hi), kind in zip(((worst.a, mid), (mid, worst.b)), kinds):
            v, e = rule(lo, hi, kind)
            heapq.heappush(heap, _Panel(-e, lo, hi, kind, v, e))
        total, err, mass = totals()
    return QuadResult(total, err, evals)


def singular_integral(
    g: Callable,
    alpha: float,
    mode: str = "power",
    upper: float | None = None,
    breakpoints: Iterable[float] = (),
    g0: float | None = None,
    rel_tol: float = 1e-12,
) -> float:
    """Integrals with the kernel t**(alpha-1) on the half line.

    ``power``: the integral of t**(alpha-1) g(t) over (0, upper], alpha > 0.
    ``upper=None`` or ``inf`` integrates to infinity by doubling panels.

    ``power_deficit``: the integral of t**(alpha-1) (g0 - g(t)) over (0, inf)
    for -1 < alpha < 0, where g0 defaults to g(0).  ``upper`` may give a point
    beyond which g vanishes identically, so the tail is summed analytically.
    """
    alpha = float(alpha)
    if mode not in ("power", "power_deficit"):
        raise ValueError(f"unknown mode {mode!r}")
    if alpha <= -1.0:
        raise DomainError("alpha must exceed -1")
    bps = sorted(float(p) for p in breakpoints)
    finite_upper = upper is not None and math.isfinite(upper)

    if mode == "power":
        if alpha <= 0.0:
            raise DomainError("power mode needs alpha > 0")
        if finite_upper:
            return integrate_algebraic(g, 0.0, upper, left_exp=alpha - 1.0, breakpoints=bps, rel_tol=rel_tol).value
        start = max([1.0] + bps)
        head = integrate_algebraic(g, 0.0, start, left_exp=alpha - 1.0, breakpoints=bps, rel_tol=rel_tol).value

        def body(t):
            t = np.asarray(t, dtype=float)
            return t ** (alpha - 1.0) * _evaluate(g, t)

        return head + _doubling_tail(body, start, head, rel_tol)

    if alpha >= 0.0:
        raise DomainError("power_deficit mode needs -1 < alpha < 0")
    ref = float(g(0.0)) if g0 is None else float(g0)

    def peeled(t):
        t = np.asarray(t, dtype=float)
        return (ref - _evaluate(g, t)) / t

    if finite_upper:
        inner = integrate_algebraic(peeled, 0.0, upper, left_exp=alpha, breakpoints=bps, rel_tol=rel_tol).value
        return inner + ref * upper**alpha / (-alpha)
    start = max([1.0] + bps)
    inner = integrate_algebraic(peeled, 0.0, start, left_exp=alpha, breakpoints=bps, rel_tol=rel_tol).value
    const_tail = ref * start**alpha / (-alpha)

    def body(t):
        t = np.asarray(t, dtype=float)
        return t ** (alpha - 1.0) * _evaluate(g, t)

    return inner + const_tail - _doubling_tail(body, start, inner + const_tail, rel_tol)


def integrate_tail(body: Callable, start: float, rel_tol: float = 1e-12) -> float:
    """Integral of ``body`` over [start, inf), summed over doubling panels."""
    return _doubling_tail(body, start, 0.0, rel_tol)


def _doubling_tail(body: Callable, start: float, scale: float, rel_tol: float) -> float:
    acc = 0.0
    lo = start
    quiet = 0
    for _ in range(400):
        hi = 2.0 * lo
        piece = integrate_algebraic(body, lo, hi, rel_tol=rel_tol).value
        acc += piece
        if abs(piece) <= 1e-17 * max(abs(scale + acc), 1e-300):
            quiet += 1
            if quiet >= 3:
                return acc
        else:
            quiet = 0
        lo = hi
    raise ValueError("tail of the singular integral does not converge")


# ---------------------------------------------------------------------------
# node planners for piecewise-smooth ray profiles


def _geometric_pieces(a: float, b: float, ratio: float = 2.0) -> list[tuple[float, float]]:
    pieces = []
    lo = a
    while b > ratio * lo:
        pieces.append((lo, ratio * lo))
        lo = ratio * lo
    pieces.append((lo, b))
    return pieces


def power_nodes(
    edges: Sequence[float],
    gamma: float,
    sqrt_end: bool = False,
    m: int = 16,
    m_origin: int = 12,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the integral of t**gamma h(t) over [0, edges[-1]].

    ``edges`` partitions the range into pieces on which h is smooth (for
    polytopes, polynomial).  The first piece carries the algebraic weight and
    gets a Gauss-Jacobi rule; later pieces are cut geometrically so that the
    power factor stays tame, then receive Gauss-Legendre rules.  When
    ``sqrt_end`` is set, h behaves like a half-integer power of the distance
    to the last edge and the final piece is mapped through t = b - (b-a) v^2.
    """
    edges = [float(e) for e in edges]
    if edges[0] != 0.0 or len(edges) < 2:
        raise ValueError("edges must start at 0 and contain at least one piece")
    xs: list[np.ndarray] = []
    ws: list[np.ndarray] = []
    gl_x, gl_w = gauss_legendre01(m)
    last = len(edges) - 2

    def add_gl(lo, hi):
        x = lo + (hi - lo) * gl_x
        xs.append(x)
        ws.append((hi - lo) * gl_w * x**gamma)

    def add_sqrt(lo, hi):
        v = gl_x
        x = hi - (hi - lo) * v * v
        xs.append(x)
        ws.append(2.0 * (hi - lo) * v * gl_w * x**gamma)

    for i in range(last + 1):
        lo, hi = edges[i], edges[i + 1]
        if hi <= lo:
            continue
        singular_tail = sqrt_end and i == last
        if i == 0:
            top = 0.5 * hi if singular_tail else hi
            xj, wj = gauss_jacobi01(m_origin, float(gamma))
            xs.append(top * xj)
            ws.append(top ** (gamma + 1.0) * wj)
            if singular_tail:
                add_sqrt(top, hi)
            continue
        if singular_tail:
            split = max(lo, 0.5 * hi)
            for p, q in _geometric_pieces(lo, split) if split > lo else []:
                add_gl(p, q)
            add_sqrt(split, hi)
            continue
        for p, q in _geometric_pieces(lo, hi):
            add_gl(p, q)
    return np.concatenate(xs), np.concatenate(ws)


def log_y_nodes(
    edges: Sequence[float],
    alpha: float,
    sqrt_end: bool = False,
    m: int = 16,
    y_max: float = 48.0,
    max_width: float = 4.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes for the integral of e^{-y} h(end * e^{-y/alpha}) over y in [0, inf).

    This is the large-alpha form of the power moment: with t = end e^{-y/alpha},
    the integral of t^{alpha-1} h(t) over [0, end] equals
    end^alpha / alpha times the integral returned here.  The returned nodes are
    the t values, so callers evaluate h directly.
    """
    edges = [float(e) for e in edges]
    end = edges[-1]
    cuts = [0.0]
    for e in reversed(edges[1:-1]):
        y = alpha * math.log(end / e)
        if y < y_max:
            cuts.append(y)
    cuts.append(y_max)
    gl_x, gl_w = gauss_legendre01(m)
    ys: list[np.ndarray] = []
    ws: list[np.ndarray] = []
    for i, (lo, hi) in enumerate(zip(cuts[:-1], cuts[1:])):
        if hi <= lo:
            continue
        if i == 0 and sqrt_end:
            # h ~ y^{k/2} near y = 0; y = v^2 restores smoothness
            top = min(hi, max_width)
            v = math.sqrt(top) * gl_x
            ys.append(v * v)
            ws.append(2.0 * v * math.sqrt(top) * gl_w)
            lo = top
            if hi <= lo:
                continue
        count = max(1, int(math.ceil((hi - lo) / max_width)))
        grid = np.linspace(lo, hi, count + 1)
        for p, q in zip(grid[:-1], grid[1:]):
            ys.append(p + (q - p) * gl_x)
            ws.append((q - p) * gl_w)
    y = np.concatenate(ys)
    w = np.concatenate(ws) * np.exp(-y)
    return end * np.exp(-y / alpha), w


# ---------------------------------------------------------------------------
# direction grids

REFERENCE_RESOLUTION = {1: 2, 2: 512, 3: 64}


class DirectionGrid:
    """Unit directions with positive weights summing to the sphere's area."""

    def __init__(self, n: int, points: np.ndarray, weights: np.ndarray, label: str):
        self.n = int(n)
        self.points = np.ascontiguousarray(points, dtype=float)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        self.points.setflags(write=False)
        self.weights.setflags(write=False)
        self.label = label
        self.key = (self.n, label, self.points.tobytes(), self.weights.tobytes())

    def __len__(self) -> int:
        return len(self.weights)

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DirectionGrid) and self.key == other.key

    def __repr__(self) -> str:
        return f"DirectionGrid(n={self.n}, size={len(self)}, label={self.label!r})"

    def integrate(self, values: np.ndarray) -> float:
        return pairwise_sum(self.weights * np.asarray(values, dtype=float))

    def antipode_index(self) -> np.ndarray:
        """Index of -u_i for every grid point."""
        pts = self.points
        order = np.lexsort(np.round(pts, 12).T[::-1])
        neg = np.lexsort(np.round(-pts, 12).T[::-1])
        idx = np.empty(len(pts), dtype=int)
        idx[neg] = order
        return idx


def _critical_angles(bodies: Sequence) -> list[float]:
    angles: list[float] = []
    for body in bodies:
        dirs = getattr(body, "critical_directions", None)
        if dirs is None:
            continue
        for d in dirs():
            ang = math.atan2(d[1], d[0]) % math.pi
            angles.append(ang)
    if not angles:
        return []
    angles.sort()
    uniq = [angles[0]]
    for ang in angles[1:]:
        if ang - uniq[-1] > 1e-12:
            uniq.append(ang)
    if len(uniq) > 1 and uniq[0] + math.pi - uniq[-1] <= 1e-12:
        uniq.pop()
    return uniq


def make_grid(n: int, resolution: int | None = None, adapt_to: Sequence = (), seed: int = 0) -> DirectionGrid:
    """Weighted direction grid on the unit sphere of R^n.

    n = 1: the two directions +-1.  n = 2: equally spaced angles, or, when
    ``adapt_to`` contains polygons, Gauss-Legendre nodes on the arcs between
    the directions of their vertex differences (where the integrands have
    kinks).  n = 3: Gauss-Legendre in the polar cosine times equally spaced
    azimuths, ``resolution`` being the azimuth count.  n >= 4: random
    antipodal pairs with equal weights.
    """
    if int(n) != n or n < 1:
        raise DomainError("dimension must be a positive integer")
    n = int(n)
    if resolution is None:
        resolution = REFERENCE_RESOLUTION.get(n, 2000)
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    if n == 1:
        return DirectionGrid(1, np.array([[-1.0], [1.0]]), np.array([1.0, 1.0]), "line")
    if n == 2:
        crit = _critical_angles(adapt_to)
        if len(crit) >= 1:
            return _adapted_circle(crit, resolution)
        m = resolution + (resolution % 2)
        theta = 2.0 * math.pi * np.arange(m) / m
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        return DirectionGrid(2, pts, np.full(m, 2.0 * math.pi / m), f"circle-{m}")
    if n == 3:
        m_phi = resolution + (resolution % 2)
        m_z = max(2, m_phi // 2)
        z, wz = np.polynomial.legendre.leggauss(m_z)
        phi = 2.0 * math.pi * np.arange(m_phi) / m_phi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        r = np.sqrt(1.0 - zz**2)
        pts = np.column_stack([(r * np.cos(pp)).ravel(), (r * np.sin(pp)).ravel(), zz.ravel()])
        w = (wz[:, None] * np.full(m_phi, 2.0 * math.pi / m_phi)[None, :]).ravel()
        return DirectionGrid(3, pts, w, f"sphere-{m_z}x{m_phi}")
    half = max(1, resolution // 2)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(n, half))))
    g = rng.standard_normal((half, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    pts = np.vstack([g, -g])
    area = n * unit_ball_volume(n)
    return DirectionGrid(n, pts, np.full(2 * half, area / (2 * half)), f"random-{2 * half}-{seed}")


def _adapted_circle(crit: list[float], resolution: int) -> DirectionGrid:
    arcs = list(zip(crit, crit[1:] + [crit[0] + math.pi]))
    per_half = max(resolution // 2, 6 * len(arcs))
    thetas = []
    weights = []
    for lo, hi in arcs:
        count = max(6, int(round(per_half * (hi - lo) / math.pi)))
        x, w = gauss_legendre01(count)
        thetas.append(lo + (hi - lo) * x)
        weights.append((hi - lo) * w)
    theta = np.concatenate(thetas)
    wt = np.concatenate(weights)
    theta = np.concatenate([theta, theta + math.pi])
    wt = np.concatenate([wt, wt])
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    label = "arcs-" + "-".join(f"{a:.12f}" for a in crit) + f"-{resolution}"
    return DirectionGrid(2, pts, wt, label)


def pairwise_sum(values: np.ndarray) -> float:
    """Sum with a fixed pairwise reduction tree."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.concatenate([v, [0.0]])
        v = v[0::2] + v[1::2]
    return float(v[0])


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int
    seed: int


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key): Philox keyed by a SeedSequence."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))))


def _sphere_sample(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    if n == 1:
        return np.where(rng.random(size) < 0.5, -1.0, 1.0)[:, None]
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1)[:, None]


def mc_double_integral(
    f,
    alpha: float,
    kernel_body,
    samples: int,
    seed: int,
    task: int = 0,
    threads: int = 1,
    batch_size: int = 1 << 15,
) -> McEstimate:
    """Estimate the double integral of min{f(x), f(y)} / ||x - y||_K^{n - alpha}.

    x is drawn from the support of f (uniformly) or, for fields with
    unbounded support, proportionally to f.  The displacement y - x = t u
    uses u uniform on the sphere and t with density proportional to
    t^{alpha - 1}, truncated at the support diameter for compact fields and
    damped by e^{-t/L} otherwise.  Batch b draws from substream(seed, task, b),
    so the estimate does not depend on ``threads``.
    """
    alpha = float(alpha)
    if alpha <= 0.0:
        raise DomainError("the double integral needs alpha > 0")
    n = f.dimension
    samples = int(samples)
    if samples < 2:
        raise ValueError("need at least two samples")
    area = n * unit_ball_volume(n)
    compact = f.is_compact
    if compact:
        support = f.support_body()
        vol = support.volume()
        diam = support.diameter()
    else:
        norm1 = f.lp_norm(1.0)
        scale_len = f.sampling_length()
        gamma_a = gamma_fn(alpha)

    def run_batch(b: int) -> tuple[int, float, float]:
        size = min(batch_size, samples - b * batch_size)
        rng = substream(seed, task, b)
        u = _sphere_sample(rng, n, size)
        if compact:
            x = support.sample_uniform(rng, size)
            t = diam * rng.random(size) ** (1.0 / alpha)
            fx = f.evaluate(x)
            fy = f.evaluate(x + t[:, None] * u)
            weight = vol * area * diam**alpha / alpha
            vals = weight * np.minimum(fx, fy)
        else:
            x = f.sample_weighted(rng, size)
            t = rng.gamma(alpha, scale_len, size)
            fx = f.evaluate(x)
            fy = f.evaluate(x + t[:, None] * u)
            ratio = np.minimum(1.0, fy / fx)
            vals = norm1 * area * gamma_a * scale_len**alpha * np.exp(t / scale_len) * ratio
        if n != alpha:
            vals = vals * kernel_body.gauge_many(u) ** (alpha - n)
        mean = pairwise_sum(vals) / size
        m2 = pairwise_sum((vals - mean) ** 2)
        return size, mean, m2

    batches = range((samples + batch_size - 1) // batch_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_batch, batches))
    else:
        parts = [run_batch(b) for b in batches]
    count = 0
    mean = 0.0
    m2 = 0.0
    for size, bmean, bm2 in parts:
        # Chan et al. merge, in batch order
        total = count + size
        delta = bmean - mean
        mean = mean + delta * size / total
        m2 = m2 + bm2 + delta * delta * count * size / total
        count = total
    var = m2 / (count - 1)
    return McEstimate(mean, math.sqrt(var / count), count, int(seed))


# ---------------------------------------------------------------------------
# extrapolation


def extrapolate_limit(xs: Sequence[float], ys: Sequence[float], basis: Sequence[Callable[[float], float]]) -> float:
    """Least-squares fit of ys against [1, *basis](xs); returns the constant term.

    With as many points as basis functions this is classical Richardson
    elimination of the listed error terms.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    cols = [np.ones_like(xs)] + [np.array([b(x) for x in xs]) for b in basis]
    mat = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(mat, ys, rcond=None)
    return float(coef[0])

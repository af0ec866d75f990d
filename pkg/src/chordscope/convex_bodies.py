"""Convex bodies: balls, ellipsoids and polytopes.

A body is immutable.  Polytopes keep their vertex list and derive the facet
halfspaces once, at construction; the covariogram of a polytope is computed
exactly by clipping (Sutherland-Hodgman in the plane, face-wise clipping in
space).  Balls and ellipsoids have closed forms, the ellipsoid reducing to
the ball through its shape matrix.

Along a fixed direction u the function t -> g_K(t u) is what every radial
mean body is built from.  :class:`RayProfile` stores it as a piecewise
polynomial (polytopes, where it is exactly polynomial between combinatorial
breakpoints) or as a closed form (balls, ellipsoids).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from .quadrature import DirectionGrid, McEstimate, integrate_algebraic, substream
from .special_functions import DomainError, unit_ball_volume

__all__ = [
    "ConvexBody",
    "RayProfile",
    "ball",
    "ellipsoid",
    "polytope",
    "interval",
    "simplex",
    "cube",
    "regular_polygon",
    "body_from_dict",
    "gauge",
    "radial",
    "volume",
    "covariogram",
    "covariogram_mc",
    "difference_body",
    "schwarz_set",
    "linear_image",
    "ray_profiles",
]

_TOL = 1e-12


def _as_points(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or len(pts) == 0:
        raise DomainError("a polytope needs a non-empty list of points")
    if not np.all(np.isfinite(pts)):
        raise DomainError("vertices must be finite")
    return pts


def _sqrtm_spd(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (mat + mat.T))
    if np.any(vals <= 0):
        raise DomainError("matrix is not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.T


class ConvexBody:
    """A ball, an ellipsoid {c + A y : |y| <= 1} with A SPD, or a polytope."""

    def __init__(self, kind: str, dimension: int, *, center=None, radius=None, shape=None, vertices=None):
        if kind not in ("ball", "ellipsoid", "polytope"):
            raise DomainError(f"unknown body kind {kind!r}")
        self.kind = kind
        self.dimension = n = int(dimension)
        if n < 1:
            raise DomainError("dimension must be positive")
        if kind == "ball":
            self.center = np.asarray(center if center is not None else np.zeros(n), dtype=float).reshape(n)
            self.radius = float(radius)
            if not (self.radius > 0 and math.isfinite(self.radius)):
                raise DomainError("ball radius must be positive")
            self.shape = self.radius * np.eye(n)
            self._init_quadric()
        elif kind == "ellipsoid":
            self.center = np.asarray(center if center is not None else np.zeros(n), dtype=float).reshape(n)
            shape = np.asarray(shape, dtype=float).reshape(n, n)
            if not np.allclose(shape, shape.T, rtol=0, atol=1e-12 * np.abs(shape).max()):
                raise DomainError("ellipsoid shape matrix must be symmetric")
            if np.any(np.linalg.eigvalsh(shape) <= 0):
                raise DomainError("ellipsoid shape matrix must be positive definite")
            self.shape = 0.5 * (shape + shape.T)
            self.radius = None
            self._init_quadric()
        else:
            self._init_polytope(_as_points(vertices))
        for arr in (self.center, self.shape):
            if arr is not None:
                arr.setflags(write=False)
        self._key = self._make_key()

    # -- construction helpers -------------------------------------------------

    def _init_quadric(self) -> None:
        self.vertices = None
        self.shape_inv = np.linalg.inv(self.shape)
        self._det = abs(float(np.linalg.det(self.shape)))
        self._volume = self._det * unit_ball_volume(self.dimension)
        self.normals = None
        self.offsets = None
        self.facet_areas = None
        self.faces = None
        self.edges = None

    def _init_polytope(self, pts: np.ndarray) -> None:
        n = self.dimension
        if pts.shape[1] != n:
            raise DomainError("vertex dimension does not match the body dimension")
        self.center = None
        self.radius = None
        self.shape = None
        self.shape_inv = None
        self.faces = None
        self.edges = None
        if n == 1:
            lo, hi = float(pts.min()), float(pts.max())
            if not hi - lo > _TOL * max(1.0, abs(lo), abs(hi)):
                raise DomainError("degenerate interval")
            self.vertices = np.array([[lo], [hi]])
            self.normals = np.array([[-1.0], [1.0]])
            self.offsets = np.array([-lo, hi])
            self.facet_areas = np.array([1.0, 1.0])
            self._volume = hi - lo
            return
        centred = pts - pts.mean(axis=0)
        if np.linalg.matrix_rank(centred, tol=1e-10 * max(1.0, np.abs(centred).max())) < n:
            raise DomainError("polytope has empty interior (vertices are affinely dependent)")
        hull = ConvexHull(pts)
        verts = pts[hull.vertices]
        if n == 2:
            # scipy returns planar hull vertices counter-clockwise
            self.vertices = verts
            nxt = np.roll(verts, -1, axis=0)
            edge = nxt - verts
            lengths = np.linalg.norm(edge, axis=1)
            normals = np.column_stack([edge[:, 1], -edge[:, 0]]) / lengths[:, None]
            self.normals = normals
            self.offsets = np.einsum("ij,ij->i", normals, verts)
            self.facet_areas = lengths
            x, y = verts[:, 0], verts[:, 1]
            self._volume = 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))
            self.edges = [(verts[i], nxt[i]) for i in range(len(verts))]
            return
        self.vertices = verts
        eq = hull.equations
        normals = eq[:, :n]
        offsets = -eq[:, n]
        keys = np.round(np.column_stack([normals, offsets / max(1.0, np.abs(offsets).max())]), 9)
        _, first = np.unique(keys, axis=0, return_index=True)
        first = np.sort(first)
        self.normals = normals[first]
        self.offsets = offsets[first]
        interior = verts.mean(axis=0)
        vol = 0.0
        for simplex_idx in hull.simplices:
            mat = pts[simplex_idx] - interior
            vol += abs(float(np.linalg.det(mat)))
        self._volume = vol / math.factorial(n)
        if n == 3:
            faces = []
            areas = []
            edges = {}
            for a, b in zip(self.normals, self.offsets):
                on = verts[np.abs(verts @ a - b) < 1e-9 * max(1.0, abs(b))]
                poly = _order_planar(on, a)
                faces.append(poly)
                areas.append(_polygon_area3(poly))
                for i in range(len(poly)):
                    p, q = poly[i], poly[(i + 1) % len(poly)]
                    key = tuple(sorted((tuple(np.round(p, 12)), tuple(np.round(q, 12)))))
                    edges[key] = (p, q)
            self.faces = faces
            self.facet_areas = np.array(areas)
            self.edges = [edges[k] for k in sorted(edges)]
        else:
            self.facet_areas = None

    def _make_key(self):
        parts = [self.kind, self.dimension]
        for arr in (self.center, self.shape, self.vertices):
            parts.append(None if arr is None else np.asarray(arr).tobytes())
        return tuple(parts)

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConvexBody) and self._key == other._key

    def __repr__(self) -> str:
        if self.kind == "ball":
            return f"ConvexBody(ball, n={self.dimension}, center={self.center.tolist()}, radius={self.radius})"
        if self.kind == "ellipsoid":
            return f"ConvexBody(ellipsoid, n={self.dimension}, center={self.center.tolist()})"
        return f"ConvexBody(polytope, n={self.dimension}, vertices={len(self.vertices)})"

    # -- basic geometry ---------------------------------------------------------

    @property
    def is_quadric(self) -> bool:
        return self.kind in ("ball", "ellipsoid")

    def volume(self) -> float:
        return self._volume

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_quadric:
            y = (pts - self.center) @ self.shape_inv.T
            return np.einsum("ij,ij->i", y, y) <= 1.0 + tol
        scale = max(1.0, float(np.abs(self.offsets).max()))
        return np.all(pts @ self.normals.T <= self.offsets + tol * scale, axis=1)

    def origin_position(self) -> str:
        """'interior', 'boundary' or 'exterior' for the origin."""
        if self.is_quadric:
            q = -self.shape_inv @ self.center
            r = float(q @ q)
            if r < 1.0 - 1e-12:
                return "interior"
            return "boundary" if r <= 1.0 + 1e-12 else "exterior"
        scale = max(1.0, float(np.abs(self.offsets).max()))
        if np.all(self.offsets > 1e-12 * scale):
            return "interior"
        if np.all(self.offsets >= -1e-12 * scale):
            return "boundary"
        return "exterior"

    def gauge_many(self, points, allow_boundary: bool = False) -> np.ndarray:
        """Minkowski gauge ||x||_K for each row; the origin must lie in K.

        With ``allow_boundary`` the origin may sit on the boundary, in which
        case points outside the tangent cone get gauge +inf.
        """
        where = self.origin_position()
        if where == "exterior" or (where == "boundary" and not allow_boundary):
            raise DomainError("the gauge needs the origin in the interior of K")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_quadric:
            p = pts @ self.shape_inv.T
            q = -self.shape_inv @ self.center
            pp = np.einsum("ij,ij->i", p, p)
            pq = p @ q
            disc = np.maximum(pq * pq - pp * (float(q @ q) - 1.0), 0.0)
            mu = (-pq + np.sqrt(disc)) / np.where(pp > 0, pp, 1.0)
            # mu = 1/lambda; the sign convention follows x/lambda - c = A y
            out = np.where(pp > 0, np.where(mu > 0, 1.0 / np.where(mu > 0, mu, 1.0), np.inf), 0.0)
            return out
        scale = max(1.0, float(np.abs(self.offsets).max()))
        proj = pts @ self.normals.T
        pos = self.offsets > 1e-12 * scale
        vals = np.where(pos[None, :], proj / np.where(pos, self.offsets, 1.0)[None, :], 0.0)
        g = np.maximum(vals.max(axis=1), 0.0)
        if not np.all(pos):
            blocked = np.any((proj[:, ~pos] > 1e-12 * scale * np.linalg.norm(pts, axis=1)[:, None]), axis=1)
            g = np.where(blocked, np.inf, g)
        return g

    def gauge(self, x) -> float:
        return float(self.gauge_many(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def radial(self, x0, u) -> float:
        """sup{lam >= 0 : x0 + lam u in K}."""
        x0 = np.asarray(x0, dtype=float).reshape(self.dimension)
        u = np.asarray(u, dtype=float).reshape(self.dimension)
        if not self.contains(x0[None, :], tol=1e-12)[0]:
            raise DomainError("radial function needs a base point inside K")
        return float(self.radial_many(x0, u[None, :])[0])

    def radial_many(self, x0, dirs) -> np.ndarray:
        x0 = np.asarray(x0, dtype=float).reshape(self.dimension)
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        if self.is_quadric:
            p = dirs @ self.shape_inv.T
            q = self.shape_inv @ (x0 - self.center)
            pp = np.einsum("ij,ij->i", p, p)
            pq = p @ q
            disc = np.maximum(pq * pq - pp * (float(q @ q) - 1.0), 0.0)
            return np.maximum((-pq + np.sqrt(disc)) / pp, 0.0)
        slack = self.offsets - self.normals @ x0
        rate = dirs @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(rate > 1e-15, slack[None, :] / rate, np.inf)
        return np.maximum(lam.min(axis=1), 0.0)

    def diameter(self) -> float:
        if self.is_quadric:
            return 2.0 * float(np.linalg.eigvalsh(self.shape).max())
        v = self.vertices
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((diff**2).sum(axis=2)).max())

    def interior_point(self) -> np.ndarray:
        if self.is_quadric:
            return self.center.copy()
        return self.vertices.mean(axis=0)

    def critical_directions(self) -> list[np.ndarray]:
        """Directions of vertex differences (planar polytopes only)."""
        if self.kind != "polytope" or self.dimension != 2:
            return []
        v = self.vertices
        out = []
        for i in range(len(v)):
            for j in range(i + 1, len(v)):
                d = v[j] - v[i]
                out.append(d / np.linalg.norm(d))
        return out

    def projection_volume(self, u) -> float:
        """(n-1)-volume of the orthogonal projection of K onto u-perp."""
        u = np.asarray(u, dtype=float).reshape(self.dimension)
        u = u / np.linalg.norm(u)
        n = self.dimension
        if n == 1:
            return 1.0
        if self.is_quadric:
            return self._det * unit_ball_volume(n - 1) * float(np.linalg.norm(self.shape_inv @ u))
        if self.facet_areas is None:
            raise DomainError("facet areas are only available for polytopes in dimension <= 3")
        return 0.5 * float(np.dot(np.abs(self.normals @ u), self.facet_areas))

    # -- transformations ------------------------------------------------------

    def translate(self, v) -> "ConvexBody":
        v = np.asarray(v, dtype=float).reshape(self.dimension)
        if self.kind == "ball":
            return ball(self.center + v, self.radius)
        if self.kind == "ellipsoid":
            return ellipsoid(self.center + v, self.shape)
        return polytope(self.vertices + v)

    def dilate(self, lam: float) -> "ConvexBody":
        """lam * K about the origin, lam > 0."""
        lam = float(lam)
        if lam <= 0:
            raise DomainError("dilation factor must be positive")
        if self.kind == "ball":
            return ball(lam * self.center, lam * self.radius)
        if self.kind == "ellipsoid":
            return ellipsoid(lam * self.center, lam * self.shape)
        return polytope(lam * self.vertices)

    def linear_image(self, mat) -> "ConvexBody":
        n = self.dimension
        mat = np.asarray(mat, dtype=float).reshape(n, n)
        det = float(np.linalg.det(mat))
        if abs(det) < 1e-14 * max(1.0, np.abs(mat).max() ** n):
            raise DomainError("linear map is singular")
        if self.kind == "polytope":
            return polytope(self.vertices @ mat.T)
        a2 = mat @ self.shape @ self.shape @ mat.T
        new_center = mat @ self.center
        scale = float(np.trace(a2)) / n
        if np.allclose(a2, scale * np.eye(n), rtol=0, atol=1e-14 * scale):
            return ball(new_center, math.sqrt(scale))
        return ellipsoid(new_center, _sqrtm_spd(a2))

    def difference_body(self) -> "ConvexBody":
        n = self.dimension
        if self.kind == "ball":
            return ball(np.zeros(n), 2.0 * self.radius)
        if self.kind == "ellipsoid":
            return ellipsoid(np.zeros(n), 2.0 * self.shape)
        v = self.vertices
        diffs = (v[:, None, :] - v[None, :, :]).reshape(-1, n)
        return polytope(diffs)

    def schwarz_set(self) -> "ConvexBody":
        n = self.dimension
        return ball(np.zeros(n), (self.volume() / unit_ball_volume(n)) ** (1.0 / n))

    # -- sampling ----------------------------------------------------------------

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.is_quadric:
            half = np.sqrt((self.shape**2).sum(axis=1))
            return self.center - half, self.center + half
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def sample_uniform(self, rng: np.random.Generator, size: int) -> np.ndarray:
        n = self.dimension
        if self.is_quadric:
            if n == 1:
                y = rng.uniform(-1.0, 1.0, (size, 1))
            else:
                g = rng.standard_normal((size, n))
                g /= np.linalg.norm(g, axis=1)[:, None]
                y = g * rng.random(size)[:, None] ** (1.0 / n)
            return self.center + y @ self.shape.T
        lo, hi = self.bounding_box()
        out = np.empty((0, n))
        frac = max(self.volume() / float(np.prod(hi - lo)), 1e-3)
        while len(out) < size:
            need = size - len(out)
            draw = int(need / frac * 1.2) + 16
            cand = lo + (hi - lo) * rng.random((draw, n))
            out = np.vstack([out, cand[self.contains(cand, tol=0.0)]])
        return out[:size]

    # -- covariogram ---------------------------------------------------------------

    def covariogram(self, x) -> float:
        """|K cap (K + x)|, exact for n <= 3 and for quadrics in any dimension."""
        x = np.asarray(x, dtype=float).reshape(self.dimension)
        n = self.dimension
        if self.is_quadric:
            d = float(np.linalg.norm(self.shape_inv @ x))
            return self._det * _unit_ball_covariogram(n, d)
        if n == 1:
            return max(self._volume - abs(float(x[0])), 0.0)
        if n == 2:
            return _polygon_overlap(self.vertices, self.normals, self.offsets, x)
        if n == 3:
            return _polyhedron_overlap(self.faces, self.normals, self.offsets, x)
        est = covariogram_mc(self, x, samples=200_000, seed=0)
        return est.value

    def ray_profile(self, u) -> "RayProfile":
        return RayProfile.build(self, u)

    # -- serialisation ----------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}
        if self.kind == "ellipsoid":
            return {"kind": "ellipsoid", "center": self.center.tolist(), "shape": self.shape.tolist()}
        return {"kind": "polytope", "vertices": self.vertices.tolist()}


# ---------------------------------------------------------------------------
# factories


def ball(center, radius: float) -> ConvexBody:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return ConvexBody("ball", len(center), center=center, radius=radius)


def ellipsoid(center, shape) -> ConvexBody:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return ConvexBody("ellipsoid", len(center), center=center, shape=shape)


def polytope(vertices) -> ConvexBody:
    pts = _as_points(vertices)
    return ConvexBody("polytope", pts.shape[1], vertices=pts)


def interval(lo: float, hi: float) -> ConvexBody:
    return polytope([[lo], [hi]])


def simplex(n: int, centred: bool = False) -> ConvexBody:
    """Standard simplex conv{0, e_1, ..., e_n}, optionally shifted to its centroid."""
    verts = np.vstack([np.zeros(n), np.eye(n)])
    if centred:
        verts = verts - verts.mean(axis=0)
    return polytope(verts)


def cube(n: int, side: float = 1.0, centred: bool = True) -> ConvexBody:
    corners = np.array(np.meshgrid(*[[0.0, side]] * n, indexing="ij")).reshape(n, -1).T
    if centred:
        corners = corners - side / 2.0
    return polytope(corners)


def regular_polygon(m: int, radius: float = 1.0, phase: float = 0.0) -> ConvexBody:
    th = phase + 2.0 * math.pi * np.arange(m) / m
    return polytope(np.column_stack([radius * np.cos(th), radius * np.sin(th)]))


def body_from_dict(spec: dict) -> ConvexBody:
    """Build a body from its JSON description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("body description needs a 'kind'")
    kind = spec["kind"]
    if kind == "ball":
        return ball(spec.get("center", [0.0, 0.0]), spec.get("radius", 1.0))
    if kind == "ellipsoid":
        shape = np.asarray(spec["shape"], dtype=float)
        return ellipsoid(spec.get("center", [0.0] * len(shape)), shape)
    if kind in ("polytope", "simplex"):
        if "vertices" not in spec:
            raise DomainError("polytope description needs 'vertices'")
        return polytope(spec["vertices"])
    raise DomainError(f"unknown body kind {kind!r}")


# ---------------------------------------------------------------------------
# module-level operations


def gauge(K: ConvexBody, x) -> float:
    return K.gauge(x)


def radial(K: ConvexBody, x0, u) -> float:
    return K.radial(x0, u)


def volume(K: ConvexBody) -> float:
    return K.volume()


def covariogram(K: ConvexBody, x) -> float:
    return K.covariogram(x)


def difference_body(K: ConvexBody) -> ConvexBody:
    return K.difference_body()


def schwarz_set(K: ConvexBody) -> ConvexBody:
    return K.schwarz_set()


def linear_image(K: ConvexBody, M) -> ConvexBody:
    return K.linear_image(M)


def covariogram_mc(K: ConvexBody, x, samples: int = 100_000, seed: int = 0) -> McEstimate:
    """Membership-sampling estimate of |K cap (K + x)| with its standard error."""
    x = np.asarray(x, dtype=float).reshape(K.dimension)
    rng = substream(seed, 7, K.dimension)
    pts = K.sample_uniform(rng, samples)
    hit = K.contains(pts - x, tol=0.0).astype(float)
    p = float(hit.mean())
    vol = K.volume()
    return McEstimate(vol * p, vol * math.sqrt(max(p * (1 - p), 0.0) / samples), samples, seed)


# ---------------------------------------------------------------------------
# exact overlap volumes


def _unit_ball_covariogram(n: int, d: float) -> float:
    """|B cap (B + x)| for the unit ball and |x| = d."""
    d = abs(d)
    if d >= 2.0:
        return 0.0
    if n == 1:
        return 2.0 - d
    if n == 2:
        h = 0.5 * d
        return 2.0 * math.acos(h) - 2.0 * h * math.sqrt(max(1.0 - h * h, 0.0))
    if n == 3:
        return math.pi * (4.0 + d) * (2.0 - d) ** 2 / 12.0
    # two caps: 2 omega_{n-1} times the integral of (1 - h^2)^{(n-1)/2} over [d/2, 1]
    w = unit_ball_volume(n - 1)
    half = 0.5 * d
    res = integrate_algebraic(
        lambda h: (1.0 + h) ** ((n - 1) / 2.0), half, 1.0, right_exp=(n - 1) / 2.0
    ).value
    return 2.0 * w * res


def _unit_ball_covariogram_many(n: int, d: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(d, dtype=float))
    out = np.zeros_like(d)
    inside = d < 2.0
    dd = d[inside]
    if n == 1:
        out[inside] = 2.0 - dd
    elif n == 2:
        h = 0.5 * dd
        out[inside] = 2.0 * np.arccos(h) - 2.0 * h * np.sqrt(np.maximum(1.0 - h * h, 0.0))
    elif n == 3:
        out[inside] = math.pi * (4.0 + dd) * (2.0 - dd) ** 2 / 12.0
    else:
        out[inside] = [_unit_ball_covariogram(n, v) for v in dd]
    return out


def _clip_polygon(poly: list, a0: float, a1: float, b: float) -> list:
    """Sutherland-Hodgman: keep the part of ``poly`` with a . y <= b."""
    out = []
    m = len(poly)
    if m == 0:
        return out
    px, py = poly[-1]
    pv = a0 * px + a1 * py - b
    for cx, cy in poly:
        cv = a0 * cx + a1 * cy - b
        if cv <= 0.0:
            if pv > 0.0:
                s = pv / (pv - cv)
                out.append((px + s * (cx - px), py + s * (cy - py)))
            out.append((cx, cy))
        elif pv <= 0.0:
            s = pv / (pv - cv)
            out.append((px + s * (cx - px), py + s * (cy - py)))
        px, py, pv = cx, cy, cv
    return out


def _shoelace(poly: list) -> float:
    m = len(poly)
    if m < 3:
        return 0.0
    acc = 0.0
    for i in range(m):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % m]
        acc += x0 * y1 - x1 * y0
    return 0.5 * abs(acc)


def _polygon_overlap(vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray, x: np.ndarray) -> float:
    x0, x1 = float(x[0]), float(x[1])
    poly = [(float(v[0]), float(v[1])) for v in vertices]
    # clip K by each halfplane of K + x
    for (a0, a1), b in zip(normals.tolist(), offsets.tolist()):
        poly = _clip_polygon(poly, a0, a1, b + a0 * x0 + a1 * x1)
        if not poly:
            return 0.0
    return _shoelace(poly)


def _order_planar(points: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Order coplanar points counter-clockwise as seen from the side of ``normal``."""
    c = points.mean(axis=0)
    e1 = points[0] - c
    if np.linalg.norm(e1) < 1e-300:
        e1 = np.cross(normal, [1.0, 0.0, 0.0])
        if np.linalg.norm(e1) < 1e-6:
            e1 = np.cross(normal, [0.0, 1.0, 0.0])
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    rel = points - c
    ang = np.arctan2(rel @ e2, rel @ e1)
    return points[np.argsort(ang, kind="stable")]


def _polygon_area3(poly: np.ndarray) -> float:
    acc = np.zeros(3)
    for i in range(len(poly)):
        acc += np.cross(poly[i], poly[(i + 1) % len(poly)])
    return 0.5 * float(np.linalg.norm(acc))


def _clip_face3(face: list, a: np.ndarray, b: float, cut: list) -> list:
    out = []
    prev = face[-1]
    pv = float(a @ prev) - b
    for cur in face:
        cv = float(a @ cur) - b
        if cv <= 0.0:
            if pv > 0.0:
                s = pv / (pv - cv)
                p = prev + s * (cur - prev)
                out.append(p)
                cut.append(p)
            out.append(cur)
            if cv == 0.0:
                cut.append(cur)
        elif pv <= 0.0:
            s = pv / (pv - cv)
            p = prev + s * (cur - prev)
            out.append(p)
            cut.append(p)
        prev, pv = cur, cv
    return out


def _polyhedron_overlap(faces: list, normals: np.ndarray, offsets: np.ndarray, x: np.ndarray) -> float:
    polys = [list(np.asarray(f, dtype=float)) for f in faces]
    for a, b in zip(normals, offsets):
        bb = float(b + a @ x)
        if not any(float(a @ v) > bb + 1e-13 * max(1.0, abs(bb)) for f in polys for v in f):
            # nothing lies beyond this plane
            continue
        cut: list = []
        new_polys = []
        for face in polys:
            clipped = _clip_face3(face, a, bb, cut)
            if len(clipped) >= 3:
                new_polys.append(clipped)
        if not new_polys:
            return 0.0
        if len(cut) >= 3:
            pts = np.array(cut)
            keys = np.round(pts, 12)
            _, idx = np.unique(keys, axis=0, return_index=True)
            pts = pts[np.sort(idx)]
            if len(pts) >= 3:
                new_polys.append(list(_order_planar(pts, a)))
        polys = new_polys
    vol = 0.0
    for face in polys:
        p0 = face[0]
        for i in range(1, len(face) - 1):
            vol += float(np.dot(p0, np.cross(face[i], face[i + 1])))
    return max(vol / 6.0, 0.0)


# ---------------------------------------------------------------------------
# covariogram along a ray


class RayProfile:
    """t -> g_K(t u) on [0, end], with end = rho_{DK}(u).

    ``edges`` cut [0, end] into pieces on which the profile is smooth.  For
    polytopes each piece carries Chebyshev coefficients of the exact
    polynomial; for quadrics the closed form is used and ``sqrt_end`` marks
    the half-integer power behaviour at ``end``.
    """

    def __init__(self, dimension: int, value0: float, edges: np.ndarray, sqrt_end: bool, coeffs=None, quadric=None):
        self.dimension = dimension
        self.value0 = float(value0)
        self.edges = np.asarray(edges, dtype=float)
        self.end = float(self.edges[-1])
        self.sqrt_end = sqrt_end
        self._coeffs = coeffs
        self._quadric = quadric

    @classmethod
    def build(cls, K: ConvexBody, u) -> "RayProfile":
        n = K.dimension
        u = np.asarray(u, dtype=float).reshape(n)
        u = u / np.linalg.norm(u)
        if K.is_quadric:
            speed = float(np.linalg.norm(K.shape_inv @ u))
            end = 2.0 / speed
            return cls(n, K.volume(), np.array([0.0, end]), n > 1, quadric=(K._det, speed))
        if n > 3:
            raise DomainError("exact ray profiles of polytopes need n <= 3")
        end = float(K.difference_body().radial_many(np.zeros(n), u[None, :])[0]) if n > 1 else K.volume()
        cands = _breakpoints(K, u, end)
        edges = [0.0] + [t for t in cands if 0.0 < t < end] + [end]
        edges = _dedupe(edges, 1e-12 * end)
        pieces = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            pieces.extend(_fit_piece(K, u, lo, hi, n, 0))
        new_edges = [pieces[0][0]] + [p[1] for p in pieces]
        coeffs = np.array([p[2] for p in pieces])
        return cls(n, K.volume(), np.array(new_edges), False, coeffs=coeffs)

    def __call__(self, t) -> np.ndarray:
        return self.evaluate(t)

    def evaluate(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros_like(t)
        inside = t < self.end
        tt = t[inside]
        if self._quadric is not None:
            det, speed = self._quadric
            out[inside] = det * _unit_ball_covariogram_many(self.dimension, tt * speed)
        else:
            idx = np.clip(np.searchsorted(self.edges, tt, side="right") - 1, 0, len(self._coeffs) - 1)
            lo = self.edges[idx]
            hi = self.edges[idx + 1]
            x = (2.0 * tt - lo - hi) / (hi - lo)
            c = self._coeffs[idx]
            # Clenshaw recurrence, vectorised across pieces
            b1 = np.zeros_like(x)
            b2 = np.zeros_like(x)
            for k in range(c.shape[1] - 1, 0, -1):
                b1, b2 = 2.0 * x * b1 - b2 + c[:, k], b1
            out[inside] = x * b1 - b2 + c[:, 0]
        return out[0] if scalar else out


def _dedupe(values: list, tol: float) -> list:
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] > tol:
            out.append(v)
        else:
            out[-1] = max(out[-1], v) if len(out) > 1 else out[-1]
    if out[-1] != values[-1]:
        out[-1] = values[-1]
    return out


def _breakpoints(K: ConvexBody, u: np.ndarray, end: float) -> list[float]:
    n = K.dimension
    if n == 1:
        return []
    rate = K.normals @ u
    slack = K.offsets[:, None] - K.normals @ K.vertices.T  # facet x vertex, >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = slack / np.abs(rate)[:, None]
    t = t[np.abs(rate) > 1e-14].ravel()
    cands = [float(v) for v in t if np.isfinite(v) and 0.0 < v < end]
    if n == 3 and K.edges:
        p = np.array([e[0] for e in K.edges])
        d = np.array([e[1] - e[0] for e in K.edges])
        m = len(p)
        i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        i, j = i.ravel(), j.ravel()
        mats = np.stack([d[i], -d[j], -np.broadcast_to(u, (len(i), 3))], axis=2)
        rhs = p[j] - p[i]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-12
        sol = np.linalg.solve(mats[ok], rhs[ok][:, :, None])[:, :, 0]
        good = (sol[:, 0] >= -1e-12) & (sol[:, 0] <= 1 + 1e-12) & (sol[:, 1] >= -1e-12) & (sol[:, 1] <= 1 + 1e-12)
        cands.extend(float(v) for v in sol[good, 2] if 0.0 < v < end)
    return sorted(cands)


def _cheb_points(lo: float, hi: float, count: int) -> np.ndarray:
    k = np.arange(count)
    x = np.cos((2 * k + 1) * math.pi / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x


def _fit_piece(K: ConvexBody, u: np.ndarray, lo: float, hi: float, deg: int, depth: int) -> list:
    ts = _cheb_points(lo, hi, deg + 1)
    vals = np.array([K.covariogram(t * u) for t in ts])
    xs = (2.0 * ts - lo - hi) / (hi - lo)
    coef = np.polynomial.chebyshev.chebfit(xs, vals, deg)
    # one extra point confirms the piece really is polynomial
    probe = lo + 0.3183098861837907 * (hi - lo)
    expect = K.covariogram(probe * u)
    got = np.polynomial.chebyshev.chebval((2.0 * probe - lo - hi) / (hi - lo), coef)
    if abs(got - expect) > 1e-10 * K.volume() and depth < 30:
        mid = 0.5 * (lo + hi)
        return _fit_piece(K, u, lo, mid, deg, depth + 1) + _fit_piece(K, u, mid, hi, deg, depth + 1)
    return [(lo, hi, coef)]


@lru_cache(maxsize=256)
def ray_profiles(K: ConvexBody, grid: DirectionGrid) -> tuple[RayProfile, ...]:
    """Ray profiles of K for every direction of ``grid`` (cached)."""
    if grid.n != K.dimension:
        raise DomainError("grid and body dimensions differ")
    return tuple(RayProfile.build(K, u) for u in grid.points)

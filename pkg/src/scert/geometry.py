"""Convex-body algebra for gradient sets and perturbation regions.

Bodies are represented canonically through their support function
``rho(S, u) = sup_{c in S} c.u``; explicit halfspace representations are
derived only for bodies reducible to finite point sets.  All values are
immutable after construction and every operation is a pure function, so
bodies and regions can be shared freely across workers.

Supported body variants:

* :class:`FinitePoints` — a nonempty point cloud (its convex hull).
* :class:`LpBall` — an l_p ball with 1 <= p <= inf, radius >= 0, a center.
* :class:`Ellipsoid` — an origin-centered ellipsoidal ball whose support is
  ``radius * sqrt(u' Sigma u)`` for a symmetric positive-definite Sigma.
* :class:`Combination` — a formal nonnegative-weighted Minkowski combination
  of bodies, with optional per-term negation.  Expansion to explicit points
  happens lazily, capped at :data:`MAX_EXPANSION` points and hull-pruned
  after every pairwise step in 2D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _simplex
from ._simplex import SimplexResult

TOL = 1e-9            # exact-geometry comparisons
STRICT_MARGIN = 1e-6  # strictness margins for proper-inclusion tests
MAX_EXPANSION = 10_000


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and convert a coordinate sequence to a float vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("a vector must be a one-dimensional sequence of length >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector coordinates must be finite")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def dual_exponent(p: float) -> float:
    """Holder conjugate q of p, with the p = 1 and p = inf endpoints explicit."""
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    if p <= 1.0:
        raise ValueError("p must lie in [1, inf]")
    return p / (p - 1.0)


class ConvexBody:
    """Base class; concrete variants implement ``support``."""

    dim: int

    def support(self, direction: np.ndarray) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class FinitePoints(ConvexBody):
    points: np.ndarray  # (n, d)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ValueError("a finite point set must be nonempty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", _freeze(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def support(self, direction: np.ndarray) -> float:
        d = as_vector(direction, self.dim)
        return float(np.max(self.points @ d))


@dataclass(frozen=True)
class LpBall(ConvexBody):
    p: float
    radius: float
    center: np.ndarray

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise ValueError("p must lie in [1, inf]")
        if not (self.radius >= 0.0) or not np.isfinite(self.radius):
            raise ValueError("radius must be a finite nonnegative real")
        object.__setattr__(self, "center", _freeze(as_vector(self.center)))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def dual_p(self) -> float:
        return dual_exponent(self.p)

    def support(self, direction: np.ndarray) -> float:
        d = as_vector(direction, self.dim)
        return float(self.center @ d + self.radius * np.linalg.norm(d, ord=self.dual_p))


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    sigma: np.ndarray  # (d, d) symmetric positive definite
    radius: float

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if s.shape[0] != s.shape[1]:
            raise ValueError("sigma must be square")
        if not np.allclose(s, s.T, atol=1e-9):
            raise ValueError("sigma must be symmetric")
        try:
            np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            raise ValueError("sigma must be positive definite") from None
        if not (self.radius >= 0.0) or not np.isfinite(self.radius):
            raise ValueError("radius must be a finite nonnegative real")
        object.__setattr__(self, "sigma", _freeze(s))

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    def support(self, direction: np.ndarray) -> float:
        d = as_vector(direction, self.dim)
        return float(self.radius * math.sqrt(max(d @ self.sigma @ d, 0.0)))


@dataclass(frozen=True)
class Combination(ConvexBody):
    """Formal weighted Minkowski combination: sum_k coeff_k * (+-body_k)."""

    terms: tuple[tuple[float, ConvexBody, bool], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a combination needs at least one term")
        norm_terms = []
        dims = set()
        for coeff, body, negated in self.terms:
            if coeff < 0.0 or not np.isfinite(coeff):
                raise ValueError("combination coefficients must be nonnegative reals")
            dims.add(body.dim)
            norm_terms.append((float(coeff), body, bool(negated)))
        if len(dims) != 1:
            raise ValueError("all combination terms must share one dimension")
        object.__setattr__(self, "terms", tuple(norm_terms))

    @property
    def dim(self) -> int:
        return self.terms[0][1].dim

    def support(self, direction: np.ndarray) -> float:
        d = as_vector(direction, self.dim)
        total = 0.0
        for coeff, body, negated in self.terms:
            total += coeff * body.support(-d if negated else d)
        return float(total)


@dataclass(frozen=True)
class WholeSpace:
    """Explicit marker for an unconstrained (whole-space) region."""

    dim: int


def support(body: ConvexBody, direction) -> float:
    """Largest first-order change achievable in the given direction."""
    return body.support(as_vector(direction, body.dim))


def negate(body: ConvexBody) -> ConvexBody:
    """Body whose support satisfies support(-S, u) = support(S, -u)."""
    if isinstance(body, FinitePoints):
        return FinitePoints(-body.points)
    if isinstance(body, LpBall):
        return LpBall(body.p, body.radius, -body.center)
    if isinstance(body, Ellipsoid):
        return body
    if isinstance(body, Combination):
        return Combination(tuple((c, b, not neg) for c, b, neg in body.terms))
    raise TypeError(f"unknown body variant: {type(body).__name__}")


def scale(alpha: float, body: ConvexBody) -> ConvexBody:
    """Positive-homogeneous scaling: support(alpha*S, u) = alpha*support(S, u)."""
    if alpha < 0.0 or not np.isfinite(alpha):
        raise ValueError("scale factor must be a nonnegative real")
    if isinstance(body, FinitePoints):
        return FinitePoints(alpha * body.points)
    if isinstance(body, LpBall):
        return LpBall(body.p, alpha * body.radius, alpha * body.center)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(body.sigma, alpha * body.radius)
    if isinstance(body, Combination):
        return Combination(tuple((alpha * c, b, neg) for c, b, neg in body.terms))
    raise TypeError(f"unknown body variant: {type(body).__name__}")


def _pairwise_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] * b.shape[0] > MAX_EXPANSION:
        raise ValueError(
            f"point expansion exceeds the {MAX_EXPANSION}-point cap; "
            "keep bodies hull-pruned or stay with the formal combination"
        )
    return (a[:, None, :] + b[None, :, :]).reshape(-1, a.shape[1])


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Minkowski sum; support functions add.  Closed forms where available."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch in Minkowski sum")
    if isinstance(a, FinitePoints) and isinstance(b, FinitePoints):
        # prune the operands first: the sum of hulls is the hull of the sum,
        # and it keeps the pairwise product small
        lhs = hull_prune(a).points
        rhs = hull_prune(b).points
        return hull_prune(FinitePoints(_pairwise_sum(lhs, rhs)))
    if isinstance(a, LpBall) and isinstance(b, LpBall):
        same_p = (math.isinf(a.p) and math.isinf(b.p)) or abs(a.p - b.p) < 1e-12
        if same_p:
            return LpBall(a.p, a.radius + b.radius, a.center + b.center)
    if isinstance(a, Ellipsoid) and isinstance(b, Ellipsoid):
        if np.allclose(a.sigma, b.sigma, atol=1e-12):
            return Ellipsoid(a.sigma, a.radius + b.radius)
    terms = []
    for body in (a, b):
        if isinstance(body, Combination):
            terms.extend(body.terms)
        else:
            terms.append((1.0, body, False))
    return Combination(tuple(terms))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points: np.ndarray) -> np.ndarray:
    """Monotone chain; extreme points in counterclockwise order."""
    pts = sorted(map(tuple, points))
    pts = [pts[i] for i in range(len(pts)) if i == 0 or pts[i] != pts[i - 1]]
    if len(pts) <= 2:
        return np.asarray(pts, dtype=float)

    def build(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 1e-12:
                chain.pop()
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if not hull:  # fully collinear input collapses the chains
        hull = [pts[0], pts[-1]]
    return np.asarray(hull, dtype=float)


def hull_prune(body: FinitePoints) -> FinitePoints:
    """Drop points that do not affect the support function.

    Exact in one and two dimensions (extreme points only; 2D output is in
    counterclockwise order); deduplication-only fallback in higher dimension.
    """
    pts = body.points
    if pts.shape[0] == 1:
        return body
    if body.dim == 1:
        return FinitePoints(np.array([[pts[:, 0].min()], [pts[:, 0].max()]]))
    if body.dim == 2:
        return FinitePoints(_hull_2d(pts))
    return FinitePoints(np.unique(pts, axis=0))


def to_finite_points(body: ConvexBody, cap: int = MAX_EXPANSION) -> np.ndarray:
    """Explicit generator points of a body, if it reduces to finitely many.

    Combinations of finite point sets are expanded to pairwise sums, pruning
    after every step; ball variants raise (use :func:`polar_dual_ball`).
    """
    if isinstance(body, FinitePoints):
        return hull_prune(body).points
    if isinstance(body, Combination):
        acc: np.ndarray | None = None
        for coeff, sub, negated in body.terms:
            pts = to_finite_points(sub, cap) * coeff
            if negated:
                pts = -pts
            if acc is None:
                acc = pts
            else:
                if acc.shape[0] * pts.shape[0] > cap:
                    raise ValueError(f"point expansion exceeds the {cap}-point cap")
                acc = _pairwise_sum(acc, pts)
            acc = hull_prune(FinitePoints(acc)).points
        assert acc is not None
        return acc
    raise ValueError(f"{type(body).__name__} does not reduce to a finite point set")


@dataclass(frozen=True)
class HalfspaceRegion:
    """Intersection of halfspaces {delta : normals[k].delta <= offsets[k]}."""

    normals: np.ndarray  # (m, d)
    offsets: np.ndarray  # (m,)
    dim: int

    def __post_init__(self):
        normals = np.asarray(self.normals, dtype=float).reshape(-1, self.dim)
        offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("each halfspace needs one normal and one offset")
        if not (np.all(np.isfinite(normals)) and np.all(np.isfinite(offsets))):
            raise ValueError("halfspace data must be finite")
        object.__setattr__(self, "normals", _freeze(normals))
        object.__setattr__(self, "offsets", _freeze(offsets))

    @property
    def n_halfspaces(self) -> int:
        return self.normals.shape[0]

    def contains(self, point, tol: float = TOL) -> bool:
        x = as_vector(point, self.dim)
        if self.n_halfspaces == 0:
            return True
        return bool(np.all(self.normals @ x <= self.offsets + tol))

    def intersect(self, other: "HalfspaceRegion") -> "HalfspaceRegion":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch in region intersection")
        return HalfspaceRegion(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
            self.dim,
        )

    def with_halfspace(self, normal, offset: float) -> "HalfspaceRegion":
        n = as_vector(normal, self.dim)
        return HalfspaceRegion(
            np.vstack([self.normals, n[None, :]]),
            np.concatenate([self.offsets, [float(offset)]]),
            self.dim,
        )


def whole_region(dim: int) -> HalfspaceRegion:
    return HalfspaceRegion(np.zeros((0, dim)), np.zeros(0), dim)


def polar_hrep(body: ConvexBody, r: float) -> HalfspaceRegion:
    """Halfspace representation of {delta : support(S, delta) <= r}.

    One halfspace per generator point; the body must reduce to a finite
    point set.
    """
    if r < 0.0 or not np.isfinite(r):
        raise ValueError("polar radius must be a nonnegative real")
    pts = to_finite_points(body)
    keep = np.linalg.norm(pts, axis=1) > 1e-15
    pts = pts[keep] if keep.any() else pts[:0]
    return HalfspaceRegion(pts, np.full(pts.shape[0], float(r)), body.dim)


def polar_dual_ball(body: ConvexBody, r: float) -> ConvexBody | WholeSpace:
    """Polar set of an origin-centered ball: the dual-shape ball of radius r/eps."""
    if r < 0.0 or not np.isfinite(r):
        raise ValueError("polar radius must be a nonnegative real")
    if isinstance(body, LpBall):
        if np.any(np.abs(body.center) > 1e-12):
            raise ValueError("polar_dual_ball needs an origin-centered ball")
        if body.radius == 0.0:
            return WholeSpace(body.dim)
        return LpBall(body.dual_p, r / body.radius, np.zeros(body.dim))
    if isinstance(body, Ellipsoid):
        if body.radius == 0.0:
            return WholeSpace(body.dim)
        inv = np.linalg.inv(body.sigma)
        return Ellipsoid((inv + inv.T) / 2.0, r / body.radius)
    raise ValueError("polar_dual_ball applies to ball variants only")


def lp_maximize(objective, region: HalfspaceRegion) -> SimplexResult:
    """Exact maximum of objective.delta over the region (or unboundedness).

    Two-phase dense simplex with Bland's anti-cycling rule; an infeasible
    region is reported distinctly (it cannot arise from polar constructions).
    """
    c = as_vector(objective, region.dim)
    if region.n_halfspaces == 0:
        return _simplex.maximize(c, np.zeros((0, region.dim)), np.zeros(0))
    return _simplex.maximize(c, region.normals, region.offsets)


def region_subset(a: HalfspaceRegion, b: HalfspaceRegion, slack: float = TOL) -> bool:
    """True iff a is contained in b, decided exactly by one LP per halfspace of b.

    An empty `a` is a subset of anything; an unbounded maximum over `a`
    falsifies containment.
    """
    if a.dim != b.dim:
        raise ValueError("dimension mismatch in containment test")
    for normal, offset in zip(b.normals, b.offsets):
        if np.linalg.norm(normal) <= 1e-15:
            if offset >= -slack:
                continue
            # b is empty: only an empty a can be contained
            return lp_maximize(np.zeros(a.dim), a).status == _simplex.INFEASIBLE
        res = lp_maximize(normal, a)
        if res.status == _simplex.INFEASIBLE:
            return True
        if res.status == _simplex.UNBOUNDED or res.value > offset + slack:
            return False
    return True


def region_exceeds(a: HalfspaceRegion, b: HalfspaceRegion,
                   margin: float = STRICT_MARGIN) -> bool:
    """True iff some point of a violates a halfspace of b by more than margin."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch in containment test")
    for normal, offset in zip(b.normals, b.offsets):
        if np.linalg.norm(normal) <= 1e-15:
            continue
        res = lp_maximize(normal, a)
        if res.status == _simplex.INFEASIBLE:
            return False
        if res.status == _simplex.UNBOUNDED or res.value > offset + margin:
            return True
    return False


def region_minus_subset(a: HalfspaceRegion, carve: HalfspaceRegion,
                        b: HalfspaceRegion, slack: float = TOL) -> bool:
    """True iff a \\ carve is contained in b (up to the slack tolerance).

    The complement of `carve` is decomposed along its own halfspaces: for
    every halfspace (v, c) the convex piece a intersected with
    {v.delta >= c + slack} must be a subset of b.  The slack keeps the
    closed pieces off carve's own boundary, so a \\ a correctly comes out
    empty.
    """
    if not (a.dim == carve.dim == b.dim):
        raise ValueError("dimension mismatch in containment test")
    for normal, offset in zip(carve.normals, carve.offsets):
        piece = a.with_halfspace(-normal, -(float(offset) + slack))
        if not region_subset(piece, b, slack):
            return False
    return True


def region_is_origin_only(region: HalfspaceRegion, tol: float = TOL) -> bool:
    """True iff the region is pinched to the single point {0}."""
    for axis in range(region.dim):
        direction = np.zeros(region.dim)
        for sign in (1.0, -1.0):
            direction[axis] = sign
            res = lp_maximize(direction, region)
            if res.status != _simplex.OPTIMAL or abs(res.value) > tol:
                return False
        direction[axis] = 0.0
    return True


def region_to_interval(region: HalfspaceRegion) -> tuple[float | None, float | None]:
    """Endpoints of a one-dimensional region; None marks an unbounded side."""
    if region.dim != 1:
        raise ValueError("interval form is defined for one-dimensional regions")
    hi_res = lp_maximize(np.array([1.0]), region)
    lo_res = lp_maximize(np.array([-1.0]), region)
    if _simplex.INFEASIBLE in (hi_res.status, lo_res.status):
        raise ValueError("region is empty")
    hi = None if hi_res.status == _simplex.UNBOUNDED else float(hi_res.value)
    lo = None if lo_res.status == _simplex.UNBOUNDED else float(-lo_res.value)
    return lo, hi

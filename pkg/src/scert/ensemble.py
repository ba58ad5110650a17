"""Weighted ensembles: composition, regime classification, closed-form bounds.

An ensemble is a convex combination of member classifiers evaluated at one
input.  Its logits are the weighted logits; its smoothness composes as the
weighted Minkowski combination of the member gradient sets (per class in
class-wise mode, per ordered pair in class-difference mode).

Two regime taxonomies are computed:

* gap regimes — the ensemble runner-up gap against the best and worst member
  gaps ("gain" / "inconclusive" / "loss");
* certificate regimes — the ensemble certificate against the union and
  intersection of the member certificates ("improvement" = proper superset
  of the union, "inconclusive" = sandwiched, "reduction" = proper subset of
  the intersection, "indeterminate" otherwise).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .certificates import (
    Certificate,
    ClassDiff,
    ClassifierAtPoint,
    ClassWise,
    SmoothnessMismatch,
    Uniform,
    gaps,
    s_certificate,
)
from .geometry import (
    ConvexBody,
    Ellipsoid,
    HalfspaceRegion,
    LpBall,
    region_exceeds,
    region_minus_subset,
    region_subset,
)

GAP_TOL = 1e-9
STRICT_MARGIN = 1e-6


class PreconditionError(ValueError):
    """An operation's stated preconditions do not hold for this input."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Member classifiers with nonnegative weights (normalized to sum 1)."""

    members: tuple[ClassifierAtPoint, ...]
    weights: np.ndarray | None = None

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) < 2:
            raise ValueError("an ensemble needs at least two members")
        k = members[0].n_classes
        if any(m.n_classes != k for m in members):
            raise ValueError("all members must have the same class count")
        modes = {type(m.smoothness) for m in members}
        if len(modes) != 1:
            raise ValueError("all members must share one smoothness mode")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise ValueError("all members must share one input dimension")
        if self.weights is None:
            w = np.full(len(members), 1.0 / len(members))
        else:
            w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(members),):
            raise ValueError("one weight per member is required")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be nonnegative reals")
        total = w.sum()
        if total <= 0.0:
            raise ValueError("weights must not all be zero")
        w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "weights", w)

    @property
    def n_members(self) -> int:
        return len(self.members)

    @property
    def n_classes(self) -> int:
        return self.members[0].n_classes

    @property
    def same_top(self) -> bool:
        tops = {m.top for m in self.members}
        return len(tops) == 1

    @property
    def different_top(self) -> bool:
        return not self.same_top

    @property
    def same_runner_up(self) -> bool:
        seconds = {m.runner_up for m in self.members}
        return len(seconds) == 1


def ensemble_logits(spec: EnsembleSpec) -> np.ndarray:
    """Weighted member logits."""
    stacked = np.stack([m.logits for m in spec.members])
    return spec.weights @ stacked


def _compose_bodies(bodies: list[ConvexBody], weights: np.ndarray) -> ConvexBody:
    composed = geometry.scale(float(weights[0]), bodies[0])
    for w, body in zip(weights[1:], bodies[1:]):
        composed = geometry.minkowski_sum(composed, geometry.scale(float(w), body))
    return composed


def ensemble_classifier(spec: EnsembleSpec) -> ClassifierAtPoint:
    """The ensemble as a classifier: weighted logits, weighted Minkowski smoothness."""
    logits = ensemble_logits(spec)
    first = spec.members[0].smoothness
    if first is None:
        return ClassifierAtPoint(logits, None)
    if isinstance(first, Uniform):
        body = _compose_bodies([m.smoothness.body for m in spec.members], spec.weights)
        return ClassifierAtPoint(logits, Uniform(body))
    if isinstance(first, ClassWise):
        bodies = tuple(
            _compose_bodies([m.smoothness.bodies[i] for m in spec.members], spec.weights)
            for i in range(spec.n_classes)
        )
        return ClassifierAtPoint(logits, ClassWise(bodies))
    keys = set(first.pairs)
    for m in spec.members[1:]:
        keys &= set(m.smoothness.pairs)
    pairs = {
        key: _compose_bodies([m.smoothness.pairs[key] for m in spec.members], spec.weights)
        for key in keys
    }
    if not pairs:
        raise SmoothnessMismatch("members share no class-difference pairs")
    return ClassifierAtPoint(logits, ClassDiff(pairs))


@dataclass(frozen=True)
class RegimeReport:
    gap_regime: str   # "gain" | "inconclusive" | "loss"
    cert_regime: str  # "improvement" | "inconclusive" | "reduction" | "indeterminate"
    gap_ensemble: float
    gap_best: float
    gap_worst: float
    same_top: bool
    same_runner_up: bool
    evidence: dict = field(default_factory=dict)


def _member_mode(member: ClassifierAtPoint) -> str:
    s = member.smoothness
    if isinstance(s, Uniform):
        return "u"
    if isinstance(s, ClassWise):
        return "cw"
    if isinstance(s, ClassDiff):
        return "cd"
    raise SmoothnessMismatch("members carry no smoothness data")


def _ball_radius(cert: Certificate) -> float:
    return math.inf if cert.unbounded else float(cert.ball.radius)


def _cert_regime_balls(q_g: Certificate, member_certs: list[Certificate]) -> tuple[str, dict]:
    radii = tuple(_ball_radius(q) for q in member_certs)
    r_g = _ball_radius(q_g)
    lo, hi = min(radii), max(radii)
    evidence = {"method": "radii", "radius_ensemble": r_g,
                "radius_members": radii}
    if r_g > hi + STRICT_MARGIN:
        return "improvement", evidence
    if r_g < lo - STRICT_MARGIN:
        return "reduction", evidence
    if lo - GAP_TOL <= r_g <= hi + GAP_TOL:
        return "inconclusive", evidence
    return "indeterminate", evidence


def _ball_shape_of(cert: Certificate):
    if cert.ball is None:
        return None
    ball = cert.ball
    if isinstance(ball, LpBall):
        return ("lp", float(ball.p))
    return ("ellipsoid", tuple(np.round(
        ball.sigma / np.linalg.norm(ball.sigma), 10).ravel()))


def _beyond_union(g: HalfspaceRegion, q1: HalfspaceRegion, q2: HalfspaceRegion,
                  margin: float) -> bool:
    """True iff some point of g lies more than `margin` outside both q1 and q2."""
    if q1.n_halfspaces == 0 or q2.n_halfspaces == 0:
        return False
    for normal, offset in zip(q1.normals, q1.offsets):
        piece = g.with_halfspace(-normal, -(float(offset) + margin))
        if region_exceeds(piece, q2, margin):
            return True
    return False


def _cert_regime_regions(q_g: Certificate, q_1: Certificate, q_2: Certificate) -> tuple[str, dict]:
    g, r1, r2 = q_g.region, q_1.region, q_2.region
    inter = r1.intersect(r2)
    contains_inter = region_subset(inter, g)
    within_union = region_minus_subset(g, r1, r2)
    contains_union = region_subset(r1, g) and region_subset(r2, g)
    within_inter = region_subset(g, inter)
    evidence = {
        "method": "lp",
        "contains_intersection": contains_inter,
        "within_union": within_union,
        "contains_union": contains_union,
        "within_intersection": within_inter,
    }
    if contains_union and _beyond_union(g, r1, r2, STRICT_MARGIN):
        evidence["strict_excess"] = True
        return "improvement", evidence
    if within_inter and (region_exceeds(inter, g, STRICT_MARGIN)):
        evidence["strict_deficit"] = True
        return "reduction", evidence
    if contains_inter and within_union:
        return "inconclusive", evidence
    return "indeterminate", evidence


def _cert_regime_sampled(q_g: Certificate, q_1: Certificate, q_2: Certificate,
                         n_directions: int = 10_000, seed: int = 0) -> tuple[str, dict]:
    dim = q_g.dim
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_directions, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    e_g = np.array([q_g.ray_extent(u) for u in dirs])
    e_1 = np.array([q_1.ray_extent(u) for u in dirs])
    e_2 = np.array([q_2.ray_extent(u) for u in dirs])
    hi = np.maximum(e_1, e_2)
    lo = np.minimum(e_1, e_2)
    evidence = {"method": "sampled", "n_directions": n_directions}
    with np.errstate(invalid="ignore"):
        within_union = bool(np.all(e_g <= hi + GAP_TOL))
        contains_union = bool(np.all(e_g >= hi - GAP_TOL))
        contains_inter = bool(np.all(e_g >= lo - GAP_TOL))
        within_inter = bool(np.all(e_g <= lo + GAP_TOL))
        strict_excess = bool(np.any(e_g > hi + STRICT_MARGIN))
        strict_deficit = bool(np.any(e_g < lo - STRICT_MARGIN))
    evidence.update(within_union=within_union, contains_union=contains_union,
                    contains_intersection=contains_inter, within_intersection=within_inter)
    if contains_union and strict_excess:
        return "improvement", evidence
    if within_inter and strict_deficit:
        return "reduction", evidence
    if contains_inter and within_union:
        return "inconclusive", evidence
    return "indeterminate", evidence


def _cert_regime_pair(q_g: Certificate, q_1: Certificate, q_2: Certificate) -> tuple[str, dict]:
    certs = (q_g, q_1, q_2)
    if all(c.ball is not None or c.unbounded for c in certs):
        keys = {_ball_shape_of(c) for c in certs if c.ball is not None}
        if len(keys) <= 1:
            return _cert_regime_balls(q_g, [q_1, q_2])
    if all(c.region is not None for c in certs):
        return _cert_regime_regions(q_g, q_1, q_2)
    return _cert_regime_sampled(q_g, q_1, q_2)


def classify_regimes(spec: EnsembleSpec) -> RegimeReport:
    """Gap regime from the prediction gaps, certificate regime from geometry.

    The certificate regime is decided exactly for two members (shared-shape
    ball fast path for any member count, LP containment for halfspace
    certificates); other combinations fall back to a sampled-direction
    falsification flagged in the evidence.  For more than two members the
    members are folded pairwise left to right and the folded pair regimes
    are reported alongside the global gap regime.
    """
    member_gaps = np.array([m.gap for m in spec.members])
    r_best = float(member_gaps.max())
    r_worst = float(member_gaps.min())
    _, _, r_g_vec = gaps(ensemble_logits(spec))
    r_g = float(np.sort(r_g_vec)[1]) if r_g_vec.size > 1 else 0.0

    if r_g > r_best + GAP_TOL:
        gap_regime = "gain"
    elif r_g < r_worst - GAP_TOL:
        gap_regime = "loss"
    else:
        gap_regime = "inconclusive"

    evidence: dict = {}
    cert_regime = "indeterminate"
    if spec.members[0].smoothness is None:
        evidence["note"] = "no smoothness data; gap regime only"
    else:
        mode = _member_mode(spec.members[0])
        try:
            member_certs = [s_certificate(m, mode) for m in spec.members]
            q_g = s_certificate(ensemble_classifier(spec), mode)
            all_ball = all(c.ball is not None or c.unbounded
                           for c in member_certs + [q_g])
            keys = {_ball_shape_of(c) for c in member_certs + [q_g]
                    if c.ball is not None}
            if all_ball and len(keys) <= 1:
                cert_regime, evidence = _cert_regime_balls(q_g, member_certs)
                evidence["trivial_ensemble_certificate"] = q_g.trivial
            elif spec.n_members == 2:
                cert_regime, evidence = _cert_regime_pair(
                    q_g, member_certs[0], member_certs[1])
                evidence["trivial_ensemble_certificate"] = q_g.trivial
            else:
                folds = []
                acc_member = spec.members[0]
                acc_weight = float(spec.weights[0])
                for j in range(1, spec.n_members):
                    w_j = float(spec.weights[j])
                    pair = EnsembleSpec((acc_member, spec.members[j]),
                                        np.array([acc_weight, w_j]))
                    p_1 = s_certificate(pair.members[0], mode)
                    p_2 = s_certificate(pair.members[1], mode)
                    folded = ensemble_classifier(pair)
                    p_g = s_certificate(folded, mode)
                    regime, ev = _cert_regime_pair(p_g, p_1, p_2)
                    folds.append({"members": (0, j), "regime": regime, **ev})
                    acc_member = folded
                    acc_weight = acc_weight + w_j
                cert_regime = folds[-1]["regime"]
                evidence = {"method": "pairwise_fold", "folds": folds}
        except (SmoothnessMismatch, ValueError) as exc:
            evidence["error"] = str(exc)
            cert_regime = "indeterminate"

    return RegimeReport(
        gap_regime=gap_regime,
        cert_regime=cert_regime,
        gap_ensemble=r_g,
        gap_best=r_best,
        gap_worst=r_worst,
        same_top=spec.same_top,
        same_runner_up=spec.same_runner_up,
        evidence=evidence,
    )


def gap_gain_bound(r_best: float, k: int) -> float:
    """Upper bound on the ensemble runner-up gap given the best member gap.

    Valid for normalized members (per-member logits summing to one);
    monotone nondecreasing in both arguments.
    """
    if not (0.0 <= r_best <= 1.0):
        raise ValueError("the best member gap must lie in [0, 1]")
    if k < 2:
        raise ValueError("at least two classes are required")
    headroom = (1.0 - r_best) / 2.0
    return r_best + headroom - headroom / (k - 1)


def gap_bound_witness(r_best: float, k: int) -> EnsembleSpec:
    """An ensemble attaining gap_gain_bound(r_best, k) exactly.

    For k >= 3: k-1 members, member j putting (1-r)/2 on class j, the rest
    (after the shared top class k-1) zero; uniform weights.  For k == 2 the
    construction degenerates (binary ensembles cannot gain gap): two
    identical members whose gap is r_best.
    """
    if not (0.0 <= r_best <= 1.0):
        raise ValueError("the best member gap must lie in [0, 1]")
    if k < 2:
        raise ValueError("at least two classes are required")
    top_value = r_best + (1.0 - r_best) / 2.0
    side_value = (1.0 - r_best) / 2.0
    if k == 2:
        logits = np.array([side_value, top_value])
        member = ClassifierAtPoint(logits)
        return EnsembleSpec((member, member))
    members = []
    for j in range(k - 1):
        logits = np.zeros(k)
        logits[k - 1] = top_value
        logits[j] = side_value
        members.append(ClassifierAtPoint(logits))
    return EnsembleSpec(tuple(members))


def damning_alpha(f_1: ClassifierAtPoint, f_2: ClassifierAtPoint) -> float | None:
    """Mixing weight for member one that zeroes the ensemble gap.

    Requires the two members to have different top predictions.  Returns the
    crossing weight alpha* (ensemble = alpha* f_1 + (1 - alpha*) f_2); when a
    third class overtakes at the closed-form crossing, the switch point is
    located by bisection on the piecewise-linear argmax.  Returns None when
    the top-two confidences tie for every weight (the gap is zero for all
    alpha).
    """
    top_1, top_2 = f_1.top, f_2.top
    if top_1 == top_2:
        # Exactly tied members (zero-denominator mirrors) already have a zero
        # gap for every weight; deterministic tie-breaking parks their argmax
        # on the same index, so they surface here rather than below.
        if (f_1.gap <= 1e-12 and f_2.gap <= 1e-12
                and f_1.runner_up == f_2.runner_up):
            return None
        raise ValueError("members share the top prediction; no zero-gap mixture exists")
    d_1 = float(f_1.logits[top_1] - f_1.logits[top_2])
    d_2 = float(f_2.logits[top_2] - f_2.logits[top_1])
    if d_1 + d_2 <= 1e-12:
        return None
    alpha = d_2 / (d_1 + d_2)
    mixed = alpha * f_1.logits + (1.0 - alpha) * f_2.logits
    others = [mixed[c] for c in range(mixed.size) if c not in (top_1, top_2)]
    if not others or max(others) <= mixed[top_1] + 1e-12:
        return alpha

    def top_of(a: float) -> int:
        return int(gaps(a * f_1.logits + (1.0 - a) * f_2.logits)[0])

    lo, hi = 0.0, 1.0
    top_lo = top_of(lo)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if top_of(mid) == top_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundReport:
    value: float
    variant: str
    inputs: dict


def _pair_radii(member: ClassifierAtPoint, top: int) -> dict[int, float]:
    """Ball radii of the difference-smoothness bodies for pairs (i, top)."""
    s = member.smoothness
    k = member.n_classes
    radii: dict[int, float] = {}
    if isinstance(s, Uniform):
        for i in range(k):
            if i != top:
                radii[i] = 2.0 * float(s.body.radius)
    elif isinstance(s, ClassWise):
        for i in range(k):
            if i != top:
                radii[i] = float(s.bodies[i].radius) + float(s.bodies[top].radius)
    elif isinstance(s, ClassDiff):
        for i in range(k):
            if i != top:
                if (i, top) not in s.pairs:
                    raise SmoothnessMismatch(
                        f"missing class-difference body for pair ({i}, {top})")
                radii[i] = float(s.pairs[(i, top)].radius)
    else:
        raise SmoothnessMismatch("members carry no smoothness data")
    return radii


def _common_shape_or_raise(spec: EnsembleSpec) -> None:
    keys = set()
    for m in spec.members:
        s = m.smoothness
        if isinstance(s, Uniform):
            bodies = [s.body]
        elif isinstance(s, ClassWise):
            bodies = list(s.bodies)
        elif isinstance(s, ClassDiff):
            bodies = list(s.pairs.values())
        else:
            raise PreconditionError("members carry no smoothness data")
        for b in bodies:
            if not isinstance(b, (LpBall, Ellipsoid)):
                raise PreconditionError("smoothness bodies must be symmetric balls")
            if isinstance(b, LpBall) and np.any(np.abs(b.center) > 1e-12):
                raise PreconditionError("smoothness balls must be origin-centered")
            keys.add(("lp", float(b.p)) if isinstance(b, LpBall)
                     else ("ellipsoid", tuple(np.round(
                         b.sigma / np.linalg.norm(b.sigma), 12).ravel())))
    if len(keys) != 1:
        raise PreconditionError("smoothness bodies must share one ball shape")


def radius_improvement_bound(spec: EnsembleSpec) -> tuple[BoundReport, BoundReport]:
    """Closed-form cap on the certified-radius gain of a two-member ensemble.

    Needs two members with the same top prediction whose difference
    smoothness is a shared symmetric ball shape with per-pair radii
    eps[j][i].  With M_j = min_i eps[j][i] and
    delta = max_j max_i (eps[j][i] - M_j), the bound is

        1/M - min(gap_1, gap_2) / (M + delta)

    evaluated at M = min(M_1, M_2) ("statement" variant) and
    M = max(M_1, M_2) ("proof" variant); both are reported because the
    source of the formula disagrees between the two.
    """
    if spec.n_members != 2:
        raise PreconditionError("the radius improvement bound is for two members")
    if not spec.same_top:
        raise PreconditionError("members must share the top prediction")
    _common_shape_or_raise(spec)
    top = spec.members[0].top
    eps = [_pair_radii(m, top) for m in spec.members]
    if any(v <= 0.0 for table in eps for v in table.values()):
        raise PreconditionError("per-pair smoothness radii must be positive")
    m_values = [min(table.values()) for table in eps]
    delta = max(v - m_k for table, m_k in zip(eps, m_values) for v in table.values())
    min_gap = min(m.gap for m in spec.members)
    inputs = {"m1": m_values[0], "m2": m_values[1], "delta": delta, "min_gap": min_gap}

    def bound_at(m: float) -> float:
        return 1.0 / m - min_gap / (m + delta)

    statement = BoundReport(bound_at(min(m_values)), "statement", inputs)
    proof = BoundReport(bound_at(max(m_values)), "proof", inputs)
    return statement, proof


def common_shape_radii(spec: EnsembleSpec, alphas: np.ndarray) -> np.ndarray:
    """Certified radii of the two-member ensemble across mixing weights.

    For each alpha the certificate radius is
    min_i (alpha gap1_i + (1-alpha) gap2_i) / (alpha eps1_i + (1-alpha) eps2_i).
    Assumes the preconditions of :func:`radius_improvement_bound`.
    """
    top = spec.members[0].top
    eps = [_pair_radii(m, top) for m in spec.members]
    classes = sorted(eps[0])
    g1 = spec.members[0].gap_vector
    g2 = spec.members[1].gap_vector
    a = np.asarray(alphas, dtype=float)[:, None]
    gaps_grid = a * g1[classes][None, :] + (1 - a) * g2[classes][None, :]
    eps_grid = a * np.array([eps[0][i] for i in classes])[None, :] \
        + (1 - a) * np.array([eps[1][i] for i in classes])[None, :]
    return np.min(gaps_grid / eps_grid, axis=1)


def improvement_conditions(spec: EnsembleSpec) -> bool:
    """Sufficient conditions for a strict certified-radius gain.

    Preconditions (violations raise :class:`PreconditionError`, distinct from
    a False result): two members in the shared-ball-shape setting of
    :func:`radius_improvement_bound`, same top prediction, different
    runner-up predictions, and every remaining class scored below both
    members' runner-up confidences by both members.

    Returns True iff both cross conditions hold strictly: each member keeps
    a margin over the other member's runner-up class after rescaling by the
    smoothness ratio for that class.
    """
    if spec.n_members != 2:
        raise PreconditionError("the improvement conditions are for two members")
    if not spec.same_top:
        raise PreconditionError("members must share the top prediction")
    f_1, f_2 = spec.members
    if f_1.runner_up == f_2.runner_up:
        raise PreconditionError("members must have different runner-up predictions")
    _common_shape_or_raise(spec)
    top = f_1.top
    cb_1, cb_2 = f_1.runner_up, f_2.runner_up
    runner_floor = min(f_1.logits[cb_1], f_1.logits[cb_2],
                       f_2.logits[cb_1], f_2.logits[cb_2])
    for c in range(spec.n_classes):
        if c in (top, cb_1, cb_2):
            continue
        if max(f_1.logits[c], f_2.logits[c]) >= runner_floor:
            raise PreconditionError(
                "classes outside the top-two sets must have low confidences")
    eps_1 = _pair_radii(f_1, top)
    eps_2 = _pair_radii(f_2, top)
    lhs_1 = float(f_1.logits[top])
    rhs_1 = float(f_1.logits[cb_2]) + f_2.gap_vector[cb_2] * eps_1[cb_2] / eps_2[cb_2]
    lhs_2 = float(f_2.logits[top])
    rhs_2 = float(f_2.logits[cb_1]) + f_1.gap_vector[cb_1] * eps_2[cb_1] / eps_1[cb_1]
    return bool(lhs_1 > rhs_1 + GAP_TOL and lhs_2 > rhs_2 + GAP_TOL)


_GRID_DEFAULTS = {2: 1000, 3: 200, 4: 60}


@functools.lru_cache(maxsize=8)
def _simplex_grid(n: int, steps: int) -> np.ndarray:
    """All weight vectors with coordinates at multiples of 1/steps, in
    lexicographic order.  Cached (and frozen): the optimizer reuses one grid
    across every draw of a simulation run."""
    if n == 2:
        t = np.arange(steps + 1) / steps
        grid = np.column_stack([t, 1.0 - t])
    else:
        rows = []
        if n == 3:
            for i in range(steps + 1):
                for j in range(steps + 1 - i):
                    rows.append((i, j, steps - i - j))
        else:
            for i in range(steps + 1):
                for j in range(steps + 1 - i):
                    for k in range(steps + 1 - i - j):
                        rows.append((i, j, k, steps - i - j - k))
        grid = np.asarray(rows, dtype=float) / steps
    grid.flags.writeable = False
    return grid


def _gap_of_rows(logit_rows: np.ndarray) -> np.ndarray:
    """Runner-up gap of each row of logits."""
    part = np.partition(logit_rows, logit_rows.shape[1] - 2, axis=1)
    return part[:, -1] - part[:, -2]


def optimize_weights(spec: EnsembleSpec, resolution: int | None = None
                     ) -> tuple[np.ndarray, float]:
    """Grid search for the weights maximizing the ensemble runner-up gap.

    Scans the weight simplex at the given resolution (defaults: 1000 steps
    for two members, 200 per axis for three, 60 for four), then refines once
    around the incumbent at a ten times finer step.  Ties break toward the
    lexicographically smallest weight vector.
    """
    n = spec.n_members
    if n not in _GRID_DEFAULTS:
        raise ValueError("weight optimization supports 2 to 4 members")
    steps = resolution if resolution is not None else _GRID_DEFAULTS[n]
    logits = np.stack([m.logits for m in spec.members])

    def best_on(weights: np.ndarray) -> tuple[np.ndarray, float]:
        gaps_grid = _gap_of_rows(weights @ logits)
        idx = int(np.argmax(gaps_grid))
        return weights[idx], float(gaps_grid[idx])

    grid = _simplex_grid(n, steps)
    incumbent, value = best_on(grid)

    fine = 1.0 / (steps * 10)
    offsets = np.arange(-10, 11) * fine
    local = incumbent[None, :-1] + np.stack(
        np.meshgrid(*([offsets] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    local = local[np.all(local >= -1e-12, axis=1)]
    last = 1.0 - local.sum(axis=1)
    keep = last >= -1e-12
    local = np.column_stack([np.clip(local[keep], 0.0, 1.0),
                             np.clip(last[keep], 0.0, 1.0)])
    local /= local.sum(axis=1, keepdims=True)
    refined, refined_value = best_on(local)
    if refined_value > value + 1e-15:
        return refined, refined_value
    return incumbent, value

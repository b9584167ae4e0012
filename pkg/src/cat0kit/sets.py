"""Convex subsets and the metric projection onto them.

Projections are exact where a closed form exists (balls, subtrees, a single
halfspace), golden-section search on the strictly convex map
``lam -> d(x, lam*a (+) (1-lam)*b)**2`` for segments, and Dykstra's
alternating projections for Euclidean polyhedra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .core import Point, Space, combine
from .errors import InvalidSetError, ModelMismatchError, SamplingError, UnsupportedModelError
from .spaces import EuclideanSpace, TreeSpace, _rng

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

GOLDEN_TOL = 1e-12
GOLDEN_MAX_ITER = 200
DYKSTRA_TOL = 1e-10
DYKSTRA_MAX_SWEEPS = 10_000
REJECTION_MAX_PROPOSALS = 1_000_000
REJECTION_MIN_RATE = 1e-3


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float


@dataclass(frozen=True)
class Subtree:
    """Subtree spanned by a connected vertex set (vertices plus the edges between them)."""

    vertices: frozenset


@dataclass(frozen=True)
class Halfspaces:
    """Intersection of the halfspaces {y : normal . y <= offset} (Euclidean only)."""

    normals: tuple
    offsets: tuple


ConvexSet = Union[Segment, Ball, Subtree, Halfspaces]


@dataclass(frozen=True)
class ProjectionResult:
    point: Point
    distance: float
    iterations: int
    #: upper bound on d(point, true projection); 0 for closed forms
    residual: float


# ---------------------------------------------------------------- construction / checks


def halfspaces(rows: Sequence[tuple[Sequence[float], float]]) -> Halfspaces:
    normals = tuple(tuple(float(c) for c in a) for a, _ in rows)
    offsets = tuple(float(b) for _, b in rows)
    return Halfspaces(normals, offsets)


def check_set(space: Space, s: ConvexSet) -> None:
    """Validate ``s`` against ``space``; raises InvalidSetError or ModelMismatchError."""
    _check_set_cached(space, s)


@lru_cache(maxsize=256)
def _check_set_cached(space, s):
    if isinstance(s, Segment):
        space.check(s.a)
        space.check(s.b)
    elif isinstance(s, Ball):
        space.check(s.center)
        if not s.radius > 0:
            raise InvalidSetError(f"ball radius must be > 0, got {s.radius}")
    elif isinstance(s, Subtree):
        if not isinstance(space, TreeSpace):
            raise ModelMismatchError(f"subtree sets need a tree space, not {space.model!r}")
        _check_subtree(space, s)
    elif isinstance(s, Halfspaces):
        if not isinstance(space, EuclideanSpace):
            raise ModelMismatchError(f"halfspace sets need a euclidean space, not {space.model!r}")
        _check_halfspaces(space, s)
    else:
        raise InvalidSetError(f"unknown convex set {type(s).__name__}")


def _check_subtree(space: TreeSpace, s: Subtree) -> None:
    verts = s.vertices
    if not verts:
        raise InvalidSetError("subtree vertex set is empty")
    for v in verts:
        if not (isinstance(v, int) and 0 <= v < space.n_vertices):
            raise InvalidSetError(f"subtree vertex {v!r} out of range")
    start = next(iter(verts))
    seen, stack = {start}, [start]
    while stack:
        a = stack.pop()
        for u, v, _ in space.edges:
            for p, q in ((u, v), (v, u)):
                if p == a and q in verts and q not in seen:
                    seen.add(q)
                    stack.append(q)
    if seen != set(verts):
        raise InvalidSetError("subtree vertex set is not connected")


def _check_halfspaces(space: EuclideanSpace, s: Halfspaces) -> None:
    if not s.normals or len(s.normals) != len(s.offsets):
        raise InvalidSetError("halfspace intersection needs matching normals and offsets")
    A = np.asarray(s.normals, dtype=float)
    if A.shape[1] != space.dim:
        raise InvalidSetError(f"halfspace normals must have {space.dim} components")
    if np.any(np.linalg.norm(A, axis=1) == 0.0):
        raise InvalidSetError("halfspace normals must be nonzero")
    res = linprog(
        np.zeros(space.dim), A_ub=A, b_ub=np.asarray(s.offsets), bounds=[(None, None)] * space.dim
    )
    if res.status == 2:
        raise InvalidSetError("halfspace intersection is empty")


def _require_cat0(space: Space) -> None:
    if not space.cat0:
        raise UnsupportedModelError(
            f"metric projection needs a CAT(0) model; {space.model!r} is not one"
        )


# ---------------------------------------------------------------- membership


def excess(space: Space, s: ConvexSet, p: Point) -> float:
    """Quantity compared against ``tol`` by :func:`contains` (<= 0 inside C)."""
    space.check(p)
    if isinstance(s, Ball):
        return space._dist(p, s.center) - s.radius
    if isinstance(s, Halfspaces):
        x = np.asarray(p.coords)
        return max(
            (float(np.dot(a, x)) - b) / math.sqrt(sum(c * c for c in a))
            for a, b in zip(s.normals, s.offsets)
        )
    if isinstance(s, Segment):
        return project_segment(space, s, p).distance
    if isinstance(s, Subtree):
        return project_subtree(space, s, p).distance
    raise InvalidSetError(f"unknown convex set {type(s).__name__}")


def contains(space: Space, s: ConvexSet, p: Point, tol: float = 1e-9) -> bool:
    check_set(space, s)
    return excess(space, s, p) <= tol


# ---------------------------------------------------------------- projections


def golden_section(diff, lo: float, hi: float, tol: float = GOLDEN_TOL,
                   max_iter: int = GOLDEN_MAX_ITER):
    """Minimize a unimodal f on [lo, hi] given ``diff(s, t) = f(s) - f(t)``.

    Returns ``(lo, hi, iterations)`` for the final bracket.
    """
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    it = 0
    while hi - lo > tol and it < max_iter:
        it += 1
        if diff(c, d) < 0.0:
            hi, d = d, c
            c = hi - INV_PHI * (hi - lo)
        else:
            lo, c = c, d
            d = lo + INV_PHI * (hi - lo)
    return lo, hi, it


def project_segment(space: Space, s: Segment, x: Point) -> ProjectionResult:
    _require_cat0(space)
    space.check(x)
    a, b = s.a, s.b
    length = space._dist(a, b)
    if length == 0.0:
        return ProjectionResult(a, space._dist(x, a), 0, 0.0)
    diff = lambda l1, l2: space.segment_sqdist_diff(x, a, b, l1, l2)  # noqa: E731
    lo, hi, it = golden_section(diff, 0.0, 1.0)
    lam = 0.5 * (lo + hi)
    bound = 0.5 * (hi - lo) * length
    # a bracket still pinned to an end means the minimizer may be that endpoint
    for end in (e for e, pinned in ((0.0, lo == 0.0), (1.0, hi == 1.0)) if pinned):
        if diff(end, lam) <= 0.0:
            lam, bound = end, (hi - lo) * length
    u = combine(space, lam, a, b)
    return ProjectionResult(u, space._dist(x, u), it, bound)


def project_ball(space: Space, s: Ball, x: Point) -> ProjectionResult:
    _require_cat0(space)
    space.check(x)
    d = space._dist(x, s.center)
    if d <= s.radius:
        return ProjectionResult(x, 0.0, 0, 0.0)
    u = combine(space, s.radius / d, x, s.center)
    return ProjectionResult(u, space._dist(x, u), 0, 0.0)


def project_subtree(space: Space, s: Subtree, x: Point) -> ProjectionResult:
    """Gate of ``x`` in the subtree: the nearest subtree vertex when x is outside."""
    if not isinstance(space, TreeSpace):
        raise ModelMismatchError("subtree projection needs a tree space")
    space.check(x)
    loc = x.coords
    verts = s.vertices
    if loc.vertex >= 0:
        if loc.vertex in verts:
            return ProjectionResult(x, 0.0, 0, 0.0)
    else:
        u, v, _ = space.edges[loc.edge]
        if u in verts and v in verts:
            return ProjectionResult(x, 0.0, 0, 0.0)
    best, gate = math.inf, None
    for v in sorted(verts):
        p = Point("tree", type(loc)(vertex=v))
        d = space._dist(x, p)
        if d < best:
            best, gate = d, p
    return ProjectionResult(gate, best, 0, 0.0)


def project_halfspaces(space: Space, s: Halfspaces, x: Point) -> ProjectionResult:
    if not isinstance(space, EuclideanSpace):
        raise ModelMismatchError("halfspace projection needs a euclidean space")
    space.check(x)
    A = np.asarray(s.normals, dtype=float)
    b = np.asarray(s.offsets, dtype=float)
    sq = np.einsum("ij,ij->i", A, A)
    x0 = np.asarray(x.coords, dtype=float)

    def proj(i, y):
        viol = A[i] @ y - b[i]
        return y - (viol / sq[i]) * A[i] if viol > 0 else y

    if np.all(A @ x0 <= b):
        return ProjectionResult(x, 0.0, 0, 0.0)
    if len(b) == 1:
        u = Point("euclidean", tuple(proj(0, x0).tolist()))
        return ProjectionResult(u, space._dist(x, u), 1, 0.0)

    y = x0.copy()
    incr = np.zeros_like(A)
    step, sweeps = math.inf, 0
    while sweeps < DYKSTRA_MAX_SWEEPS:
        sweeps += 1
        prev = y
        for i in range(len(b)):
            z = y + incr[i]
            y = proj(i, z)
            incr[i] = z - y
        step = float(np.linalg.norm(y - prev))
        if step <= DYKSTRA_TOL:
            break
    u = Point("euclidean", tuple(y.tolist()))
    return ProjectionResult(u, space._dist(x, u), sweeps, step)


def project(space: Space, s: ConvexSet, x: Point) -> ProjectionResult:
    """Metric projection of ``x`` onto ``s``, dispatched on the set variant."""
    check_set(space, s)
    if isinstance(s, Segment):
        return project_segment(space, s, x)
    if isinstance(s, Ball):
        return project_ball(space, s, x)
    if isinstance(s, Subtree):
        return project_subtree(space, s, x)
    return project_halfspaces(space, s, x)


# ---------------------------------------------------------------- sampling


def sample_in_set(space: Space, s: ConvexSet, n: int, seed) -> list[Point]:
    """``n`` seeded points of ``s``; deterministic in ``seed``."""
    check_set(space, s)
    rng = _rng(seed)
    if isinstance(s, Segment):
        return [combine(space, lam, s.a, s.b) for lam in rng.uniform(0.0, 1.0, n).tolist()]
    if isinstance(s, Ball):
        targets = space.sample_many(rng, n)
        fracs = rng.uniform(0.0, 1.0, n).tolist()
        out = []
        for q, f in zip(targets, fracs):
            d = space._dist(s.center, q)
            if d == 0.0:
                out.append(s.center)
                continue
            # point on [center, q] at distance f*min(r, d) from the center
            out.append(combine(space, 1.0 - f * min(1.0, s.radius / d), s.center, q))
        return out
    if isinstance(s, Subtree):
        inner = [
            (i, e[2]) for i, e in enumerate(space.edges)
            if e[0] in s.vertices and e[1] in s.vertices
        ]
        if not inner:
            v = next(iter(s.vertices))
            return [space.vertex(v)] * n
        lengths = np.array([ln for _, ln in inner])
        pick = rng.choice(len(inner), size=n, p=lengths / lengths.sum()).tolist()
        fracs = rng.uniform(0.0, 1.0, n).tolist()
        return [space._canon(inner[k][0], f * inner[k][1]) for k, f in zip(pick, fracs)]
    return _reject_halfspaces(space, s, n, rng)


def _reject_halfspaces(space, s, n, rng):
    A = np.asarray(s.normals, dtype=float)
    b = np.asarray(s.offsets, dtype=float)
    batch = max(1000, 4 * n)
    accepted, proposals = [], 0
    while len(accepted) < n:
        cand = rng.uniform(-space.box, space.box, size=(batch, space.dim))
        proposals += batch
        ok = cand[np.all(cand @ A.T <= b, axis=1)]
        accepted.extend(ok.tolist())
        if proposals >= REJECTION_MAX_PROPOSALS and len(accepted) < REJECTION_MIN_RATE * proposals:
            raise SamplingError(
                f"rejection sampling starved: {len(accepted)} of {proposals} proposals accepted"
            )
    return [Point("euclidean", tuple(row)) for row in accepted[:n]]

"""Concrete geodesic model spaces, tree canonicalization and seeded sampling.

Four CAT(0) models (Euclidean space, the hyperboloid model of hyperbolic
space, finite metric trees, products of these) plus the round sphere, which
is kept as a positively curved control for the certifiers.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from operator import mul
from typing import NamedTuple, Sequence

import numpy as np

from .core import ATOL, Point, Space
from .errors import GeodesicError, InvalidPointError, InvalidSpaceError

DEFAULT_EUCLIDEAN_BOX = 5.0
DEFAULT_HYPERBOLOID_BOX = 2.0

# below this value of -<x,y>_M the arccosh formula loses digits; use the chord form
_HYP_NEAR = 1.5


# ---------------------------------------------------------------- seeding


@dataclass(frozen=True)
class SampleSeed:
    """A 64-bit seed plus a stream index.

    Equal ``(seed, stream)`` pairs give equal generators; distinct streams are
    statistically independent (numpy ``SeedSequence`` spawn keys).
    """

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream < 0:
            raise ValueError(f"stream index must be >= 0, got {self.stream}")

    def rng(self, *sub: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *sub))
        return np.random.Generator(np.random.PCG64(ss))


def as_seed(seed) -> SampleSeed:
    if isinstance(seed, SampleSeed):
        return seed
    return SampleSeed(int(seed))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return as_seed(seed).rng()


def sample_point(space: Space, seed) -> Point:
    """First point of the stream ``seed`` (a SampleSeed, int or Generator)."""
    return space.sample_many(_rng(seed), 1)[0]


def sample_points(space: Space, n: int, seed) -> list[Point]:
    return space.sample_many(_rng(seed), n)


# ---------------------------------------------------------------- euclidean


@dataclass(frozen=True)
class EuclideanSpace(Space):
    dim: int
    box: float = DEFAULT_EUCLIDEAN_BOX

    model = "euclidean"

    def __post_init__(self):
        _check_dim(self.dim)
        if not self.box > 0:
            raise InvalidSpaceError(f"box half-width must be > 0, got {self.box}")

    def point(self, coords: Sequence[float]) -> Point:
        p = Point("euclidean", tuple(float(c) for c in coords))
        self.check(p)
        return p

    def validate(self, p):
        if len(p.coords) != self.dim:
            raise InvalidPointError(
                f"expected {self.dim} coordinates, got {len(p.coords)}"
            )

    def _dist(self, x, y):
        return math.dist(x.coords, y.coords)

    def _combine(self, lam, x, y):
        mu = 1.0 - lam
        return Point("euclidean", tuple(lam * a + mu * b for a, b in zip(x.coords, y.coords)))

    def sqdist_diff(self, x, z1, z2):
        # |z1-x|^2 - |z2-x|^2 = (z1-z2).(z1+z2-2x)
        return sum(
            (a - b) * (a + b - 2.0 * c) for a, b, c in zip(z1.coords, z2.coords, x.coords)
        )

    def segment_sqdist_diff(self, x, a, b, l1, l2):
        # with u = a-b, w = b-x: f(lam) = lam^2 |u|^2 + 2 lam u.w + |w|^2
        uu = uw = 0.0
        for ac, bc, xc in zip(a.coords, b.coords, x.coords):
            u = ac - bc
            uu += u * u
            uw += u * (bc - xc)
        return (l1 - l2) * ((l1 + l2) * uu + 2.0 * uw)

    def sample_many(self, rng, n):
        arr = rng.uniform(-self.box, self.box, size=(n, self.dim))
        return [Point("euclidean", tuple(row)) for row in arr.tolist()]

    def to_config(self):
        cfg = {"model": "euclidean", "dim": self.dim}
        if self.box != DEFAULT_EUCLIDEAN_BOX:
            cfg["box"] = self.box
        return cfg


# ---------------------------------------------------------------- hyperboloid


def minkowski(x: Sequence[float], y: Sequence[float]) -> float:
    """Lorentzian form -x0*y0 + x1*y1 + ... + xn*yn."""
    return sum(map(mul, x[1:], y[1:])) - x[0] * y[0]


@dataclass(frozen=True)
class HyperboloidSpace(Space):
    """Upper sheet of <p,p>_M = -1 in R^(dim+1) with d = arccosh(-<x,y>_M)."""

    dim: int
    box: float = DEFAULT_HYPERBOLOID_BOX

    model = "hyperboloid"

    def __post_init__(self):
        _check_dim(self.dim)
        if not self.box > 0:
            raise InvalidSpaceError(f"box half-width must be > 0, got {self.box}")

    def lift(self, spatial: Sequence[float]) -> Point:
        """Point with the given last ``dim`` coordinates, x0 = sqrt(1 + |v|^2)."""
        v = tuple(float(c) for c in spatial)
        if len(v) != self.dim:
            raise InvalidPointError(f"expected {self.dim} spatial coordinates, got {len(v)}")
        return Point("hyperboloid", (math.sqrt(1.0 + sum(c * c for c in v)), *v))

    def exp0(self, tangent: Sequence[float]) -> Point:
        """Exponential map at the base point (1, 0, ..., 0)."""
        v = [float(c) for c in tangent]
        r = math.sqrt(sum(c * c for c in v))
        if r == 0.0:
            return Point("hyperboloid", (1.0, *([0.0] * self.dim)))
        s = math.sinh(r) / r
        return Point("hyperboloid", (math.cosh(r), *(s * c for c in v)))

    def point(self, coords: Sequence[float]) -> Point:
        p = Point("hyperboloid", tuple(float(c) for c in coords))
        self.check(p)
        return p

    def validate(self, p):
        c = p.coords
        if len(c) != self.dim + 1:
            raise InvalidPointError(
                f"expected {self.dim + 1} ambient coordinates, got {len(c)}"
            )
        if not c[0] > 0:
            raise InvalidPointError("hyperboloid point must have positive first coordinate")
        if abs(minkowski(c, c) + 1.0) > ATOL * (1.0 + c[0] * c[0]):
            raise InvalidPointError("hyperboloid point must satisfy <p,p>_M = -1")

    def _dist(self, x, y):
        a, b = x.coords, y.coords
        q = -minkowski(a, b)
        if q >= _HYP_NEAR:
            return math.acosh(q)
        # <x-y, x-y>_M = 2(q - 1) = 4 sinh^2(d/2); exact zero for equal points
        diff = [u - v for u, v in zip(a, b)]
        s = minkowski(diff, diff)
        if s <= 0.0:
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(s))

    def _combine(self, lam, x, y):
        d = self._dist(x, y)
        a, b = x.coords, y.coords
        if d < 1e-9:
            z = [lam * u + (1.0 - lam) * v for u, v in zip(a, b)]
        else:
            sd = math.sinh(d)
            cx = math.sinh(lam * d) / sd
            cy = math.sinh((1.0 - lam) * d) / sd
            z = [cx * u + cy * v for u, v in zip(a, b)]
        # pull back onto the sheet
        scale = 1.0 / math.sqrt(-minkowski(z, z))
        return Point("hyperboloid", tuple(scale * c for c in z))

    def sqdist_diff(self, x, z1, z2):
        d1 = self._dist(x, z1)
        d2 = self._dist(x, z2)
        a = x.coords
        q1 = -minkowski(a, z1.coords)
        q2 = -minkowski(a, z2.coords)
        if q1 < _HYP_NEAR or q2 < _HYP_NEAR:
            return d1 * d1 - d2 * d2
        dq = -minkowski(a, [u - v for u, v in zip(z1.coords, z2.coords)])
        s1 = math.sqrt(q1 * q1 - 1.0)
        s2 = math.sqrt(q2 * q2 - 1.0)
        dd = math.log1p(dq * (1.0 + (q1 + q2) / (s1 + s2)) / (q2 + s2))
        return dd * (d1 + d2)

    def sample_many(self, rng, n):
        v = rng.uniform(-self.box, self.box, size=(n, self.dim))
        r = np.linalg.norm(v, axis=1)
        safe = np.where(r > 0, r, 1.0)
        scale = np.where(r > 0, np.sinh(r) / safe, 1.0)
        pts = np.column_stack([np.cosh(r), v * scale[:, None]])
        # restore the constraint exactly in x0
        pts[:, 0] = np.sqrt(1.0 + np.sum(pts[:, 1:] ** 2, axis=1))
        return [Point("hyperboloid", tuple(row)) for row in pts.tolist()]

    def to_config(self):
        cfg = {"model": "hyperboloid", "dim": self.dim}
        if self.box != DEFAULT_HYPERBOLOID_BOX:
            cfg["box"] = self.box
        return cfg


# ---------------------------------------------------------------- sphere (control)


@dataclass(frozen=True)
class SphereSpace(Space):
    """Unit sphere S^dim in R^(dim+1); positively curved, so not CAT(0)."""

    dim: int

    model = "sphere"
    cat0 = False

    def __post_init__(self):
        _check_dim(self.dim)

    def point(self, coords: Sequence[float], normalize: bool = False) -> Point:
        c = tuple(float(v) for v in coords)
        if normalize:
            n = math.sqrt(sum(v * v for v in c))
            c = tuple(v / n for v in c)
        p = Point("sphere", c)
        self.check(p)
        return p

    def validate(self, p):
        c = p.coords
        if len(c) != self.dim + 1:
            raise InvalidPointError(f"expected {self.dim + 1} coordinates, got {len(c)}")
        if abs(math.sqrt(sum(v * v for v in c)) - 1.0) > ATOL:
            raise InvalidPointError("sphere point must have unit norm")

    def _dist(self, x, y):
        return 2.0 * math.asin(min(1.0, 0.5 * math.dist(x.coords, y.coords)))

    def _combine(self, lam, x, y):
        d = self._dist(x, y)
        if d >= math.pi - 1e-9:
            raise GeodesicError("antipodal points: the geodesic is not unique")
        a, b = x.coords, y.coords
        if d < 1e-9:
            z = [lam * u + (1.0 - lam) * v for u, v in zip(a, b)]
        else:
            sd = math.sin(d)
            cx = math.sin(lam * d) / sd
            cy = math.sin((1.0 - lam) * d) / sd
            z = [cx * u + cy * v for u, v in zip(a, b)]
        n = math.sqrt(sum(c * c for c in z))
        return Point("sphere", tuple(c / n for c in z))

    def sample_many(self, rng, n):
        g = rng.standard_normal(size=(n, self.dim + 1))
        g /= np.linalg.norm(g, axis=1)[:, None]
        return [Point("sphere", tuple(row)) for row in g.tolist()]

    def to_config(self):
        return {"model": "sphere", "dim": self.dim}


# ---------------------------------------------------------------- trees


class TreeLoc(NamedTuple):
    """Location in a metric tree.

    Vertex form: ``vertex >= 0`` and ``edge == -1``.  Edge form: ``vertex ==
    -1`` and ``offset`` measured from the tail of edge number ``edge``.
    """

    vertex: int = -1
    edge: int = -1
    offset: float = 0.0


@dataclass(frozen=True)
class TreeSpace(Space):
    """Finite metric tree; ``edges`` holds (tail, head, length) triples."""

    n_vertices: int
    edges: tuple
    # derived tables, filled in __post_init__
    table: tuple = field(init=False, repr=False, compare=False)
    _toward: tuple = field(init=False, repr=False, compare=False)
    _edge_of: dict = field(init=False, repr=False, compare=False, hash=False)

    model = "tree"

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise InvalidSpaceError("tree must have at least one vertex")
        edges = []
        for i, e in enumerate(self.edges):
            try:
                u, v, length = e
                u, v, length = int(u), int(v), float(length)
            except (TypeError, ValueError):
                raise InvalidSpaceError(f"edge {i}: expected (tail, head, length)") from None
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidSpaceError(f"edge {i}: vertex out of range 0..{n - 1}")
            if u == v:
                raise InvalidSpaceError(f"edge {i}: self-loop at vertex {u}")
            if not (length > 0 and math.isfinite(length)):
                raise InvalidSpaceError(f"edge {i}: length must be > 0, got {length}")
            edges.append((u, v, length))
        object.__setattr__(self, "edges", tuple(edges))

        # union-find catches cycles edge by edge
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, (u, v, _) in enumerate(edges):
            ru, rv = find(u), find(v)
            if ru == rv:
                raise InvalidSpaceError(f"cycle detected at edge {i} ({u}, {v})")
            parent[ru] = rv
        if len({find(a) for a in range(n)}) != 1:
            raise InvalidSpaceError("tree is disconnected")

        adj = [[] for _ in range(n)]
        edge_of = {}
        for i, (u, v, length) in enumerate(edges):
            adj[u].append((v, length))
            adj[v].append((u, length))
            edge_of[(u, v)] = (i, True)
            edge_of[(v, u)] = (i, False)

        # BFS from every root; toward[r][v] is v's neighbour on the path to r
        table, toward = [], []
        for r in range(n):
            dist_r = [0.0] * n
            nxt = [-1] * n
            seen = [False] * n
            seen[r] = True
            queue = deque([r])
            while queue:
                a = queue.popleft()
                for b, length in adj[a]:
                    if not seen[b]:
                        seen[b] = True
                        dist_r[b] = dist_r[a] + length
                        nxt[b] = a
                        queue.append(b)
            table.append(tuple(dist_r))
            toward.append(tuple(nxt))
        # make the table exactly symmetric
        table = tuple(
            tuple(table[min(i, j)][max(i, j)] for j in range(n)) for i in range(n)
        )
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_toward", tuple(toward))
        object.__setattr__(self, "_edge_of", edge_of)

    def __hash__(self):
        return hash((self.n_vertices, self.edges))

    # -- construction helpers

    def vertex(self, v: int) -> Point:
        p = Point("tree", TreeLoc(vertex=int(v)))
        self.check(p)
        return p

    def on_edge(self, u: int, v: int, offset: float) -> Point:
        """Point at distance ``offset`` from ``u`` on the edge joining u and v."""
        try:
            idx, forward = self._edge_of[(u, v)]
        except KeyError:
            raise InvalidPointError(f"no edge between vertices {u} and {v}") from None
        length = self.edges[idx][2]
        t = float(offset) if forward else length - float(offset)
        if not 0.0 <= t <= length:
            raise InvalidPointError(f"offset {offset} outside [0, {length}]")
        return self._canon(idx, t)

    def edge_index(self, u: int, v: int) -> tuple[int, bool]:
        return self._edge_of[(u, v)]

    def _canon(self, e: int, t: float) -> Point:
        u, v, length = self.edges[e]
        if t <= 0.0:
            return Point("tree", TreeLoc(vertex=u))
        if t >= length:
            return Point("tree", TreeLoc(vertex=v))
        return Point("tree", TreeLoc(edge=e, offset=t))

    def path(self, a: int, b: int) -> list[int]:
        """Vertex sequence of the unique path from a to b."""
        out = [a]
        step = self._toward[b]
        while a != b:
            a = step[a]
            out.append(a)
        return out

    # -- metric

    def validate(self, p):
        loc = p.coords
        if not isinstance(loc, TreeLoc):
            raise InvalidPointError("tree point coordinates must be a TreeLoc")
        if loc.vertex >= 0:
            if loc.vertex >= self.n_vertices or loc.edge != -1:
                raise InvalidPointError(f"invalid vertex reference {loc.vertex}")
        else:
            if not 0 <= loc.edge < len(self.edges):
                raise InvalidPointError(f"unknown edge reference {loc.edge}")
            length = self.edges[loc.edge][2]
            if not 0.0 <= loc.offset <= length:
                raise InvalidPointError(
                    f"offset {loc.offset} outside [0, {length}] on edge {loc.edge}"
                )

    def _anchors(self, loc):
        if loc.vertex >= 0:
            return ((loc.vertex, 0.0),)
        u, v, length = self.edges[loc.edge]
        return ((u, loc.offset), (v, length - loc.offset))

    def _dist(self, x, y):
        p, q = x.coords, y.coords
        if q < p:
            p, q = q, p
        if p.edge >= 0 and p.edge == q.edge:
            return abs(p.offset - q.offset)
        table = self.table
        best = math.inf
        for u, du in self._anchors(p):
            row = table[u]
            for v, dv in self._anchors(q):
                val = du + row[v] + dv
                if val < best:
                    best = val
        return best

    def _combine(self, lam, x, y):
        p, q = x.coords, y.coords
        if p.edge >= 0 and p.edge == q.edge:
            return self._canon(p.edge, lam * p.offset + (1.0 - lam) * q.offset)
        best, ends = math.inf, None
        for u, du in self._anchors(p):
            for v, dv in self._anchors(q):
                val = du + self.table[u][v] + dv
                if val < best:
                    best, ends = val, (u, v)
        u, v = ends
        # each leg is (edge, start offset, end offset) along the edge coordinate
        legs = []
        if p.edge >= 0:
            legs.append((p.edge, p.offset, 0.0 if self.edges[p.edge][0] == u else self.edges[p.edge][2]))
        verts = self.path(u, v)
        for a, b in zip(verts, verts[1:]):
            e, forward = self._edge_of[(a, b)]
            length = self.edges[e][2]
            legs.append((e, 0.0, length) if forward else (e, length, 0.0))
        if q.edge >= 0:
            legs.append((q.edge, 0.0 if self.edges[q.edge][0] == v else self.edges[q.edge][2], q.offset))
        remaining = (1.0 - lam) * best
        for e, start, end in legs:
            length = abs(end - start)
            if remaining <= length:
                return self._canon(e, start + math.copysign(remaining, end - start))
            remaining -= length
        return y

    def sample_many(self, rng, n):
        lengths = np.array([e[2] for e in self.edges])
        if len(lengths) == 0:
            return [Point("tree", TreeLoc(vertex=0))] * n
        idx = rng.choice(len(lengths), size=n, p=lengths / lengths.sum())
        frac = rng.uniform(0.0, 1.0, size=n)
        return [
            self._canon(e, f * self.edges[e][2])
            for e, f in zip(idx.tolist(), frac.tolist())
        ]

    def to_config(self):
        return {
            "model": "tree",
            "vertices": self.n_vertices,
            "edges": [[u, v, length] for u, v, length in self.edges],
        }


def canonicalize_tree_point(space: TreeSpace, p: Point) -> Point:
    """Rewrite endpoint offsets in vertex form; interior points are unchanged."""
    if not isinstance(space, TreeSpace):
        raise InvalidSpaceError("canonicalize_tree_point needs a tree space")
    space.check(p)
    loc = p.coords
    if loc.vertex >= 0:
        return p
    return space._canon(loc.edge, loc.offset)


def unit_star(leaves: int = 3, length: float = 1.0) -> TreeSpace:
    """Star with centre 0 and leaves 1..leaves; ``unit_star()`` is the unit tripod."""
    return TreeSpace(leaves + 1, tuple((0, i, length) for i in range(1, leaves + 1)))


# ---------------------------------------------------------------- products


@dataclass(frozen=True)
class ProductSpace(Space):
    """l2 product of CAT(0) factors with factor-wise geodesics."""

    factors: tuple

    model = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise InvalidSpaceError("product needs at least two factors")
        for i, f in enumerate(self.factors):
            if not isinstance(f, Space):
                raise InvalidSpaceError(f"factor {i} is not a space")
            if not f.cat0:
                raise InvalidSpaceError(
                    f"factor {i}: a {f.model} factor would make the product non-CAT(0)"
                )

    def point(self, parts: Sequence[Point]) -> Point:
        p = Point("product", tuple(parts))
        self.check(p)
        return p

    def validate(self, p):
        parts = p.coords
        if not isinstance(parts, tuple) or len(parts) != len(self.factors):
            raise InvalidPointError(f"expected {len(self.factors)} factor points")
        for f, part in zip(self.factors, parts):
            f.check(part)

    def _dist(self, x, y):
        return math.sqrt(
            sum(f._dist(a, b) ** 2 for f, a, b in zip(self.factors, x.coords, y.coords))
        )

    def _combine(self, lam, x, y):
        return Point(
            "product",
            tuple(f._combine(lam, a, b) for f, a, b in zip(self.factors, x.coords, y.coords)),
        )

    def sqdist_diff(self, x, z1, z2):
        return sum(
            f.sqdist_diff(a, b, c)
            for f, a, b, c in zip(self.factors, x.coords, z1.coords, z2.coords)
        )

    def segment_sqdist_diff(self, x, a, b, l1, l2):
        return sum(
            f.segment_sqdist_diff(xc, ac, bc, l1, l2)
            for f, xc, ac, bc in zip(self.factors, x.coords, a.coords, b.coords)
        )

    def sample_many(self, rng, n):
        cols = [f.sample_many(rng, n) for f in self.factors]
        return [Point("product", parts) for parts in zip(*cols)]

    def to_config(self):
        return {"model": "product", "factors": [f.to_config() for f in self.factors]}


# ---------------------------------------------------------------- construction


def _check_dim(dim):
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InvalidSpaceError(f"dimension must be an integer >= 1, got {dim!r}")


def build_space(config: dict) -> Space:
    """Build a validated space from its parameter record.

    >>> build_space({"model": "euclidean", "dim": 2})
    EuclideanSpace(dim=2, box=5.0)
    """
    if not isinstance(config, dict):
        raise InvalidSpaceError("space config must be a mapping")
    model = config.get("model")
    if model == "euclidean":
        return EuclideanSpace(config.get("dim"), float(config.get("box", DEFAULT_EUCLIDEAN_BOX)))
    if model == "hyperboloid":
        return HyperboloidSpace(
            config.get("dim"), float(config.get("box", DEFAULT_HYPERBOLOID_BOX))
        )
    if model == "sphere":
        return SphereSpace(config.get("dim"))
    if model == "tree":
        edges = config.get("edges", [])
        if not isinstance(edges, (list, tuple)):
            raise InvalidSpaceError("tree edges must be a list")
        n = config.get("vertices")
        if n is None:
            n = 1 + max((max(int(e[0]), int(e[1])) for e in edges), default=0)
        return TreeSpace(int(n), tuple(tuple(e) for e in edges))
    if model == "product":
        factors = config.get("factors")
        if not isinstance(factors, (list, tuple)):
            raise InvalidSpaceError("product factors must be a list")
        return ProductSpace(tuple(build_space(f) for f in factors))
    raise InvalidSpaceError(f"unknown model {model!r}")

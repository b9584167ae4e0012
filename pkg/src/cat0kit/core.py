"""Points, the space interface and the scalar formulas built on a metric.

Everything here is expressed through two primitives of a geodesic space,
the distance ``d`` and the geodesic combination ``lam*x (+) (1-lam)*y``.
Concrete models live in :mod:`cat0kit.spaces`.
"""
from __future__ import annotations

from typing import Any, NamedTuple

from .errors import GeodesicError, ModelMismatchError

# absolute tolerance, scaled by (1 + magnitude) where used
ATOL = 1e-9

MODELS = ("euclidean", "hyperboloid", "tree", "product", "sphere")


class Point(NamedTuple):
    """A model-tagged point.

    ``coords`` is a float tuple for euclidean/hyperboloid/sphere points, a
    :class:`~cat0kit.spaces.TreeLoc` for tree points and a tuple of factor
    points for product points.
    """

    model: str
    coords: Any


class OrientedPair(NamedTuple):
    """The ordered pair (tail, head), written ->ab with tail a and head b."""

    tail: Point
    head: Point


def pair(a: Point, b: Point) -> OrientedPair:
    return OrientedPair(a, b)


class Space:
    """Base class of the concrete geodesic spaces.

    Subclasses implement ``_dist``, ``_combine``, ``validate`` and
    ``sample_many``; the public helpers below add tag checks and the
    endpoint conventions shared by every model.
    """

    model: str = ""
    #: False only for the sphere control
    cat0: bool = True

    def validate(self, p: Point) -> None:
        raise NotImplementedError

    def _dist(self, x: Point, y: Point) -> float:
        raise NotImplementedError

    def _combine(self, lam: float, x: Point, y: Point) -> Point:
        raise NotImplementedError

    def sample_many(self, rng, n: int) -> list[Point]:
        raise NotImplementedError

    def sqdist_diff(self, x: Point, z1: Point, z2: Point) -> float:
        """Return d(x, z1)**2 - d(x, z2)**2.

        Models override this with a cancellation-free formula where one
        exists; golden-section search only needs its sign to be right.
        """
        return self._dist(x, z1) ** 2 - self._dist(x, z2) ** 2

    def segment_sqdist_diff(self, x: Point, a: Point, b: Point, l1: float, l2: float) -> float:
        """Return f(l1) - f(l2) for f(lam) = d(x, lam*a (+) (1-lam)*b)**2."""
        return self.sqdist_diff(x, self._combine(l1, a, b), self._combine(l2, a, b))

    def check(self, p: Point) -> None:
        if p.model != self.model:
            raise ModelMismatchError(
                f"point of model {p.model!r} used in a {self.model!r} space"
            )
        self.validate(p)


def dist(space: Space, x: Point, y: Point) -> float:
    """Metric distance d(x, y)."""
    space.check(x)
    space.check(y)
    return space._dist(x, y)


def combine(space: Space, lam: float, x: Point, y: Point) -> Point:
    """The point z on [x, y] with d(z, x) = (1-lam) d(x, y), d(z, y) = lam d(x, y)."""
    if not 0.0 <= lam <= 1.0:
        raise GeodesicError(f"lambda must lie in [0, 1], got {lam!r}")
    space.check(x)
    space.check(y)
    if lam == 1.0:
        return x
    if lam == 0.0:
        return y
    return space._combine(lam, x, y)


def quasilin(space: Space, ab: OrientedPair, cd: OrientedPair) -> float:
    """Quasilinearization <->ab, ->cd> = (d2(a,d) + d2(b,c) - d2(a,c) - d2(b,d)) / 2."""
    a, b = ab
    c, d = cd
    for p in (a, b, c, d):
        space.check(p)
    return _qlin(space._dist, a, b, c, d)


def _qlin(D, a, b, c, d):
    # grouped so that swapping a<->b or ab<->cd permutes terms exactly
    return 0.5 * ((D(a, d) ** 2 + D(b, c) ** 2) - (D(a, c) ** 2 + D(b, d) ** 2))


def cs_gap(space: Space, ab: OrientedPair, cd: OrientedPair) -> float:
    """Cauchy-Schwarz gap d(a,b) d(c,d) - <->ab, ->cd>; negative means violation."""
    q = quasilin(space, ab, cd)
    return space._dist(ab.tail, ab.head) * space._dist(cd.tail, cd.head) - q


def cat0_residual(space: Space, x: Point, y: Point, z: Point, lam: float) -> float:
    """Slack in the CN inequality for the point lam*x (+) (1-lam)*y seen from z.

    Nonnegative in every CAT(0) space and identically zero in Euclidean space.
    """
    m = combine(space, lam, x, y)
    space.check(z)
    D = space._dist
    return (
        lam * D(x, z) ** 2
        + (1.0 - lam) * D(y, z) ** 2
        - lam * (1.0 - lam) * D(x, y) ** 2
        - D(m, z) ** 2
    )

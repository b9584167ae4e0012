"""Sampled numerical certificates with explicit witnesses.

Universal statements ("for all y in C", "for all w in X") are discharged by
seeded sampling.  Each certificate reports the most negative residual it met
together with the inputs that produced it, so any failure can be replayed.
Precondition violations raise :class:`~cat0kit.errors.PreconditionError`;
they are never reported as a failed verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import ATOL, Point, Space, _qlin, cat0_residual, combine, cs_gap, pair, quasilin
from .errors import GeodesicError, PreconditionError
from .sets import ConvexSet, check_set, contains, excess, project, sample_in_set
from .spaces import SampleSeed, as_seed

DEFAULT_TOL = 1e-7
MEMBERSHIP_TOL = 1e-8

PASS, FAIL = "pass", "fail"


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one sampled check.

    ``residual`` is the extremal (most negative) residual; the verdict is
    ``pass`` iff ``residual >= -tol``.  Composite reports carry their
    sub-checks in ``parts`` and pass iff every part passes.
    """

    name: str
    verdict: str
    residual: float
    witness: dict
    samples: int
    seed: Optional[SampleSeed]
    tol: float
    parts: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _report(name, residual, witness, samples, seed, tol):
    verdict = PASS if residual >= -tol else FAIL
    return CertificateReport(name, verdict, residual, witness, samples, seed, tol)


def _composite(name, parts, samples, seed, tol):
    worst = min(parts, key=lambda r: r.residual)
    verdict = PASS if all(p.passed for p in parts) else FAIL
    return CertificateReport(name, verdict, worst.residual, worst.witness, samples, seed, tol, tuple(parts))


def _argmin(values, items):
    k = min(range(len(values)), key=values.__getitem__)
    return values[k], items[k]


def _check_count(n):
    if n < 1:
        raise PreconditionError(f"sample count must be >= 1, got {n}")


# ---------------------------------------------------------------- projection characterization


def _candidate_inputs(space, s, x, u, n):
    _check_count(n)
    check_set(space, s)
    space.check(x)
    space.check(u)
    if not contains(space, s, u, MEMBERSHIP_TOL):
        raise PreconditionError("candidate u is not a point of C")


def vi_certificate(space: Space, s: ConvexSet, x: Point, u: Point, n: int = 1000,
                   seed=0, tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check <->xu, ->uy> >= 0 over ``n`` sampled y in C."""
    _candidate_inputs(space, s, x, u, n)
    seed = as_seed(seed)
    ys = sample_in_set(space, s, n, seed)
    xu = pair(x, u)
    vals = [quasilin(space, xu, pair(u, y)) for y in ys]
    low, y = _argmin(vals, ys)
    return _report("variational_inequality", low, {"x": x, "u": u, "y": y}, n, seed, tol)


def distance_certificate(space: Space, s: ConvexSet, x: Point, u: Point, n: int = 1000,
                         seed=0, tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check d(x, y) - d(x, u) >= 0 over the same samples as :func:`vi_certificate`."""
    _candidate_inputs(space, s, x, u, n)
    seed = as_seed(seed)
    ys = sample_in_set(space, s, n, seed)
    dxu = space._dist(x, u)
    vals = [space._dist(x, y) - dxu for y in ys]
    low, y = _argmin(vals, ys)
    return _report("minimal_distance", low, {"x": x, "u": u, "y": y}, n, seed, tol)


def lemma21_residual(space: Space, x: Point, y: Point, lam: float, w: Point) -> float:
    """lam <->xy, ->zw> - <->zy, ->zw> with z = lam*x (+) (1-lam)*y; >= 0 in CAT(0)."""
    z = combine(space, lam, x, y)
    space.check(w)
    D = space._dist
    return lam * _qlin(D, x, y, z, w) - _qlin(D, z, y, z, w)


# ---------------------------------------------------------------- operator properties


@dataclass(frozen=True)
class MapUnderTest:
    """A self-map T of the space: a metric projection or one of the controls."""

    space: Space
    set: Optional[ConvexSet] = None
    kind: str = "projection"
    constant: Optional[Point] = None

    @classmethod
    def projection(cls, space, s):
        check_set(space, s)
        return cls(space, s, "projection")

    @classmethod
    def identity(cls, space):
        return cls(space, None, "identity")

    @classmethod
    def const(cls, space, p):
        space.check(p)
        return cls(space, None, "constant", p)

    def __call__(self, x: Point) -> Point:
        if self.kind == "projection":
            return project(self.space, self.set, x).point
        if self.kind == "identity":
            return x
        if self.kind == "constant":
            return self.constant
        raise ValueError(f"unknown map kind {self.kind!r}")


PROPERTIES = ("nonexpansive", "monotone", "firmly_nonexpansive")


def map_property_report(T: MapUnderTest, n: int = 1000, seed=0,
                        tol: float = DEFAULT_TOL) -> list[CertificateReport]:
    """Reports for nonexpansive, monotone and firmly nonexpansive, in that order.

    Residuals per sampled pair (x, y):
    ``d(x,y) - d(Tx,Ty)``, ``<->xy, ->TxTy>`` and ``<->xy, ->TxTy> - d2(Tx,Ty)``.
    """
    _check_count(n)
    space = T.space
    seed = as_seed(seed)
    pts = space.sample_many(seed.rng(), 2 * n)
    xs, ys = pts[:n], pts[n:]
    rows = {name: [] for name in PROPERTIES}
    for x, y in zip(xs, ys):
        tx, ty = T(x), T(y)
        dt = space._dist(tx, ty)
        pairing = quasilin(space, pair(x, y), pair(tx, ty))
        rows["nonexpansive"].append(space._dist(x, y) - dt)
        rows["monotone"].append(pairing)
        rows["firmly_nonexpansive"].append(pairing - dt * dt)
    reports = []
    for name in PROPERTIES:
        low, k = _argmin(rows[name], list(range(n)))
        reports.append(_report(name, low, {"x": xs[k], "y": ys[k]}, n, seed, tol))
    return reports


def implication_chain_holds(reports: list[CertificateReport]) -> bool:
    """Firmly nonexpansive passing must come with monotone and nonexpansive passing."""
    by = {r.name: r for r in reports}
    if not by["firmly_nonexpansive"].passed:
        return True
    return by["monotone"].passed and by["nonexpansive"].passed


# ---------------------------------------------------------------- boundary escape


def boundary_escape_check(space: Space, s: ConvexSet, x: Point, n_max: int = 100,
                          tol: float = 1e-9) -> CertificateReport:
    """Walk z_n = (1/n) x (+) (1 - 1/n) u, u = P_C x, for n = 2..n_max.

    Every z_n is strictly closer to x than u is, so none may lie in C.  Two
    parts: ``escape`` (margin of z_n outside the tol-fattened set, must be
    > 0) and ``distance_identity`` (d(z_n, u) = d(x, u)/n).
    """
    check_set(space, s)
    space.check(x)
    if n_max < 2:
        raise PreconditionError(f"n_max must be >= 2, got {n_max}")
    if contains(space, s, x, tol):
        raise PreconditionError("x lies in C; the escape construction is vacuous")
    u = project(space, s, x).point
    dxu = space._dist(x, u)
    margins, gaps, zs = [], [], []
    for k in range(2, n_max + 1):
        z = combine(space, 1.0 / k, x, u)
        zs.append((k, z))
        margins.append(excess(space, s, z) - tol)
        gaps.append(-abs(space._dist(z, u) - dxu / k))
    m, (k1, z1) = _argmin(margins, zs)
    g, (k2, z2) = _argmin(gaps, zs)
    n = n_max - 1
    escape = CertificateReport(
        "escape", PASS if m > 0.0 else FAIL, m,
        {"x": x, "u": u, "z": z1, "n": k1}, n, None, 0.0,
    )
    ident = _report(
        "distance_identity", g, {"x": x, "u": u, "z": z2, "n": k2}, n, None, ATOL * (1.0 + dxu)
    )
    return _composite("boundary_escape", [escape, ident], n, None, tol)


# ---------------------------------------------------------------- CAT(0) certification


def cat0_certify(space: Space, n: int = 10_000, seed=0,
                 tol: float = DEFAULT_TOL) -> CertificateReport:
    """Sample ``n`` quadruples for the Cauchy-Schwarz gap and ``n`` (x, y, z, lam)
    for the CN residual; pass iff both minima are >= -tol."""
    _check_count(n)
    seed = as_seed(seed)
    pts = space.sample_many(seed.rng(1), 4 * n)
    quads = [pts[i::n] for i in range(4)]
    cs = [cs_gap(space, pair(a, b), pair(c, d)) for a, b, c, d in zip(*quads)]
    low_cs, k = _argmin(cs, list(range(n)))
    a, b, c, d = (q[k] for q in quads)
    part_cs = _report("cs_gap", low_cs, {"a": a, "b": b, "c": c, "d": d}, n, seed, tol)

    rng = seed.rng(2)
    tri = space.sample_many(rng, 3 * n)
    lams = rng.uniform(0.0, 1.0, n).tolist()
    xs, ys, zs = tri[:n], tri[n:2 * n], tri[2 * n:]
    res = [_safe_residual(space, *args) for args in zip(xs, ys, zs, lams)]
    low_r, k = _argmin(res, list(range(n)))
    part_r = _report(
        "cat0_residual", low_r, {"x": xs[k], "y": ys[k], "z": zs[k], "lambda": lams[k]}, n, seed, tol
    )
    return _composite("cat0", [part_cs, part_r], n, seed, tol)


def _safe_residual(space, x, y, z, lam):
    # the sphere control can draw (near-)antipodal pairs with no unique geodesic
    try:
        return cat0_residual(space, x, y, z, lam)
    except GeodesicError:
        return float("inf")

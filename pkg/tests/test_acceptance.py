"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` (the lines are printed
even without ``-s``).
"""
import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from cat0kit import (
    Ball,
    EuclideanSpace,
    HyperboloidSpace,
    MapUnderTest,
    ProductSpace,
    Segment,
    SphereSpace,
    Subtree,
    boundary_escape_check,
    cat0_certify,
    cat0_residual,
    combine,
    distance_certificate,
    halfspaces,
    lemma21_residual,
    map_property_report,
    pair,
    project,
    project_halfspaces,
    project_segment,
    quasilin,
    sample_in_set,
    unit_star,
    vi_certificate,
)
from cat0kit.spaces import as_seed

from cases import random_cases
from conftest import E, skew_tree

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def verdict(capsys):
    def emit(criterion, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail

    return emit


def test_criterion_01_euclidean_identities(verdict):
    t0 = time.perf_counter()
    worst_cn = worst_l21 = 0.0
    for dim, seed in ((2, 101), (5, 102)):
        sp = EuclideanSpace(dim)
        rng = np.random.default_rng(seed)
        n = 100_000
        pts = sp.sample_many(rng, 3 * n)
        lams = rng.uniform(0.0, 1.0, n).tolist()
        arr = np.array([p.coords for p in pts]).reshape(3, n, dim)
        sq = lambda i, j: ((arr[i] - arr[j]) ** 2).sum(axis=1)  # noqa: E731
        scales = (1.0 + np.maximum.reduce([sq(0, 1), sq(0, 2), sq(1, 2)])).tolist()
        for x, y, z, lam, sc in zip(pts[:n], pts[n:2 * n], pts[2 * n:], lams, scales):
            worst_cn = max(worst_cn, abs(cat0_residual(sp, x, y, z, lam)) / sc)
            worst_l21 = max(worst_l21, abs(lemma21_residual(sp, x, y, lam, z)) / sc)
    elapsed = time.perf_counter() - t0
    ok = worst_cn <= 1e-9 and worst_l21 <= 1e-9 and elapsed <= 5.0
    verdict(1, ok, f"1e5 inputs per dim, max scaled |CN| {worst_cn:.2e}, |pairing| {worst_l21:.2e}, {elapsed:.2f}s")


def test_criterion_02_cat0_certification(verdict):
    t0 = time.perf_counter()
    spaces = {
        "euclidean(2)": EuclideanSpace(2),
        "hyperboloid(2)": HyperboloidSpace(2),
        "tripod": unit_star(),
        "euclidean(1)xtree": ProductSpace((EuclideanSpace(1), unit_star())),
    }
    lows = {}
    for name, sp in spaces.items():
        rep = cat0_certify(sp, n=100_000, seed=0, tol=1e-9)
        lows[name] = (rep.passed, min(p.residual for p in rep.parts))
    sphere = cat0_certify(SphereSpace(2), n=10_000, seed=0)
    gap = sphere.parts[0].residual
    elapsed = time.perf_counter() - t0
    ok = all(p for p, _ in lows.values()) and not sphere.passed and gap <= -1e-3 and elapsed <= 30.0
    detail = ", ".join(f"{k} min {v:.1e}" for k, (_, v) in lows.items())
    verdict(2, ok, f"{detail}; sphere cs_gap {gap:.3f}; {elapsed:.1f}s")


def test_criterion_03_quasilinearization_algebra(verdict):
    spaces = {
        "euclidean": EuclideanSpace(3),
        "hyperboloid": HyperboloidSpace(2),
        "tree": skew_tree(),
        "product": ProductSpace((EuclideanSpace(1), unit_star())),
        "sphere": SphereSpace(2),
    }
    n = 100_000
    worst = {}
    for k, (name, sp) in enumerate(spaces.items()):
        pts = sp.sample_many(as_seed(300 + k).rng(), 5 * n)
        w = 0.0
        for a, b, c, d, e in zip(*(pts[i::5] for i in range(5))):
            ab, cd = pair(a, b), pair(c, d)
            q = quasilin(sp, ab, cd)
            w = max(
                w,
                abs(quasilin(sp, ab, ab) - sp._dist(a, b) ** 2),
                abs(q + quasilin(sp, pair(b, a), cd)),
                abs(q - quasilin(sp, cd, ab)),
                abs(q + quasilin(sp, pair(b, e), cd) - quasilin(sp, pair(a, e), cd)),
            )
        worst[name] = w
    ok = max(worst.values()) <= 1e-9
    verdict(3, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def _clamped(x, a, b):
    x, a, b = (np.asarray(p.coords) for p in (x, a, b))
    d = b - a
    t = float(np.clip(np.dot(x - a, d) / np.dot(d, d), 0.0, 1.0))
    return a + t * d


def test_criterion_04_projection_oracles(verdict):
    rng = np.random.default_rng(404)
    worst = 0.0
    for i in range(10_000):
        sp = EuclideanSpace(2 if i % 2 else 3)
        a, b, x = sp.sample_many(rng, 3)
        u = project_segment(sp, Segment(a, b), x).point
        worst = max(worst, float(np.linalg.norm(np.asarray(u.coords) - _clamped(x, a, b))))
    quad = halfspaces([((1.0, 0.0), 0.0), ((0.0, 1.0), 0.0)])
    q = project_halfspaces(EuclideanSpace(2), quad, E(1, 1)).point
    qerr = math.hypot(*q.coords)
    ok = worst <= 1e-8 and qerr <= 1e-9
    verdict(4, ok, f"segment max error {worst:.1e} over 1e4, quadrant error {qerr:.1e}")


def test_criterion_05_vi_forward(verdict):
    t0 = time.perf_counter()
    fails, low = [], math.inf
    for k, (name, sp, s, x) in enumerate(random_cases(100, seed=505)):
        u = project(sp, s, x).point
        rep = vi_certificate(sp, s, x, u, n=1000, seed=k, tol=1e-7)
        low = min(low, rep.residual)
        if not rep.passed:
            fails.append(name)
    elapsed = time.perf_counter() - t0
    ok = not fails and elapsed <= 20.0
    verdict(5, ok, f"100 cases, min residual {low:.1e}, failures {fails}, {elapsed:.1f}s")


def test_criterion_06_vi_converse(verdict):
    rng = np.random.default_rng(606)
    checked = violations = 0
    for k, (name, sp, s, x) in enumerate(random_cases(40, seed=606)):
        # the projection plus decoys drawn from C
        cands = [project(sp, s, x).point] + sample_in_set(sp, s, 4, as_seed(int(rng.integers(2**32))))
        for u in cands:
            vi = vi_certificate(sp, s, x, u, n=1000, seed=k, tol=1e-9)
            if vi.passed:
                checked += 1
                if not distance_certificate(sp, s, x, u, n=1000, seed=k, tol=1e-7).passed:
                    violations += 1
    plane = EuclideanSpace(2)
    x, u = E(3, 0), E(0, 1)
    false = vi_certificate(plane, Ball(E(0, 0), 1.0), x, u, n=1000)
    hand = quasilin(plane, pair(x, u), pair(u, E(1, 0)))
    ok = checked > 0 and violations == 0 and not false.passed and abs(hand + 4.0) <= 1e-9
    verdict(
        6, ok,
        f"{checked} passing VI cases, {violations} distance failures; false candidate "
        f"{false.verdict} (sampled min {false.residual:.3f}), residual at y=(1,0) {hand:.12f}",
    )


def test_criterion_07_projection_properties(verdict):
    plane, star = EuclideanSpace(2), unit_star()
    cases = {
        "ball": (plane, Ball(E(0, 0), 1.0)),
        "segment": (plane, Segment(E(-1, -2), E(2, 1.5))),
        "subtree": (star, Subtree(frozenset({0, 1}))),
        "halfspaces": (plane, halfspaces([((1.0, 1.0), 1.0), ((-1.0, 2.0), 0.5), ((0.0, -1.0), 2.0)])),
    }
    lows = {}
    for name, (sp, s) in cases.items():
        reps = map_property_report(MapUnderTest.projection(sp, s), n=1000, seed=7, tol=1e-7)
        lows[name] = (all(r.passed for r in reps), min(r.residual for r in reps))
    ok = all(p for p, _ in lows.values())
    verdict(7, ok, ", ".join(f"{k} min {v:.1e}" for k, (_, v) in lows.items()))


def test_criterion_08_escape_points(verdict):
    plane, star = EuclideanSpace(2), unit_star()
    scenes = {
        "ball": (plane, Ball(E(0, 0), 1.0), E(3, 0)),
        "halfplane": (plane, halfspaces([((0.0, 1.0), 0.0)]), E(0, 2)),
        "segment": (plane, Segment(E(-1, 0), E(1, 0)), E(0.3, 1.7)),
        "subtree": (star, Subtree(frozenset({0, 1})), star.vertex(2)),
    }
    notes, ok = [], True
    for name, (sp, s, x) in scenes.items():
        rep = boundary_escape_check(sp, s, x, n_max=100)
        u = project(sp, s, x).point
        dxu = sp._dist(x, u)
        err = max(abs(sp._dist(combine(sp, 1.0 / n, x, u), u) - dxu / n) for n in range(2, 101))
        ok = ok and rep.passed and err <= 1e-9
        notes.append(f"{name} margin {rep.parts[0].residual:.1e} id-err {err:.0e}")
    verdict(8, ok, ", ".join(notes))


def test_criterion_09_tripod_fixtures(verdict):
    star = unit_star()
    leaf1, leaf2, leaf3 = (star.vertex(i) for i in (1, 2, 3))
    cn = cat0_residual(star, leaf1, leaf2, leaf3, 0.5)
    gate = project(star, Subtree(frozenset({0, 1})), leaf2)
    ok = abs(cn - 2.0) <= 1e-12 and gate.point == star.vertex(0) and abs(gate.distance - 1.0) <= 1e-12
    verdict(9, ok, f"CN residual {cn!r}, gate {gate.point.coords}, distance {gate.distance!r}")


def _cli(cmd, scene):
    proc = subprocess.run(
        [sys.executable, "-m", "cat0kit", cmd, "--scene", str(GOLDEN / scene), "--seed", "0"],
        capture_output=True,
    )
    return proc.returncode, proc.stdout


def test_criterion_10_cli_golden(verdict):
    golden = [("project", "ball.json"), ("certify-vi", "ball_false_u.json"), ("cat0-check", "sphere.json")]
    first = [_cli(*g) for g in golden]
    second = [_cli(*g) for g in golden]
    statuses = [s for s, _ in first]
    identical = all(a == b for a, b in zip(first, second))
    proj = json.loads(first[0][1])["result"]
    ok = statuses == [0, 1, 1] and identical and proj["point"] == [1.0, 0.0] and proj["distance"] == 2.0
    verdict(10, ok, f"statuses {statuses}, byte-identical across runs: {identical}")

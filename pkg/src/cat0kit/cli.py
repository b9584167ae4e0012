"""Command-line entry point: ``cat0kit <command> --scene PATH [overrides]``.

Reports are JSON on stdout, diagnostics go to stderr.  Exit status 0 means
every certificate passed, 1 means at least one failed, 2 is an input or
usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .certify import (
    CertificateReport,
    MapUnderTest,
    boundary_escape_check,
    cat0_certify,
    distance_certificate,
    map_property_report,
    vi_certificate,
)
from .core import cs_gap, pair, quasilin
from .errors import Cat0Error, SceneError
from .scene import Scene, encode_point, parse_scene, scene_digest
from .sets import project

COMMANDS = ("qlin", "project", "certify-vi", "certify-props", "boundary-check", "cat0-check")

OK, FAILED, USAGE = 0, 1, 2


def _need_set(scene, cmd):
    if scene.set is None:
        raise SceneError("set", f"command {cmd!r} needs a set stanza")
    return scene.set


def _need_point(scene, name, cmd):
    try:
        return scene.points[name]
    except KeyError:
        raise SceneError(f"points.{name}", f"command {cmd!r} needs point {name!r}") from None


def _encode_value(space, v):
    if isinstance(v, tuple) and hasattr(v, "model"):
        return encode_point(space, v)
    return v


def certificate_to_dict(space, rep: CertificateReport) -> dict:
    return {
        "name": rep.name,
        "verdict": rep.verdict,
        "residual": rep.residual,
        "tol": rep.tol,
        "samples": rep.samples,
        "seed": None if rep.seed is None else {"seed": rep.seed.seed, "stream": rep.seed.stream},
        "witness": {k: _encode_value(space, v) for k, v in rep.witness.items()},
    }


def _flatten(reports):
    out = []
    for r in reports:
        out.extend(r.parts if r.parts else (r,))
    return out


def run_command(cmd: str, scene: Scene) -> tuple[dict, int]:
    """Dispatch ``cmd`` on ``scene``; returns the JSON-ready report and exit status.

    Input problems raise :class:`~cat0kit.errors.Cat0Error`; :func:`main`
    maps them to status 2.
    """
    space, opts = scene.space, scene.options
    n = opts.samples_for(cmd)
    result = None
    reports: list[CertificateReport] = []
    if cmd == "qlin":
        a, b, c, d = (_need_point(scene, k, cmd) for k in "abcd")
        result = {
            "value": quasilin(space, pair(a, b), pair(c, d)),
            "cs_gap": cs_gap(space, pair(a, b), pair(c, d)),
        }
    elif cmd == "project":
        s = _need_set(scene, cmd)
        res = project(space, s, _need_point(scene, "x", cmd))
        result = {
            "point": encode_point(space, res.point),
            "distance": res.distance,
            "iterations": res.iterations,
            "residual_bound": res.residual,
        }
    elif cmd == "certify-vi":
        s = _need_set(scene, cmd)
        x = _need_point(scene, "x", cmd)
        u = scene.points.get("u")
        if u is None:
            u = project(space, s, x).point
        result = {"u": encode_point(space, u)}
        args = (space, s, x, u, n, opts.seed, opts.tol)
        reports = [vi_certificate(*args), distance_certificate(*args)]
    elif cmd == "certify-props":
        s = _need_set(scene, cmd)
        reports = map_property_report(MapUnderTest.projection(space, s), n, opts.seed, opts.tol)
    elif cmd == "boundary-check":
        s = _need_set(scene, cmd)
        reports = [boundary_escape_check(space, s, _need_point(scene, "x", cmd), opts.n_max, opts.tol)]
    elif cmd == "cat0-check":
        reports = [cat0_certify(space, n, opts.seed, opts.tol)]
    else:
        raise SceneError("", f"unknown command {cmd!r}")
    certs = [certificate_to_dict(space, r) for r in _flatten(reports)]
    verdict = "pass" if all(c["verdict"] == "pass" for c in certs) else "fail"
    report = {"command": cmd, "scene_digest": scene_digest(scene)}
    if result is not None:
        report["result"] = result
    report["certificates"] = certs
    report["verdict"] = verdict
    return report, OK if verdict == "pass" else FAILED


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cat0kit", description="Metric projection and certificates in CAT(0) model spaces."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scene", required=True, help="scene JSON file, '-' for stdin")
        p.add_argument("--tol", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--nmax", type=int, dest="n_max")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scene == "-":
            text = sys.stdin.read()
        else:
            with open(args.scene, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"cat0kit: cannot read scene: {exc}", file=sys.stderr)
        return USAGE
    try:
        scene = parse_scene(text).with_options(
            tol=args.tol, samples=args.samples, seed=args.seed, n_max=args.n_max
        )
        report, status = run_command(args.command, scene)
    except (Cat0Error, ValueError) as exc:
        print(f"cat0kit: {exc}", file=sys.stderr)
        return USAGE
    sys.stdout.write(dumps_report(report))
    return status


if __name__ == "__main__":
    sys.exit(main())

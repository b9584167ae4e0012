"""JSON scene documents: parsing, validation and canonical serialization.

A scene looks like::

    {"space": {"model": "euclidean", "dim": 2},
     "set": {"kind": "ball", "center": [0, 0], "radius": 1},
     "points": {"x": [3, 0]},
     "options": {"tol": 1e-7, "samples": 1000, "seed": 0, "n_max": 100}}

Point encodings: euclidean, hyperboloid (ambient, dim+1) and sphere (unit,
dim+1) points are number arrays; tree points are ``{"vertex": id}`` or
``{"edge": [u, v], "offset": t}`` with ``t`` measured from ``u``; product
points are arrays of factor encodings.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .core import Point, Space
from .errors import Cat0Error, SceneError
from .sets import Ball, ConvexSet, Halfspaces, Segment, Subtree, check_set
from .spaces import TreeLoc, TreeSpace, build_space

SET_KINDS = ("segment", "ball", "subtree", "halfspaces")


DEFAULT_SAMPLES = 1000
# Cauchy-Schwarz violations on the sphere are rare among uniform quadruples
DEFAULT_SAMPLES_BY_COMMAND = {"cat0-check": 10_000}


@dataclass(frozen=True)
class Options:
    tol: float = 1e-7
    #: None means the per-command default
    samples: Optional[int] = None
    seed: int = 0
    n_max: int = 100

    def samples_for(self, command: str) -> int:
        if self.samples is not None:
            return self.samples
        return DEFAULT_SAMPLES_BY_COMMAND.get(command, DEFAULT_SAMPLES)


@dataclass(frozen=True)
class Scene:
    space: Space
    set: Optional[ConvexSet] = None
    points: dict = field(default_factory=dict)
    options: Options = field(default_factory=Options)

    def with_options(self, **overrides) -> "Scene":
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, options=replace(self.options, **given))


# ---------------------------------------------------------------- points


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(path, f"expected a number, got {json.dumps(value)}")
    value = float(value)
    if not math.isfinite(value):
        raise SceneError(path, "must be finite")
    return value


def _vector(value, n, path) -> tuple:
    if not isinstance(value, list):
        raise SceneError(path, "expected an array of numbers")
    if len(value) != n:
        raise SceneError(path, f"dimension mismatch: expected {n} coordinates, got {len(value)}")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def decode_point(space: Space, data: Any, path: str) -> Point:
    model = space.model
    if model == "euclidean":
        p = Point(model, _vector(data, space.dim, path))
    elif model in ("hyperboloid", "sphere"):
        p = Point(model, _vector(data, space.dim + 1, path))
    elif model == "tree":
        p = _decode_tree_point(space, data, path)
    elif model == "product":
        if not isinstance(data, list) or len(data) != len(space.factors):
            raise SceneError(path, f"expected an array of {len(space.factors)} factor points")
        p = Point(
            model,
            tuple(decode_point(f, d, f"{path}[{i}]") for i, (f, d) in enumerate(zip(space.factors, data))),
        )
    else:
        raise SceneError(path, f"unsupported model {model!r}")
    try:
        space.check(p)
    except Cat0Error as exc:
        raise SceneError(path, str(exc)) from None
    return p


def _decode_tree_point(space: TreeSpace, data, path) -> Point:
    if not isinstance(data, dict):
        raise SceneError(path, 'expected {"vertex": id} or {"edge": [u, v], "offset": t}')
    if "vertex" in data:
        v = data["vertex"]
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < space.n_vertices:
            raise SceneError(f"{path}.vertex", f"unknown vertex {json.dumps(v)}")
        return Point("tree", TreeLoc(vertex=v))
    edge = data.get("edge")
    if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(v, int) for v in edge)):
        raise SceneError(f"{path}.edge", "expected [u, v] vertex ids")
    offset = _number(data.get("offset"), f"{path}.offset")
    try:
        return space.on_edge(edge[0], edge[1], offset)
    except Cat0Error as exc:
        raise SceneError(path, str(exc)) from None


def encode_point(space: Space, p: Point) -> Any:
    if space.model == "tree":
        loc = p.coords
        if loc.vertex >= 0:
            return {"vertex": loc.vertex}
        u, v, _ = space.edges[loc.edge]
        return {"edge": [u, v], "offset": loc.offset}
    if space.model == "product":
        return [encode_point(f, q) for f, q in zip(space.factors, p.coords)]
    return list(p.coords)


# ---------------------------------------------------------------- sets


def decode_set(space: Space, data: Any, path: str = "set") -> ConvexSet:
    if not isinstance(data, dict):
        raise SceneError(path, "expected an object")
    kind = data.get("kind")
    if kind == "segment":
        s = Segment(decode_point(space, data.get("a"), f"{path}.a"),
                    decode_point(space, data.get("b"), f"{path}.b"))
    elif kind == "ball":
        center = decode_point(space, data.get("center"), f"{path}.center")
        radius = _number(data.get("radius"), f"{path}.radius")
        if not radius > 0:
            raise SceneError(f"{path}.radius", "must be > 0")
        s = Ball(center, radius)
    elif kind == "subtree":
        if not isinstance(space, TreeSpace):
            raise SceneError(f"{path}.kind", f"subtree needs a tree space, not {space.model!r}")
        verts = data.get("vertices")
        if not isinstance(verts, list) or not verts:
            raise SceneError(f"{path}.vertices", "expected a nonempty array of vertex ids")
        for i, v in enumerate(verts):
            if not isinstance(v, int) or isinstance(v, bool):
                raise SceneError(f"{path}.vertices[{i}]", "expected a vertex id")
        s = Subtree(frozenset(verts))
    elif kind == "halfspaces":
        if space.model != "euclidean":
            raise SceneError(f"{path}.kind", f"halfspaces need a euclidean space, not {space.model!r}")
        rows = data.get("rows")
        if not isinstance(rows, list) or not rows:
            raise SceneError(f"{path}.rows", "expected a nonempty array")
        normals, offsets = [], []
        for i, row in enumerate(rows):
            if not isinstance(row, dict):
                raise SceneError(f"{path}.rows[{i}]", 'expected {"normal": [...], "offset": b}')
            normals.append(_vector(row.get("normal"), space.dim, f"{path}.rows[{i}].normal"))
            offsets.append(_number(row.get("offset"), f"{path}.rows[{i}].offset"))
        s = Halfspaces(tuple(normals), tuple(offsets))
    else:
        raise SceneError(f"{path}.kind", f"unknown set kind {json.dumps(kind)}; expected one of {SET_KINDS}")
    try:
        check_set(space, s)
    except Cat0Error as exc:
        raise SceneError(path, str(exc)) from None
    return s


def encode_set(space: Space, s: ConvexSet) -> dict:
    if isinstance(s, Segment):
        return {"kind": "segment", "a": encode_point(space, s.a), "b": encode_point(space, s.b)}
    if isinstance(s, Ball):
        return {"kind": "ball", "center": encode_point(space, s.center), "radius": s.radius}
    if isinstance(s, Subtree):
        return {"kind": "subtree", "vertices": sorted(s.vertices)}
    return {
        "kind": "halfspaces",
        "rows": [{"normal": list(a), "offset": b} for a, b in zip(s.normals, s.offsets)],
    }


# ---------------------------------------------------------------- scenes


def _options(data, path="options") -> Options:
    if data is None:
        return Options()
    if not isinstance(data, dict):
        raise SceneError(path, "expected an object")
    unknown = set(data) - {"tol", "samples", "seed", "n_max"}
    if unknown:
        raise SceneError(f"{path}.{sorted(unknown)[0]}", "unknown option")
    opts = Options()
    if "tol" in data:
        tol = _number(data["tol"], f"{path}.tol")
        if tol < 0:
            raise SceneError(f"{path}.tol", "must be >= 0")
        opts = replace(opts, tol=tol)
    for key, low in (("samples", 1), ("seed", 0), ("n_max", 2)):
        if key in data:
            v = data[key]
            if not isinstance(v, int) or isinstance(v, bool) or v < low:
                raise SceneError(f"{path}.{key}", f"must be an integer >= {low}")
            opts = replace(opts, **{key: v})
    return opts


def scene_from_dict(doc: Any) -> Scene:
    if not isinstance(doc, dict):
        raise SceneError("", "scene must be a JSON object")
    if "space" not in doc:
        raise SceneError("space", "missing space stanza")
    try:
        space = build_space(doc["space"])
    except Cat0Error as exc:
        raise SceneError("space", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise SceneError("space", f"malformed parameters ({exc})") from None
    s = decode_set(space, doc["set"]) if doc.get("set") is not None else None
    raw_points = doc.get("points", {})
    if not isinstance(raw_points, dict):
        raise SceneError("points", "expected an object of named points")
    points = {name: decode_point(space, v, f"points.{name}") for name, v in raw_points.items()}
    return Scene(space, s, points, _options(doc.get("options")))


def parse_scene(text: str) -> Scene:
    """Parse and validate a UTF-8 JSON scene; raises SceneError naming the bad field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError("", f"malformed JSON: {exc}") from None
    return scene_from_dict(doc)


def scene_to_dict(scene: Scene) -> dict:
    doc = {"space": scene.space.to_config()}
    if scene.set is not None:
        doc["set"] = encode_set(scene.space, scene.set)
    doc["points"] = {k: encode_point(scene.space, p) for k, p in scene.points.items()}
    o = scene.options
    doc["options"] = {"tol": o.tol, "seed": o.seed, "n_max": o.n_max}
    if o.samples is not None:
        doc["options"]["samples"] = o.samples
    return doc


def serialize_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), sort_keys=True, separators=(",", ":"))


def scene_digest(scene: Scene) -> str:
    return hashlib.sha256(serialize_scene(scene).encode("utf-8")).hexdigest()

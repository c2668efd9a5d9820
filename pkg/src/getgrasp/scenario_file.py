"""
Scenario file loading and schema validation.

Scenario files are YAML with four top-level sections::

    config:     analysis settings (optional)
    grippers:   list of gripper definitions
    objects:    list of object definitions
    scenarios:  list of {object, site, f_max, threshold, name, tags}

Validation walks the YAML node tree so every error carries its line.
All errors are collected before anything is built.
"""
from dataclasses import dataclass, field
import os

import yaml

from .analysis import AnalysisConfig, Scenario
from .errors import GraspError
from .geometry import Box, ConvexPrism, Cylinder, FingerProfile, GripperConfig, ObjectModel, Pose, Sphere


class ScenarioFileError(Exception):
    """Schema or I/O problem; ``errors`` lists ``"line N: path: message"`` strings."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


NUM, INT, STR, BOOL, VEC3, POINTS, SITE, STRS = "num", "int", "str", "bool", "vec3", "points", "site", "strs"

FINGER = {
    "length": NUM,
    "width_base": NUM,
    "width_tip": NUM,
    "gel_thickness_base": NUM,
    "gel_thickness_tip": NUM,
    "backing_pitch_theta": NUM,
    "nail_length": NUM,
    "nail_width": NUM,
}
GRIPPER = {
    "name": STR,
    "arrangement": STR,
    "finger": FINGER,
    "v_half_angle": NUM,
    "base_separation": NUM,
    "jaw_opening_max": NUM,
    "f_max": NUM,
}
SHAPE = {"type": STR, "r": NUM, "l": NUM, "a": NUM, "b": NUM, "c": NUM, "polygon": POINTS, "depth": NUM}
OBJECT = {
    "name": STR,
    "shape": SHAPE,
    "position": VEC3,
    "euler_xyz": VEC3,
    "mass": NUM,
    "mu": NUM,
    "com": VEC3,
}
JITTER = {"count": INT, "position_mm": NUM, "angle_deg": NUM}
CONFIG = {
    "stiffness_k": NUM,
    "grid_spacing": NUM,
    "flatten_threshold": NUM,
    "mu": NUM,
    "cone_edges": INT,
    "threshold": NUM,
    "cap_mode": STR,
    "gravity_dir": VEC3,
    "seed": INT,
    "jitter": JITTER,
}
SCENARIO = {"name": STR, "object": STR, "site": SITE, "f_max": NUM, "threshold": NUM, "tags": STRS}
TOP = {"config": CONFIG, "grippers": [GRIPPER], "objects": [OBJECT], "scenarios": [SCENARIO]}
REQUIRED = {
    id(GRIPPER): ("name", "arrangement", "finger"),
    id(FINGER): ("length", "width_base", "width_tip"),
    id(OBJECT): ("name", "shape"),
    id(SHAPE): ("type",),
    id(SCENARIO): ("object",),
    id(TOP): ("grippers", "objects", "scenarios"),
}
SHAPE_FIELDS = {"sphere": ("r",), "cylinder": ("r", "l"), "box": ("a", "b", "c"), "convex_prism": ("polygon", "depth")}


def _line(node):
    return node.start_mark.line + 1


def _is_num(node):
    if not isinstance(node, yaml.ScalarNode) or node.tag not in ("tag:yaml.org,2002:int", "tag:yaml.org,2002:float"):
        return False
    return True


def _check(node, schema, path, errors):
    def err(n, msg):
        errors.append(f"line {_line(n)}: {path or '<root>'}: {msg}")

    if isinstance(schema, dict):
        if not isinstance(node, yaml.MappingNode):
            err(node, "expected a mapping")
            return
        seen = set()
        for k, v in node.value:
            key = k.value
            sub = f"{path}.{key}" if path else key
            if key in seen:
                errors.append(f"line {_line(k)}: {sub}: duplicate key")
            seen.add(key)
            if key not in schema:
                errors.append(f"line {_line(k)}: {sub}: unknown key '{key}'")
                continue
            _check(v, schema[key], sub, errors)
        for key in REQUIRED.get(id(schema), ()):
            if key not in seen:
                err(node, f"missing required key '{key}'")
    elif isinstance(schema, list):
        if not isinstance(node, yaml.SequenceNode):
            err(node, "expected a list")
            return
        for i, item in enumerate(node.value):
            _check(item, schema[0], f"{path}[{i}]", errors)
    elif schema == NUM:
        if not _is_num(node):
            err(node, "expected a number")
    elif schema == INT:
        if not (isinstance(node, yaml.ScalarNode) and node.tag == "tag:yaml.org,2002:int"):
            err(node, "expected an integer")
    elif schema == STR:
        if not (isinstance(node, yaml.ScalarNode) and node.tag == "tag:yaml.org,2002:str"):
            err(node, "expected a string")
    elif schema == SITE:
        if not (_is_num(node) or (isinstance(node, yaml.ScalarNode) and node.value == "auto")):
            err(node, "expected a number or 'auto'")
    elif schema == VEC3:
        if not (isinstance(node, yaml.SequenceNode) and len(node.value) == 3 and all(map(_is_num, node.value))):
            err(node, "expected a list of 3 numbers")
    elif schema == STRS:
        if not (isinstance(node, yaml.SequenceNode) and all(isinstance(n, yaml.ScalarNode) for n in node.value)):
            err(node, "expected a list of strings")
    elif schema == POINTS:
        ok = isinstance(node, yaml.SequenceNode) and len(node.value) >= 3
        ok = ok and all(
            isinstance(p, yaml.SequenceNode) and len(p.value) == 2 and all(map(_is_num, p.value)) for p in node.value
        )
        if not ok:
            err(node, "expected a list of >= 3 [y, z] pairs")


def _find(node, key):
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            if k.value == key:
                return k, v
    return None, None


@dataclass
class ScenarioFile:
    config: AnalysisConfig
    grippers: list
    objects: dict
    scenarios: list
    path: str = ""
    tags: list = field(default_factory=list)

    def select(self, tag):
        return [s for s, tags in zip(self.scenarios, self.tags) if tag in tags]


def _build_gripper(d):
    f = d["finger"]
    prof = FingerProfile(**f)
    n = 3 if d["arrangement"] == "v_pair_plus_single" else 2
    kw = {k: v for k, v in d.items() if k not in ("finger",)}
    return GripperConfig(fingers=[prof] * n, **kw)


def _build_shape(s):
    t = s["type"]
    if t == "sphere":
        return Sphere(s["r"])
    if t == "cylinder":
        return Cylinder(s["r"], s["l"])
    if t == "box":
        return Box(s["a"], s["b"], s["c"])
    return ConvexPrism(tuple(tuple(p) for p in s["polygon"]), s["depth"])


def _build_object(d):
    pose = Pose(tuple(d.get("position", (0.0, 0.0, 0.0))), tuple(d.get("euler_xyz", (0.0, 0.0, 0.0))))
    kw = {k: d[k] for k in ("mass", "mu") if k in d}
    if "com" in d:
        kw["com"] = tuple(d["com"])
    return ObjectModel(_build_shape(d["shape"]), pose, name=d["name"], **kw)


def _build_config(d, seed=None, cone_edges=None):
    kw = {k: d[k] for k in ("stiffness_k", "grid_spacing", "flatten_threshold", "mu", "cone_edges", "threshold",
                            "cap_mode", "seed") if k in d}
    if "gravity_dir" in d:
        kw["gravity_dir"] = tuple(float(v) for v in d["gravity_dir"])
    j = d.get("jitter", {})
    for src, dst in (("count", "jitter_count"), ("position_mm", "jitter_position"), ("angle_deg", "jitter_angle")):
        if src in j:
            kw[dst] = j[src]
    if seed is not None:
        kw["seed"] = int(seed)
    if cone_edges is not None:
        kw["cone_edges"] = int(cone_edges)
    return AnalysisConfig(**kw)


def parse_scenario_text(text, path="<string>", seed=None, cone_edges=None):
    """Validate and build a :class:`ScenarioFile` from YAML text.

    Raises
    ------
    ScenarioFileError
        With every schema violation found, each prefixed by its line.
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark else ""
        raise ScenarioFileError([f"{where}<root>: invalid YAML ({getattr(e, 'problem', e)})"]) from None
    if root is None:
        raise ScenarioFileError(["line 1: <root>: empty scenario file"])
    errors = []
    _check(root, TOP, "", errors)
    if errors:
        raise ScenarioFileError(errors)

    # semantic checks that still have node positions at hand
    _, objs_node = _find(root, "objects")
    _, grips_node = _find(root, "grippers")
    _, scen_node = _find(root, "scenarios")
    obj_names = []
    for i, o in enumerate(objs_node.value):
        _, shp = _find(o, "shape")
        _, t = _find(shp, "type")
        if t.value not in SHAPE_FIELDS:
            errors.append(f"line {_line(t)}: objects[{i}].shape.type: unknown shape '{t.value}'")
        else:
            for f in SHAPE_FIELDS[t.value]:
                if _find(shp, f)[1] is None:
                    errors.append(f"line {_line(shp)}: objects[{i}].shape: missing '{f}' for {t.value}")
        obj_names.append(_find(o, "name")[1].value)
    for i, g in enumerate(grips_node.value):
        _, a = _find(g, "arrangement")
        if a.value not in ("flat_pair", "v_pair_plus_single"):
            errors.append(f"line {_line(a)}: grippers[{i}].arrangement: unknown arrangement '{a.value}'")
    for i, s in enumerate(scen_node.value):
        _, o = _find(s, "object")
        if o.value not in obj_names:
            errors.append(f"line {_line(o)}: scenarios[{i}].object: unknown object '{o.value}'")
    for label, node in (("grippers", grips_node), ("objects", objs_node)):
        seen = set()
        for i, item in enumerate(node.value):
            _, v = _find(item, "name")
            if v.value in seen:
                errors.append(f"line {_line(v)}: {label}[{i}].name: duplicate name '{v.value}'")
            seen.add(v.value)
    if not grips_node.value:
        errors.append(f"line {_line(grips_node)}: grippers: at least one gripper is required")
    if not scen_node.value:
        errors.append(f"line {_line(scen_node)}: scenarios: at least one scenario is required")
    if errors:
        raise ScenarioFileError(errors)

    data = yaml.safe_load(text)

    def build(fn, item, node, label):
        try:
            return fn(item)
        except (GraspError, ValueError, TypeError) as e:
            errors.append(f"line {_line(node)}: {label}: invalid value ({e})")

    cfg_node = _find(root, "config")[1]
    cfg = build(lambda d: _build_config(d, seed, cone_edges), data.get("config") or {}, cfg_node or root, "config")
    grippers = [build(_build_gripper, g, n, f"grippers[{i}]")
                for i, (g, n) in enumerate(zip(data["grippers"], grips_node.value))]
    objects = {o["name"]: build(_build_object, o, n, f"objects[{i}]")
               for i, (o, n) in enumerate(zip(data["objects"], objs_node.value))}
    if errors:
        raise ScenarioFileError(errors)
    scenarios, tags = [], []
    for i, s in enumerate(data["scenarios"]):
        scenarios.append(
            Scenario(
                object=objects[s["object"]],
                site=s.get("site", "auto"),
                f_max=s.get("f_max"),
                threshold=s.get("threshold"),
                name=s.get("name", f"{s['object']}#{i}"),
            )
        )
        tags.append(tuple(s.get("tags", ())))
    return ScenarioFile(cfg, grippers, objects, scenarios, path, tags)


def load_scenario_file(path, seed=None, cone_edges=None):
    """Read and validate a scenario file from disk."""
    if not os.path.isfile(path):
        raise ScenarioFileError([f"line 0: <file>: cannot read '{path}'"])
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario_text(text, path, seed, cone_edges)


def example_suite_path():
    """Path of the example suite shipped with the package."""
    return os.path.join(os.path.dirname(__file__), "data", "example_suite.yaml")

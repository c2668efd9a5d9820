"""
Batch grasp analysis: scenario rows, gripper comparisons and pose jitter.

A row is one (scenario, gripper) pair. Rows never raise for grasp
failures; the error is recorded in the row and the batch continues.
"""
from dataclasses import dataclass, field, replace
import hashlib
import json
import logging
import math

import numpy as np

from . import contact, wrench
from .errors import DomainError, GraspError
from .geometry import Pose, grasp_site_for_size

log = logging.getLogger(__name__)

DOMINANCE_RTOL = 1e-6


@dataclass(frozen=True)
class AnalysisConfig:
    stiffness_k: float = contact.DEFAULT_STIFFNESS
    grid_spacing: float = 0.25
    flatten_threshold: float = 0.0
    cone_edges: int = wrench.DEFAULT_CONE_EDGES
    threshold: float = wrench.SECURE_THRESHOLD
    cap_mode: str = "jaw"
    gravity_dir: tuple = (0.0, -1.0, 0.0)
    mu: float = None  # overrides every object's mu when set
    seed: int = 0
    jitter_count: int = 0
    jitter_position: float = 1.0  # mm, uniform per axis
    jitter_angle: float = 5.0  # deg, uniform per Euler angle

    def __post_init__(self):
        if self.cap_mode not in wrench.CAP_MODES:
            raise DomainError(f"cap_mode must be one of {wrench.CAP_MODES}")
        if int(self.cone_edges) < 3:
            raise DomainError("cone_edges must be >= 3")
        if self.jitter_count < 0 or self.jitter_position < 0 or self.jitter_angle < 0:
            raise DomainError("jitter settings must be non-negative")
        if not any(self.gravity_dir):
            raise DomainError("gravity_dir must be non-zero")

    def contact_config(self):
        return contact.ContactConfig(
            stiffness_k=self.stiffness_k,
            grid_spacing=self.grid_spacing,
            flatten_threshold=self.flatten_threshold,
        )


@dataclass(frozen=True)
class Scenario:
    object: object
    site: object = "auto"  # mm or "auto"
    f_max: float = None
    threshold: float = None
    name: str = ""


@dataclass
class ComparisonReport:
    rows: list
    grippers: list
    secure_fraction: dict
    dominance: dict
    exclusions: list = field(default_factory=list)

    def as_dict(self):
        return {
            "grippers": self.grippers,
            "secure_fraction": self.secure_fraction,
            "dominance": self.dominance,
            "exclusions": self.exclusions,
        }


def resolve_site(gripper, obj, site):
    """Site in mm along the fingers.

    ``"auto"`` uses the V opening for V grippers and mid-finger for flat pairs.
    """
    if site != "auto":
        return float(site)
    if gripper.is_v:
        return grasp_site_for_size(gripper, obj.width_y())
    return 0.5 * gripper.length


def _num(x, digits=10):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    if x == 0.0:
        return 0.0
    return float(f"{x:.{digits}g}")


def _vec(v):
    return [_num(a) for a in v]


def analyze_grasp(gripper, obj, site_s, f_max, cfg, threshold):
    """Contact set, generators, envelope and verdicts for one pose."""
    cs = contact.close_jaws(gripper, obj, site_s, cfg.contact_config(), f_max)
    mu = obj.mu if cfg.mu is None else cfg.mu
    gens = wrench.grasp_matrix(cs, mu, cfg.cone_edges)
    standing = wrench.weight_wrench(obj, cfg.gravity_dir)
    env = wrench.torque_envelope(
        gens, point=obj.com_position(), standing=standing, threshold=threshold, cap_mode=cfg.cap_mode
    )
    return cs, gens, env


def scenario_hash(scenario, gripper, cfg):
    """Short stable digest of the row inputs."""
    blob = json.dumps([repr(scenario), repr(gripper), repr(cfg)], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_scenario(scenario, gripper, cfg=None, row_index=0):
    """Analyse one (scenario, gripper) pair and return a JSON-ready row."""
    cfg = cfg or AnalysisConfig()
    obj = scenario.object
    threshold = cfg.threshold if scenario.threshold is None else scenario.threshold
    f_max = gripper.f_max if scenario.f_max is None else float(scenario.f_max)
    row = {
        "scenario": scenario.name,
        "gripper": gripper.name,
        "object": obj.name,
        "hash": scenario_hash(scenario, gripper, cfg),
        "status": "ok",
        "error": None,
    }
    try:
        site = resolve_site(gripper, obj, scenario.site)
        cs, gens, env = analyze_grasp(gripper, obj, site, f_max, cfg, threshold)
        eps = wrench.epsilon_quality(gens)
        held, cap, weight = wrench.weight_hold_check(gens, obj, gravity_dir=cfg.gravity_dir, cap_mode=cfg.cap_mode)
    except GraspError as e:
        log.info("row %s/%s failed: %s", scenario.name, gripper.name, e)
        row.update(status=e.code, error=str(e))
        return row
    secure = True if threshold <= 0 else env.secure
    row.update(
        site_s=_num(site),
        f_max=_num(f_max),
        contacts=[
            {
                "finger": c.finger,
                "jaw": c.jaw,
                "kind": c.kind.value,
                "normal_force": _num(c.normal_force),
                "position": _vec(c.position),
                "normal": _vec(c.normal),
                "torsional_radius": _num(c.torsional_radius),
            }
            for c in cs.contacts
        ],
        residual=_num(np.abs(cs.residual_wrench).max()),
        tau_x_max=_num(env.tau_x_max),
        tau_y_max=_num(env.tau_y_max),
        tau_z_max=_num(env.tau_z_max),
        force_max=_vec(env.force_max),
        force_min=_num(env.force_max.min()),
        force_closure=bool(eps > 0),
        epsilon=_num(eps),
        weight=_num(weight),
        weight_capacity=_num(cap),
        weight_held=bool(held),
        secure=bool(secure),
    )
    if cfg.jitter_count > 0:
        row["jitter_secure_fraction"] = _num(jitter_secure_fraction(scenario, gripper, cfg, row_index))
    return row


def jittered_objects(obj, cfg, row_index=0):
    """Poses perturbed uniformly around ``obj.pose``; seeded by config and row."""
    rng = np.random.default_rng([cfg.seed, row_index])
    p0 = np.asarray(obj.pose.position, dtype=float)
    e0 = np.asarray(obj.pose.euler_xyz, dtype=float)
    out = []
    for _ in range(cfg.jitter_count):
        dp = rng.uniform(-cfg.jitter_position, cfg.jitter_position, 3)
        de = rng.uniform(-cfg.jitter_angle, cfg.jitter_angle, 3)
        out.append(replace(obj, pose=Pose(tuple(p0 + dp), tuple(e0 + de))))
    return out


def jitter_secure_fraction(scenario, gripper, cfg, row_index=0):
    """Fraction of jittered poses judged secure; failed poses count as insecure."""
    threshold = cfg.threshold if scenario.threshold is None else scenario.threshold
    f_max = gripper.f_max if scenario.f_max is None else float(scenario.f_max)
    site = resolve_site(gripper, scenario.object, scenario.site)
    ok = 0
    objs = jittered_objects(scenario.object, cfg, row_index)
    for obj in objs:
        try:
            _, _, env = analyze_grasp(gripper, obj, site, f_max, cfg, threshold)
            ok += bool(threshold <= 0 or env.secure)
        except GraspError:
            pass
    return ok / len(objs) if objs else float("nan")


def envelope_vector(row):
    """Envelope components compared for dominance: torques then sampled forces."""
    return np.array([row["tau_x_max"], row["tau_y_max"], row["tau_z_max"]] + list(row["force_max"]), dtype=float)


def dominates(a, b, rtol=DOMINANCE_RTOL):
    """True if envelope ``a`` is at least ``b`` in every component (ties allowed)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a >= b - rtol * np.maximum(np.abs(b), 1.0)))


def run_batch(scenarios, grippers, cfg=None):
    """Rows for every scenario x gripper pair, ordered by scenario then gripper."""
    cfg = cfg or AnalysisConfig()
    rows = []
    for i, s in enumerate(scenarios):
        for j, g in enumerate(grippers):
            rows.append(run_scenario(s, g, cfg, row_index=i * len(grippers) + j))
    return rows


def compare_grippers(scenarios, grippers, cfg=None, rows=None):
    """Evaluate the full cross product and summarise it per gripper.

    ``dominance[a][b]`` is the fraction of scenarios, among those where both
    grippers succeeded, on which ``a``'s envelope dominates ``b``'s.
    """
    if not scenarios or not grippers:
        raise ValueError("compare_grippers needs at least one scenario and one gripper")
    cfg = cfg or AnalysisConfig()
    rows = run_batch(scenarios, grippers, cfg) if rows is None else rows
    names = [g.name for g in grippers]
    ng = len(grippers)
    table = [rows[i * ng:(i + 1) * ng] for i in range(len(scenarios))]
    exclusions = [
        {"scenario": r["scenario"], "gripper": r["gripper"], "status": r["status"], "error": r["error"]}
        for r in rows
        if r["status"] != "ok"
    ]
    frac = {}
    for j, n in enumerate(names):
        good = [t[j] for t in table if t[j]["status"] == "ok"]
        frac[n] = _num(sum(r["secure"] for r in good) / len(good)) if good else None
    dom = {}
    for a in range(ng):
        dom[names[a]] = {}
        for b in range(ng):
            pairs = [(t[a], t[b]) for t in table if t[a]["status"] == "ok" and t[b]["status"] == "ok"]
            wins = sum(dominates(envelope_vector(ra), envelope_vector(rb)) for ra, rb in pairs)
            dom[names[a]][names[b]] = _num(wins / len(pairs)) if pairs else None
    return ComparisonReport(rows, names, frac, dom, exclusions)

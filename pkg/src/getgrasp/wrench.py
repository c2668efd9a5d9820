"""
Grasp wrench analysis.

Friction is a Coulomb cone discretised into ``m`` edges. Each contact
support vertex gets one generator per cone edge, all with unit normal force,
so the normal force carried by a contact is the plain sum of its generator
weights. Patch contacts also resist spin: their generators come in two
copies carrying ``+mu * r_t`` and ``-mu * r_t`` of torque about the vertex
normal (independent force and torsion caps).

Torques are in N mm about the grasp-frame origin. Inside LPs and hull
computations torques are divided by a characteristic length so that
force and torque rows have comparable scale.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import lp
from .contact import ContactKind, tangent_frame
from .errors import DomainError, SolverError
from .geometry import JAW_LOWER, JAW_UPPER

GRAVITY = 9.81  # m/s^2
DEFAULT_CONE_EDGES = 8
SECURE_THRESHOLD = 3.0  # N
CAP_MODES = ("jaw", "contact")


@dataclass
class WrenchGenerators:
    """Unit-normal-force wrench generators of a contact set.

    Attributes
    ----------
    wrenches : (n, 6) ndarray
        Force (N) and torque (N mm) per unit normal force.
    contact, jaw : (n,) ndarray of int
        Owning contact index and jaw of each generator.
    contact_caps : (k,) ndarray
        Allocated normal force per contact at ``actuation_force``.
    jaw_caps : (2,) ndarray
        Allocated normal force per jaw at ``actuation_force``.
    """

    wrenches: np.ndarray
    contact: np.ndarray
    jaw: np.ndarray
    contact_caps: np.ndarray
    jaw_caps: np.ndarray
    actuation_force: float
    mu: float
    cone_edges: int
    char_length: float

    @property
    def n(self):
        return len(self.wrenches)

    def counts(self):
        return np.bincount(self.contact, minlength=len(self.contact_caps))

    def scaled(self):
        """Generators as a (6, n) matrix with torques divided by ``char_length``."""
        W = self.wrenches.T.copy()
        W[3:] /= self.char_length
        return W


@dataclass
class DisturbanceEnvelope:
    """Largest resistible disturbances of a grasp.

    ``force_dirs`` are unit pure-force directions and ``force_max`` the
    matching magnitudes (N) with the standing weight, if any, included.
    """

    tau_x_max: float
    tau_y_max: float
    tau_z_max: float
    force_dirs: np.ndarray
    force_max: np.ndarray
    weight_held: bool = True
    threshold: float = SECURE_THRESHOLD

    def f_max_dir(self, d):
        """Resistible force along the sampled direction closest to ``d``."""
        d = np.asarray(d, dtype=float)
        i = int(np.argmax(self.force_dirs @ (d / np.linalg.norm(d))))
        return float(self.force_max[i])

    @property
    def secure(self):
        return bool(self.weight_held and self.force_max.min(initial=np.inf) >= self.threshold)

    def torques(self):
        return np.array([self.tau_x_max, self.tau_y_max, self.tau_z_max])

    def as_dict(self):
        return {
            "tau_x_max": self.tau_x_max,
            "tau_y_max": self.tau_y_max,
            "tau_z_max": self.tau_z_max,
            "force_min": float(self.force_max.min(initial=0.0)),
            "weight_held": self.weight_held,
            "secure": self.secure,
        }


def cube_directions():
    """The 26 face, edge and corner directions of a cube, as unit vectors."""
    d = np.array([(i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1) if (i, j, k) != (0, 0, 0)], float)
    return d / np.linalg.norm(d, axis=1)[:, None]


def _cone_dirs(normal, m, phase):
    t = tangent_frame(normal)
    ang = phase + 2.0 * math.pi * np.arange(m) / m
    return np.cos(ang)[:, None] * t[0] + np.sin(ang)[:, None] * t[1]


def grasp_matrix(cs, mu, cone_edges=DEFAULT_CONE_EDGES, phase=0.0, char_length=None):
    """Build wrench generators for a contact set.

    Parameters
    ----------
    cs : ContactSet
    mu : float
        Friction coefficient, >= 0.
    cone_edges : int
        Friction cone edges ``m``, >= 3.
    phase : float or sequence of float
        Rotation (rad) of each contact's tangent frame about its normal.
    char_length : float, optional
        Torque scale; defaults to ``cs.char_length``.

    Returns
    -------
    WrenchGenerators
        Point contacts give ``m`` generators, Line contacts ``2m`` (one set
        per endpoint) and Patch contacts ``2m`` per support vertex (both
        torsion signs). Duplicates (e.g. when ``mu = 0``) are dropped.
    """
    if not cs.contacts:
        raise DomainError("empty contact set")
    if mu < 0:
        raise DomainError("mu must be >= 0")
    if int(cone_edges) < 3:
        raise DomainError("cone_edges must be >= 3")
    m = int(cone_edges)
    phases = np.broadcast_to(np.asarray(phase, dtype=float), (len(cs.contacts),))
    rows, owner, jaws, caps = [], [], [], []
    for ci, c in enumerate(cs.contacts):
        rt = c.torsional_radius if c.kind is ContactKind.PATCH else 0.0
        signs = (1.0, -1.0) if rt > 0 and mu > 0 else (0.0,)
        for p, n in zip(c.vertices, c.vertex_normals):
            f = n[None, :] + mu * _cone_dirs(n, m, phases[ci])
            tau = np.cross(p, f)
            w = np.vstack([np.hstack([f, tau + sg * mu * rt * n]) for sg in signs])
            _, keep = np.unique(np.round(w, 12), axis=0, return_index=True)
            rows.append(w[np.sort(keep)])
            owner.append(np.full(len(keep), ci))
            jaws.append(np.full(len(keep), c.jaw))
        caps.append(float(c.vertex_weights.sum()))
    caps = np.array(caps)
    jaw_of_contact = np.array([c.jaw for c in cs.contacts])
    jaw_caps = np.array([caps[jaw_of_contact == j].sum() for j in (JAW_LOWER, JAW_UPPER)])
    return WrenchGenerators(
        wrenches=np.vstack(rows),
        contact=np.concatenate(owner).astype(np.int64),
        jaw=np.concatenate(jaws).astype(np.int64),
        contact_caps=caps,
        jaw_caps=jaw_caps,
        actuation_force=float(cs.actuation_force),
        mu=float(mu),
        cone_edges=m,
        char_length=float(char_length or cs.char_length),
    )


def _scaled(v, L):
    v = np.asarray(v, dtype=float).copy()
    v[3:] /= L
    return v


def max_disturbance(gens, direction, f_max=None, standing=None, cap_mode="jaw"):
    """Largest multiple of ``direction`` the grasp can resist.

    Maximises ``alpha`` over non-negative generator weights ``lam`` with
    ``G lam + alpha d + w0 = 0`` while the normal force drawn from each jaw
    (``cap_mode="jaw"``) or each contact (``cap_mode="contact"``) stays within
    its allocation, scaled to ``f_max``.

    Parameters
    ----------
    gens : WrenchGenerators
    direction : (6,) array_like
        Disturbance wrench applied to the object. Pure forces are taken per
        newton and pure torques per N mm; mixed directions are normalised
        with torques divided by ``gens.char_length`` and ``alpha`` is in N.
    f_max : float, optional
        Actuation force; defaults to the allocation's own.
    standing : (6,) array_like, optional
        Wrench already acting on the object (e.g. its weight).

    Returns
    -------
    float
        ``alpha >= 0``; 0 if even ``alpha = 0`` is infeasible.
    """
    if cap_mode not in CAP_MODES:
        raise DomainError(f"cap_mode must be one of {CAP_MODES}")
    L = gens.char_length
    d = np.asarray(direction, dtype=float)
    if d.shape != (6,) or not np.any(d):
        raise DomainError("direction must be a non-zero 6-vector")
    f_act = gens.actuation_force if f_max is None else float(f_max)
    if f_act <= 0:
        raise DomainError("f_max must be > 0")
    pure_torque = not np.any(d[:3])
    ds = d / np.linalg.norm(d[3:]) if pure_torque else _scaled(d, L) / np.linalg.norm(_scaled(d, L))
    if pure_torque:
        ds = _scaled(ds, L)
    w0 = np.zeros(6) if standing is None else _scaled(standing, L)

    G = gens.scaled()
    A_eq = np.hstack([G, ds[:, None]])
    caps_A, caps_b = _cap_rows(gens, f_act, cap_mode)
    A_ub = np.hstack([caps_A, np.zeros((len(caps_b), 1))])
    c = np.zeros(gens.n + 1)
    c[-1] = 1.0
    res = lp.maximize(c, A_eq, -w0, A_ub, caps_b)
    if res.status == lp.UNBOUNDED:
        raise SolverError("disturbance LP is unbounded")
    if res.status == lp.INFEASIBLE:
        return 0.0
    return max(0.0, float(res.objective))


def force_closure(gens):
    """True iff the generators positively span wrench space.

    Checked as full rank plus a strictly positive combination summing to the
    zero wrench (``G lam = 0`` with every ``lam >= 1``).
    """
    G = gens.scaled()
    if G.shape[1] < 7 or np.linalg.matrix_rank(G, tol=1e-9 * max(1.0, np.abs(G).max())) < 6:
        return False
    # lam = 1 + y, y >= 0
    res = lp.maximize(np.zeros(G.shape[1]), G, -G.sum(axis=1))
    return res.status == lp.OPTIMAL


def _hull_points(gens):
    W = gens.wrenches.copy()
    W[:, 3:] /= gens.char_length
    return W


def epsilon_quality(gens):
    """Radius of the largest origin-centred ball inside the generator hull.

    Torques are divided by ``gens.char_length``. Returns 0 for grasps that
    are not force closure.
    """
    if not force_closure(gens):
        return 0.0
    try:
        hull = ConvexHull(_hull_points(gens))
    except QhullError:
        return 0.0
    # Qhull facets satisfy normal @ x + offset <= 0 inside
    return max(0.0, float(np.min(-hull.equations[:, -1])))


def weight_wrench(obj, gravity_dir=(0.0, -1.0, 0.0), g=GRAVITY):
    """Weight of ``obj`` acting at its centre of mass (N, N mm)."""
    u = np.asarray(gravity_dir, dtype=float)
    u = u / np.linalg.norm(u)
    F = obj.mass * g * u
    return np.concatenate([F, np.cross(obj.com_position(), F)])


def weight_hold_check(gens, obj, f_max=None, gravity_dir=(0.0, -1.0, 0.0), cap_mode="jaw"):
    """Static weight test.

    Returns
    -------
    held : bool
    capacity : float
        Largest force along the gravity direction, applied at the centre of
        mass, that the grasp resists (N).
    weight : float
        ``mass * g`` (N).
    """
    w = weight_wrench(obj, gravity_dir)
    weight = float(np.linalg.norm(w[:3]))
    u = np.asarray(gravity_dir, dtype=float)
    u = u / np.linalg.norm(u)
    d = np.concatenate([u, np.cross(obj.com_position(), u)])
    cap = max_disturbance(gens, d, f_max, cap_mode=cap_mode)
    return cap >= weight, cap, weight


def torque_envelope(gens, f_max=None, force_dirs=None, point=None, standing=None,
                    threshold=SECURE_THRESHOLD, cap_mode="jaw"):
    """Torque limits about the grasp axes and resistible forces along sampled directions.

    Each torque entry is the smaller of the ``+`` and ``-`` directions.
    Forces act at ``point`` (default grasp origin) on top of the
    ``standing`` wrench.
    """
    dirs = cube_directions() if force_dirs is None else np.atleast_2d(np.asarray(force_dirs, dtype=float))
    dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    p = np.zeros(3) if point is None else np.asarray(point, dtype=float)
    tau = []
    for k in range(3):
        vals = []
        for sg in (1.0, -1.0):
            d = np.zeros(6)
            d[3 + k] = sg
            vals.append(max_disturbance(gens, d, f_max, cap_mode=cap_mode))
        tau.append(min(vals))
    held = True
    if standing is not None:
        res = lp.maximize(
            np.zeros(gens.n),
            gens.scaled(),
            -_scaled(standing, gens.char_length),
            *_cap_rows(gens, f_max, cap_mode),
        )
        held = res.status == lp.OPTIMAL
    fm = np.array([
        max_disturbance(gens, np.concatenate([u, np.cross(p, u)]), f_max, standing=standing, cap_mode=cap_mode)
        if held else 0.0
        for u in dirs
    ])
    return DisturbanceEnvelope(tau[0], tau[1], tau[2], dirs, fm, held, threshold)


def _cap_rows(gens, f_max, cap_mode):
    f_act = gens.actuation_force if f_max is None else float(f_max)
    scale = f_act / gens.actuation_force if gens.actuation_force > 0 else 0.0
    groups, caps = (gens.jaw, gens.jaw_caps) if cap_mode == "jaw" else (gens.contact, gens.contact_caps)
    A = np.array([groups == g for g in range(len(caps))], dtype=float)
    keep = A.any(axis=1)
    return A[keep], caps[keep] * scale


def secure_grasp_check(gens, obj, threshold=SECURE_THRESHOLD, f_max=None, point=None,
                       gravity_dir=(0.0, -1.0, 0.0), force_dirs=None, cap_mode="jaw"):
    """True iff the grasp holds the object's weight and resists ``threshold`` N
    along every sampled force direction applied at ``point`` (default: centre
    of mass)."""
    if threshold <= 0:
        return True
    p = obj.com_position() if point is None else point
    env = torque_envelope(gens, f_max, force_dirs, p, weight_wrench(obj, gravity_dir), threshold, cap_mode)
    return env.secure

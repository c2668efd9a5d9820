"""
Contact resolution under 1-DoF jaw closure.

Each finger pad is a planar gel layer on a rigid backing. The object pose is
held fixed while each jaw advances along the closure axis. Compliant pads
follow an elastic-foundation (Winkler) law: independent springs normal to
the pad with pressure ``k * indentation``. The jaw depth is root-found so
that the jaw carries the actuation force. Pads without gel (or a bottomed
out gel) behave rigidly and contact the object at its first-touch set.

Every pad yields at most one :class:`Contact`. The contact keeps a small
set of support vertices (patch extremes) with their own surface normals;
normal force may be placed anywhere in their convex hull, which is how a
patch resists moments by shifting its centre of pressure.
"""
from dataclasses import dataclass, field
from enum import Enum
import logging
import math

import numpy as np
from scipy.optimize import brentq

from . import _kernels, lp
from .errors import CapacityError, DomainError, GraspError, NoContactError, UnstablePoseError
from .geometry import JAW_LOWER, JAW_UPPER, GraspFrame, finger_footprint

log = logging.getLogger(__name__)

# Default elastic foundation modulus: a flat 10 x 10 mm patch at 1 mm depth carries 15 N.
DEFAULT_STIFFNESS = 0.15


class ContactKind(str, Enum):
    POINT = "point"
    LINE = "line"
    PATCH = "patch"


class GelBottomOut(GraspError):
    code = "gel_bottom_out"


@dataclass(frozen=True)
class ContactConfig:
    stiffness_k: float = DEFAULT_STIFFNESS
    grid_spacing: float = 0.25
    # contacts are evaluated on the pitched backing only below this actuation force
    flatten_threshold: float = 0.0
    rigid_touch_tol: float = 1e-4
    kind_threshold: float = 0.1
    equilibrium_tol: float = 1e-6

    def __post_init__(self):
        if not self.stiffness_k > 0:
            raise DomainError("stiffness_k must be > 0")
        if not self.grid_spacing > 0:
            raise DomainError("grid_spacing must be > 0")


@dataclass(frozen=True)
class GelModel:
    stiffness_k: float
    profile: object

    def __post_init__(self):
        if not self.stiffness_k > 0:
            raise DomainError("stiffness_k must be > 0")

    def max_indent(self, s):
        return self.profile.gel_thickness_at(s)


@dataclass
class Contact:
    position: np.ndarray
    normal: np.ndarray
    tangents: np.ndarray
    kind: ContactKind
    half_extents: tuple = (0.0, 0.0)
    normal_force: float = 0.0  # net force along ``normal``
    torsional_radius: float = 0.0
    jaw: int = JAW_LOWER
    finger: int = 0
    vertices: np.ndarray = None
    vertex_normals: np.ndarray = None
    vertex_weights: np.ndarray = None
    area: float = 0.0
    depth: float = 0.0
    bottomed_out: bool = False

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.normal = _unit(np.asarray(self.normal, dtype=float))
        if self.tangents is None:
            self.tangents = tangent_frame(self.normal)
        self.tangents = np.asarray(self.tangents, dtype=float)
        self.kind = ContactKind(self.kind)
        if self.vertices is None:
            self.vertices = self.position[None, :].copy()
            self.vertex_normals = self.normal[None, :].copy()
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if self.vertex_normals is None:
            self.vertex_normals = np.repeat(self.normal[None, :], len(self.vertices), axis=0)
        self.vertex_normals = np.atleast_2d(np.asarray(self.vertex_normals, dtype=float))
        if self.vertex_weights is None:
            self.vertex_weights = np.full(len(self.vertices), self.normal_force / len(self.vertices))
        if self.normal_force < 0:
            raise DomainError("normal force must be >= 0")

    @property
    def line_length(self):
        return 2.0 * max(self.half_extents) if self.kind is ContactKind.LINE else 0.0

    def wrench(self):
        """Wrench the contact's normal forces exert on the object."""
        f = self.vertex_weights[:, None] * self.vertex_normals
        tau = np.cross(self.vertices, f)
        return np.concatenate([f.sum(axis=0), tau.sum(axis=0)])


@dataclass
class ContactSet:
    contacts: list
    actuation_force: float
    grasp_site_s: float
    residual_wrench: np.ndarray = field(default_factory=lambda: np.zeros(6))
    frame: GraspFrame = None
    char_length: float = 100.0

    def jaw_squeeze(self, jaw):
        e = 1.0 if jaw == JAW_LOWER else -1.0
        return sum(c.wrench()[2] * e for c in self.contacts if c.jaw == jaw)

    def kinds(self):
        return [c.kind.value for c in self.contacts]

    def compute_residual(self):
        if not self.contacts:
            return np.zeros(6)
        return np.sum([c.wrench() for c in self.contacts], axis=0)


def _unit(v):
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("zero-length normal")
    return v / n


def tangent_frame(normal):
    """Tangents (2, 3) with t1 the projection of x onto the contact plane."""
    n = _unit(np.asarray(normal, dtype=float))
    for ref in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
        t1 = ref - (ref @ n) * n
        if np.linalg.norm(t1) > 1e-6:
            t1 = _unit(t1)
            return np.array([t1, np.cross(n, t1)])
    raise DomainError("cannot build tangent frame")


# --------------------------------------------------------------------------
# Pad sampling
# --------------------------------------------------------------------------


@dataclass
class PadSamples:
    """Samples of one pad footprint in the grasp frame.

    Cell samples carry their cell area; boundary and refinement samples
    have zero area and only take part in first-touch detection.
    """

    finger: int
    jaw: int
    site_s: float
    polygon: np.ndarray  # footprint in finger coordinates
    profile: object
    tan_pitch: float
    x: np.ndarray
    y: np.ndarray
    area: np.ndarray
    max_indent: np.ndarray = None
    pitch_offset: np.ndarray = None
    hit: np.ndarray = None
    z_surf: np.ndarray = None  # object surface facing the pad
    n_in: np.ndarray = None  # inward object normal at z_surf
    height: np.ndarray = None  # approach distance from the jaw datum
    gap: np.ndarray = None

    def __post_init__(self):
        xf = self.x + self.site_s
        self.max_indent = np.asarray(self.profile.gel_thickness_at(xf), dtype=float)
        self.pitch_offset = xf * self.tan_pitch

    def surface(self, obj, x, y):
        """Approach height, surface z, inward normal and hit mask at (x, y)."""
        ok, zb, zt, nb, nt = obj.vertical_profile(np.column_stack([x, y]))
        off = (np.asarray(x) + self.site_s) * self.tan_pitch
        if self.jaw == JAW_LOWER:
            z = np.where(ok, zb, np.inf)
            return z - off, z, -nb, ok
        z = np.where(ok, zt, -np.inf)
        return -(z + off), z, -nt, ok

    def profile_object(self, obj):
        self.height, self.z_surf, self.n_in, self.hit = self.surface(obj, self.x, self.y)
        return self.height

    def inside(self, x, y):
        return _inside_convex(self.polygon, np.asarray(x) + self.site_s, np.asarray(y))

    def extend(self, obj, x, y):
        """Append zero-area samples (already known to lie inside the pad)."""
        h, z, n, ok = self.surface(obj, x, y)
        self.x = np.concatenate([self.x, x])
        self.y = np.concatenate([self.y, y])
        self.area = np.concatenate([self.area, np.zeros(len(x))])
        self.height = np.concatenate([self.height, h])
        self.z_surf = np.concatenate([self.z_surf, z])
        self.n_in = np.vstack([self.n_in, n])
        self.hit = np.concatenate([self.hit, ok])
        xf = self.x + self.site_s
        self.max_indent = np.asarray(self.profile.gel_thickness_at(xf), dtype=float)
        self.pitch_offset = xf * self.tan_pitch


def _inside_convex(P, xs, ys, eps=1e-12):
    inside = np.ones(np.shape(xs), dtype=bool)
    for i in range(len(P)):
        (x0, y0), (x1, y1) = P[i], P[(i + 1) % len(P)]
        cross = (x1 - x0) * (ys - y0) - (y1 - y0) * (xs - x0)
        inside &= cross >= -eps
    return inside


def sample_pad(gripper, finger_index, obj, site_s, spacing, pitched=False):
    """Sample a pad footprint near the object.

    Cell centres sit on a lattice ``((i + 1/2) h, (j + 1/2) h)`` in finger
    coordinates, which is mirror-symmetric about the gripper centerline, so
    mirrored fingers get mirrored samples. Boundary samples are ten times
    denser than the cells.
    """
    prof = gripper.fingers[finger_index]
    P = finger_footprint(gripper, finger_index)
    lo, hi = obj.aabb()
    ox0, ox1 = max(lo[0] + site_s, P[:, 0].min()) - spacing, min(hi[0] + site_s, P[:, 0].max()) + spacing
    oy0, oy1 = max(lo[1], P[:, 1].min()) - spacing, min(hi[1], P[:, 1].max()) + spacing
    xs = (np.arange(math.floor(ox0 / spacing), math.ceil(ox1 / spacing)) + 0.5) * spacing
    ys = (np.arange(math.floor(oy0 / spacing), math.ceil(oy1 / spacing)) + 0.5) * spacing
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    keep = _inside_convex(P, X, Y)
    X, Y = X[keep], Y[keep]

    bxs, bys = [], []
    step = spacing / 10.0
    for i in range(len(P)):
        a, b = P[i], P[(i + 1) % len(P)]
        n = max(2, int(math.ceil(np.linalg.norm(b - a) / step)) + 1)
        t = np.linspace(0.0, 1.0, n)
        seg = a[None, :] + t[:, None] * (b - a)[None, :]
        m = (seg[:, 0] >= ox0) & (seg[:, 0] <= ox1) & (seg[:, 1] >= oy0) & (seg[:, 1] <= oy1)
        bxs.append(seg[m, 0])
        bys.append(seg[m, 1])
    BX = np.concatenate(bxs)
    BY = np.concatenate(bys)

    return PadSamples(
        finger=finger_index,
        jaw=gripper.jaw_of(finger_index),
        site_s=float(site_s),
        polygon=P,
        profile=prof,
        tan_pitch=math.tan(math.radians(prof.backing_pitch_theta)) if pitched else 0.0,
        x=np.concatenate([X, BX]) - site_s,
        y=np.concatenate([Y, BY]),
        area=np.concatenate([np.full(X.size, spacing * spacing), np.zeros(BX.size)]),
    )


def _refine_touch(ps, obj, spacing, rounds=3, n=21):
    """Add nested fine grids around the lowest sample to resolve the first-touch set."""
    if not ps.hit.any():
        return
    h = np.where(ps.hit, ps.height, np.inf)
    i = int(np.argmin(h))
    cx, cy = ps.x[i], ps.y[i]
    half = spacing
    for _ in range(rounds):
        g = np.linspace(-half, half, n)
        X, Y = np.meshgrid(cx + g, cy + g, indexing="ij")
        X, Y = X.ravel(), Y.ravel()
        m = ps.inside(X, Y)
        if not m.any():
            return
        ps.extend(obj, X[m], Y[m])
        h = np.where(ps.hit, ps.height, np.inf)
        i = int(np.argmin(h))
        cx, cy = ps.x[i], ps.y[i]
        half = 2.0 * half / (n - 1)


# --------------------------------------------------------------------------
# Winkler indentation
# --------------------------------------------------------------------------


@dataclass
class Indentation:
    pressure: np.ndarray
    normal_force: float
    centroid_xy: tuple
    patch_area: float
    torsional_radius: float
    bottomed_out: bool


def winkler_patch(gap, max_indent, cell_area, xs, ys, k, depth):
    """Pressure field and resultants for springs closed by ``depth - gap``."""
    gap = np.ascontiguousarray(gap, dtype=float)
    p, f, mx, my, bottomed = _kernels.winkler_integrate(
        gap,
        np.ascontiguousarray(max_indent, dtype=float),
        float(depth),
        float(k),
        np.ascontiguousarray(cell_area, dtype=float),
        np.ascontiguousarray(xs, dtype=float),
        np.ascontiguousarray(ys, dtype=float),
    )
    area = float(cell_area[(p > 0)].sum())
    c = (mx / f, my / f) if f > 0 else (float("nan"), float("nan"))
    return Indentation(p, f, c, area, math.sqrt(area / math.pi), bottomed)


def gel_indent(obj, gripper, finger_index, site_s, depth, gel=None, spacing=0.25, strict=True):
    """Indent one pad into the object by ``depth`` past its first touch.

    Returns ``(contact, indentation)``. The contact kind follows the patch
    extents; ``depth = 0`` gives a zero-force point contact.

    Raises
    ------
    GelBottomOut
        If ``strict`` and the indentation exceeds the local gel thickness.
    """
    prof = gripper.fingers[finger_index]
    gel = gel or GelModel(DEFAULT_STIFFNESS, prof)
    if depth < 0:
        raise DomainError("depth must be >= 0")
    ps = sample_pad(gripper, finger_index, obj, site_s, spacing)
    height = ps.profile_object(obj)
    if not ps.hit.any():
        raise NoContactError(f"finger {finger_index} misses the object")
    ps.gap = height - height[ps.hit].min()
    ps.max_indent = gel.max_indent(ps.x + site_s)
    ind = winkler_patch(_cell_gap(ps), ps.max_indent, ps.area, ps.x, ps.y, gel.stiffness_k, depth)
    if ind.bottomed_out and strict:
        raise GelBottomOut(f"depth {depth} exceeds the gel thickness on finger {finger_index}")
    if depth == 0 or ind.normal_force <= 0:
        idx = np.flatnonzero(ps.hit & (ps.gap <= 0))
        contact = _build_contact(ps, idx, np.ones(idx.size), ContactConfig(), rigid=True)
        contact.kind = ContactKind.POINT
        contact.half_extents = (0.0, 0.0)
        contact.torsional_radius = 0.0
        contact.area = 0.0
        contact.vertices = contact.position[None, :].copy()
        contact.vertex_normals = contact.normal[None, :].copy()
        contact.vertex_weights = np.zeros(1)
        return contact, ind
    idx = np.flatnonzero(ind.pressure > 0)
    contact = _build_contact(ps, idx, ind.pressure[idx] * ps.area[idx], ContactConfig(), rigid=False)
    contact.normal_force = ind.normal_force
    contact.depth = float(depth)
    contact.bottomed_out = ind.bottomed_out
    contact.vertex_weights = np.full(len(contact.vertices), ind.normal_force / len(contact.vertices))
    return contact, ind


def _cell_gap(ps):
    # boundary samples and misses never carry pressure
    return np.where(ps.hit & (ps.area > 0), ps.gap, np.inf)


def _build_contact(ps, idx, weights, cfg, rigid):
    pts = np.column_stack([ps.x[idx], ps.y[idx], ps.z_surf[idx]])
    nin = ps.n_in[idx]
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        w = np.ones(len(idx))
    w = w / w.sum()
    centroid = w @ pts
    normal = _unit(w @ nin)
    tangents = tangent_frame(normal)
    rel = pts - centroid
    u = rel @ tangents[0]
    v = rel @ tangents[1]
    ha = 0.5 * (u.max() - u.min())
    hb = 0.5 * (v.max() - v.min())
    thr = cfg.kind_threshold
    if ha < thr and hb < thr:
        kind = ContactKind.POINT
    elif ha < thr or hb < thr:
        kind = ContactKind.LINE
    else:
        kind = ContactKind.PATCH

    uc = 0.5 * (u.max() + u.min())
    vc = 0.5 * (v.max() + v.min())
    if kind is ContactKind.POINT:
        verts, vnorms = centroid[None, :], normal[None, :]
    else:
        axes = [(u, v - vc), (v, u - uc)]
        if kind is ContactKind.LINE:
            axes = [axes[0]] if ha >= hb else [axes[1]]
        vl, nl = [], []
        for along, across in axes:
            for sgn in (1.0, -1.0):
                score = sgn * along
                cand = np.flatnonzero(score >= score.max() - 1e-9)
                a = np.abs(across[cand])
                # average ties so mirrored pads give mirrored vertices
                cand = cand[a <= a.min() + 1e-9]
                vl.append(pts[cand].mean(axis=0))
                nl.append(_unit(nin[cand].mean(axis=0)))
        keep = sorted(np.unique(np.round(np.array(vl), 12), axis=0, return_index=True)[1])
        verts, vnorms = np.array(vl)[keep], np.array(nl)[keep]
    area = 0.0
    rt = 0.0
    if kind is ContactKind.PATCH:
        area = float(ps.area[idx].sum())
        rt = math.sqrt(area / math.pi)
    return Contact(
        position=centroid,
        normal=normal,
        tangents=tangents,
        kind=kind,
        half_extents=(float(ha), float(hb)),
        torsional_radius=rt,
        jaw=ps.jaw,
        finger=ps.finger,
        vertices=verts,
        vertex_normals=vnorms,
        vertex_weights=np.zeros(len(verts)),
        area=area,
    )


# --------------------------------------------------------------------------
# Jaw closure
# --------------------------------------------------------------------------


def _close_one_jaw(pads, obj, gripper, f_target, cfg, site_s):
    """Resolve the contacts of one jaw; returns a list of (contact, nominal force)."""
    for ps in pads:
        ps.profile_object(obj)
    rigid = any(gripper.fingers[ps.finger].gel_thickness_base <= 0 for ps in pads)
    if rigid:
        for ps in pads:
            _refine_touch(ps, obj, cfg.grid_spacing)
    hits = [ps.height[ps.hit] for ps in pads]
    if not any(h.size for h in hits):
        return []
    touch = min(h.min() for h in hits if h.size)
    for ps in pads:
        ps.gap = ps.height - touch

    out = []
    if not rigid:
        k = cfg.stiffness_k
        cells = [_cell_gap(ps) for ps in pads]

        def force(d):
            return sum(
                _kernels.winkler_integrate(g, ps.max_indent, d, k, ps.area, ps.x, ps.y)[1]
                for g, ps in zip(cells, pads)
            )

        d_bottom = min(
            (np.min(np.where(np.isfinite(g), g + ps.max_indent, np.inf)) for g, ps in zip(cells, pads)),
            default=np.inf,
        )
        if not np.isfinite(d_bottom):
            rigid = True
        else:
            if force(d_bottom) <= f_target:
                depth = d_bottom
                log.debug("gel bottomed out on jaw at depth %.4f", depth)
            else:
                depth = brentq(lambda d: force(d) - f_target, 0.0, d_bottom, xtol=1e-12, rtol=1e-12)
            for g, ps in zip(cells, pads):
                ind = winkler_patch(g, ps.max_indent, ps.area, ps.x, ps.y, k, depth)
                idx = np.flatnonzero(ind.pressure > 0)
                if idx.size == 0:
                    continue
                c = _build_contact(ps, idx, ind.pressure[idx] * ps.area[idx], cfg, rigid=False)
                c.depth = float(depth)
                c.bottomed_out = bool(depth >= d_bottom - 1e-12)
                out.append((c, ind.normal_force))
            if not out:
                rigid = True
    if rigid:
        for ps in pads:
            idx = np.flatnonzero(ps.hit & (ps.gap <= cfg.rigid_touch_tol))
            if idx.size == 0:
                continue
            c = _build_contact(ps, idx, np.ones(idx.size), cfg, rigid=True)
            out.append((c, 1.0))
    return out


def close_jaws(gripper, obj, site_s, config=None, f_max=None):
    """Close both jaws on ``obj`` at site ``s`` and return a balanced ContactSet.

    Raises
    ------
    DomainError
        ``site_s`` outside the finger.
    CapacityError
        The object is taller than the jaw opening.
    NoContactError
        A jaw does not touch the object.
    UnstablePoseError
        No non-negative normal-force allocation balances the object.
    """
    cfg = config or ContactConfig()
    f_act = gripper.f_max if f_max is None else float(f_max)
    if not (0.0 <= site_s <= gripper.length):
        raise DomainError(f"site s={site_s} outside [0, {gripper.length}]")
    pitched = f_act < cfg.flatten_threshold
    pads = [sample_pad(gripper, i, obj, site_s, cfg.grid_spacing, pitched) for i in range(len(gripper.fingers))]
    zlo, zhi = np.inf, -np.inf
    for ps in pads:
        ok, zb, zt, _, _ = obj.vertical_profile(np.column_stack([ps.x, ps.y]))
        if ok.any():
            zlo = min(zlo, zb[ok].min())
            zhi = max(zhi, zt[ok].max())
    if not np.isfinite(zlo):
        raise NoContactError("object lies outside the finger footprints")
    if zhi - zlo > gripper.jaw_opening_max:
        raise CapacityError(f"object height {zhi - zlo:.2f} mm exceeds jaw opening {gripper.jaw_opening_max} mm")

    found = []
    for jaw in (JAW_LOWER, JAW_UPPER):
        jp = [ps for ps in pads if ps.jaw == jaw]
        res = _close_one_jaw(jp, obj, gripper, f_act, cfg, site_s)
        if not res:
            raise NoContactError(f"{'lower' if jaw == JAW_LOWER else 'upper'} jaw does not touch the object")
        found.extend(res)
    found.sort(key=lambda cn: cn[0].finger)
    contacts = [c for c, _ in found]
    for c, nominal in found:
        c.vertex_weights = np.full(len(c.vertices), nominal / len(c.vertices))
        c.normal_force = float(nominal)
    cs = ContactSet(
        contacts=contacts,
        actuation_force=f_act,
        grasp_site_s=float(site_s),
        frame=GraspFrame.at_site(site_s),
        char_length=float(gripper.length),
    )
    return contact_force_distribution(cs, f_act, tol=cfg.equilibrium_tol)


# --------------------------------------------------------------------------
# Force allocation
# --------------------------------------------------------------------------


def _equilibrium_system(contacts, f_max, char_length):
    V = np.vstack([c.vertices for c in contacts])
    N = np.vstack([c.vertex_normals for c in contacts])
    jaws = np.concatenate([[c.jaw] * len(c.vertices) for c in contacts])
    W = np.vstack([N.T, np.cross(V, N).T / char_length])  # (6, nv)
    rows = [W[0], W[1], W[3], W[4], W[5]]  # z-force balance follows from the jaw rows
    rhs = [0.0] * 5
    for jaw, e in ((JAW_LOWER, 1.0), (JAW_UPPER, -1.0)):
        rows.append(np.where(jaws == jaw, e * N[:, 2], 0.0))
        rhs.append(f_max)
    return np.array(rows), np.array(rhs)


def _residual_ok(cs, f_max, tol):
    r = cs.compute_residual()
    fs = max(f_max, 1e-12)
    return np.abs(r[:3]).max() <= tol * fs and np.abs(r[3:]).max() <= tol * fs * cs.char_length


def _least_residual(A, b):
    """Non-negative ``x`` minimising ``sum |A x - b|`` (an always-feasible LP)."""
    k, n = A.shape
    c = np.concatenate([np.zeros(n), -np.ones(2 * k)])
    res = lp.maximize(c, np.hstack([A, np.eye(k), -np.eye(k)]), b)
    return res.x[:n]


def _nearest_balanced(A, b, target, x0, max_iter=500):
    """Solve ``min |x - target|^2`` s.t. ``A x = b``, ``x >= 0`` by a primal active set.

    ``x0`` must be feasible. The objective is strictly convex, so the
    minimiser is unique; symmetric inputs give symmetric allocations.
    """
    x = np.array(x0, dtype=float)
    scale = max(1.0, np.abs(x).max(), np.abs(target).max())
    eps = 1e-12 * scale
    fixed = x <= eps
    x[fixed] = 0.0
    for _ in range(max_iter):
        free = ~fixed
        Af = A[:, free]
        lam = np.linalg.lstsq(Af @ Af.T, Af @ target[free] - b, rcond=None)[0]
        y = np.zeros_like(x)
        y[free] = target[free] - Af.T @ lam
        p = y - x
        if np.abs(p).max() <= eps:
            # stationary on this face: release the most negative multiplier
            mult = (x - target) + A.T @ lam
            mult[free] = 0.0
            j = int(np.argmin(mult))
            if mult[j] >= -1e-10 * scale:
                break
            fixed[j] = False
            continue
        step, block = 1.0, -1
        for i in np.flatnonzero(free & (p < 0)):
            t = -x[i] / p[i]
            if t < step:
                step, block = t, i
        x = x + step * p
        if block >= 0:
            x[block] = 0.0
            fixed[block] = True
    return np.clip(x, 0.0, None)


def contact_force_distribution(cs, f_max, tol=1e-6):
    """Scale and balance normal forces so each jaw squeezes with ``f_max``.

    The nominal split (Winkler forces, or equal shares for rigid contacts) is
    kept when it already balances the object; otherwise the closest
    balanced non-negative allocation (least squares over the vertex weights)
    is used. It is unique, so mirrored contacts get equal forces.

    Raises
    ------
    UnstablePoseError
        No non-negative allocation is in equilibrium.
    """
    contacts = cs.contacts
    if not contacts:
        raise NoContactError("empty contact set")
    if f_max < 0:
        raise DomainError("f_max must be >= 0")
    sizes = [len(c.vertices) for c in contacts]
    splits = np.cumsum(sizes)[:-1]
    if f_max == 0:
        for c in contacts:
            c.vertex_weights = np.zeros(len(c.vertices))
            c.normal_force = 0.0
        cs.actuation_force = 0.0
        cs.residual_wrench = np.zeros(6)
        return cs

    A, b = _equilibrium_system(contacts, f_max, cs.char_length)
    nominal = np.concatenate([c.vertex_weights for c in contacts]).astype(float)
    jaw_rows = A[-2:]
    for r in range(2):
        mask = jaw_rows[r] != 0
        sq = jaw_rows[r] @ nominal
        if sq > 0:
            nominal[mask] *= f_max / sq
    sigma = nominal
    if np.abs(A @ sigma - b).max() > 1e-12 * f_max:
        x0 = lp.feasible(A_eq=A, b_eq=b, n=A.shape[1])
        if x0 is None:
            # tie-averaged vertices balance only to round-off; accept the
            # least-residual allocation and let the tolerance check decide
            x0 = _least_residual(A, b)
        sigma = _nearest_balanced(A, b, nominal, x0)
    for c, w in zip(contacts, np.split(sigma, splits)):
        c.vertex_weights = w
        c.normal_force = float(w @ (c.vertex_normals @ c.normal))
    cs.actuation_force = float(f_max)
    cs.residual_wrench = cs.compute_residual()
    if not _residual_ok(cs, f_max, tol):
        raise UnstablePoseError(f"equilibrium residual {np.abs(cs.residual_wrench).max():.3g} above tolerance")
    return cs


def point_contact_set(positions, normals, jaws, f_max, kinds=None, torsional_radii=None,
                      char_length=100.0, tol=1e-6):
    """Balanced ContactSet from explicit contact points.

    Parameters
    ----------
    positions, normals : (k, 3) array_like
        Contact points and inward (object-facing) normals in the grasp frame.
    jaws : sequence of int
        Jaw of each contact.
    kinds : sequence of str, optional
        Contact kinds (default all ``"point"``). Vertices stay at the
        contact point; ``torsional_radii`` applies to patches.
    """
    P = np.atleast_2d(np.asarray(positions, dtype=float))
    N = np.atleast_2d(np.asarray(normals, dtype=float))
    k = len(P)
    kinds = kinds or ["point"] * k
    radii = torsional_radii if torsional_radii is not None else [0.0] * k
    contacts = []
    for i in range(k):
        n = _unit(N[i])
        c = Contact(P[i], n, None, kinds[i], torsional_radius=float(radii[i]), jaw=int(jaws[i]), finger=i,
                    normal_force=1.0)
        if c.kind is ContactKind.PATCH and c.torsional_radius > 0:
            c.area = math.pi * c.torsional_radius**2
        contacts.append(c)
    cs = ContactSet(contacts=contacts, actuation_force=float(f_max), grasp_site_s=0.0,
                    frame=GraspFrame.at_site(0.0), char_length=float(char_length))
    return contact_force_distribution(cs, float(f_max), tol=tol)

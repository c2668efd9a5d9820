"""
Parametric finger, gripper and object geometry.

Coordinate conventions
----------------------
Finger coordinates put the finger bases on the line ``x = 0`` with fingers
extending along +x; ``s`` is the distance along x from the base. The jaw
plane is x-y. The grasp frame used by the contact and wrench code has its
origin at ``(s, 0, 0)`` of the grasp site, x along the fingers, z along the
jaw-closure axis and y completing the right-handed triad.

The lower jaw (pads facing +z) carries the single flat finger of a
``FLAT_PAIR`` or the two V fingers of a ``V_PAIR_PLUS_SINGLE``; the upper jaw
(pads facing -z) carries the other flat finger or the single finger.

Units are mm, N, N*mm, kg and degrees throughout.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
import math

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import CapacityError, DomainError, NoLeverArmError

JAW_LOWER = 0
JAW_UPPER = 1

# grasp_site_for_size keeps 10% of L(s) spare
SITE_MARGIN = 0.10


class Arrangement(str, Enum):
    FLAT_PAIR = "flat_pair"
    V_PAIR_PLUS_SINGLE = "v_pair_plus_single"


@dataclass(frozen=True)
class FingerProfile:
    """One finger. Widths and gel thickness vary linearly from base to tip."""

    length: float
    width_base: float
    width_tip: float
    gel_thickness_base: float = 4.5
    gel_thickness_tip: float = 1.5
    backing_pitch_theta: float = 0.0
    nail_length: float = 0.0
    nail_width: float = 0.0

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"finger length must be > 0, got {self.length}")
        if not (self.width_base >= self.width_tip > 0):
            raise DomainError("finger widths must satisfy width_base >= width_tip > 0")
        if not (self.gel_thickness_base >= self.gel_thickness_tip >= 0):
            raise DomainError("gel thickness must satisfy base >= tip >= 0")
        if not (0.0 <= self.backing_pitch_theta < 45.0):
            raise DomainError("backing pitch must lie in [0, 45) degrees")
        if self.nail_length < 0 or self.nail_width < 0:
            raise DomainError("nail dimensions must be non-negative")

    def _lerp(self, base, tip, s):
        t = np.clip(np.asarray(s, dtype=float) / self.length, 0.0, 1.0)
        return base + (tip - base) * t

    def width_at(self, s):
        return self._lerp(self.width_base, self.width_tip, s)

    def gel_thickness_at(self, s):
        return self._lerp(self.gel_thickness_base, self.gel_thickness_tip, s)

    @property
    def taper_ratio(self):
        return self.width_tip / self.width_base


@dataclass(frozen=True)
class GripperConfig:
    arrangement: Arrangement
    fingers: tuple
    v_half_angle: float = 0.0
    base_separation: float = 0.0
    jaw_opening_max: float = 100.0
    f_max: float = 15.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "arrangement", Arrangement(self.arrangement))
        object.__setattr__(self, "fingers", tuple(self.fingers))
        if self.arrangement is Arrangement.FLAT_PAIR and len(self.fingers) != 2:
            raise DomainError("a flat pair needs exactly 2 fingers")
        if self.arrangement is Arrangement.V_PAIR_PLUS_SINGLE:
            if len(self.fingers) != 3:
                raise DomainError("a V pair plus single needs exactly 3 fingers")
            if not (self.base_separation > 0 and 0 < self.v_half_angle < 90):
                raise DomainError("V pair needs base_separation > 0 and 0 < v_half_angle < 90")
        if not self.f_max > 0:
            raise DomainError("f_max must be > 0")
        if not self.jaw_opening_max > 0:
            raise DomainError("jaw_opening_max must be > 0")

    @property
    def is_v(self):
        return self.arrangement is Arrangement.V_PAIR_PLUS_SINGLE

    @property
    def length(self):
        return max(f.length for f in self.fingers)

    def jaw_of(self, finger_index):
        if self.is_v:
            return JAW_UPPER if finger_index == 2 else JAW_LOWER
        return JAW_LOWER if finger_index == 0 else JAW_UPPER


# --------------------------------------------------------------------------
# Grasp frame
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GraspFrame:
    """Grasp frame expressed in finger coordinates."""

    origin: tuple = (0.0, 0.0, 0.0)
    axes: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

    def __post_init__(self):
        R = np.asarray(self.axes, dtype=float)
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9) or np.linalg.det(R) < 0:
            raise DomainError("grasp frame axes must be orthonormal and right-handed")

    @classmethod
    def at_site(cls, s):
        return cls(origin=(float(s), 0.0, 0.0))

    def to_frame(self, points):
        R = np.asarray(self.axes, dtype=float)
        return (np.asarray(points, dtype=float) - np.asarray(self.origin)) @ R.T


# --------------------------------------------------------------------------
# Lever arm, site selection, interdigitation, rescaling
# --------------------------------------------------------------------------


def lever_arm(gripper, s):
    """Distance between the two V-finger centerlines at ``s`` (mm).

    ``L(s) = base_separation - 2 s tan(v_half_angle)``, clamped at 0.
    """
    if not gripper.is_v:
        raise NoLeverArmError("no lever arm defined for a flat pair")
    length = gripper.fingers[0].length
    if not (0.0 <= s <= length):
        raise DomainError(f"s={s} outside [0, {length}]")
    L = gripper.base_separation - 2.0 * s * math.tan(math.radians(gripper.v_half_angle))
    return max(L, 0.0)


def grasp_site_for_size(gripper, object_extent):
    """Most distal site whose V opening fits ``object_extent`` with margin.

    The site is the largest ``s`` with ``L(s) >= object_extent / (1 - margin)``;
    when that target exceeds ``base_separation`` but the object still fits,
    the base (``s = 0``) is returned.
    """
    if not gripper.is_v:
        raise NoLeverArmError("site selection needs a V pair")
    if object_extent < 0:
        raise DomainError("object extent must be non-negative")
    B = gripper.base_separation
    if object_extent > B:
        raise CapacityError(f"object exceeds gripper capacity ({object_extent} > {B} mm)")
    length = gripper.fingers[0].length
    target = min(object_extent / (1.0 - SITE_MARGIN), B)
    tan_a = math.tan(math.radians(gripper.v_half_angle))
    s = (B - target) / (2.0 * tan_a)
    return float(min(max(s, 0.0), length))


def finger_centerline_y(gripper, index, x):
    """Centerline y of finger ``index`` at axial position ``x``."""
    if gripper.is_v and index < 2:
        c = gripper.base_separation / 2.0 - np.asarray(x, dtype=float) * math.tan(
            math.radians(gripper.v_half_angle)
        )
        return c if index == 0 else -c
    return np.zeros_like(np.asarray(x, dtype=float))


def finger_footprint(gripper, index):
    """Counter-clockwise footprint polygon (4, 2) of a finger pad in finger coordinates.

    Widths are measured along y at constant x, so the pad's cross-section at
    any ``s`` is ``centerline(s) +/- width(s)/2``.
    """
    prof = gripper.fingers[index]
    x0, x1 = 0.0, prof.length
    c0, c1 = finger_centerline_y(gripper, index, np.array([x0, x1]))
    h0, h1 = prof.width_base / 2.0, prof.width_tip / 2.0
    return np.array([[x0, c0 - h0], [x1, c1 - h1], [x1, c1 + h1], [x0, c0 + h0]])


def _polygon_area(P):
    x, y = P[:, 0], P[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def convex_polygons_overlap(P, Q, eps=1e-12):
    """Positive-area overlap test for convex polygons (separating axes).

    Polygons that only touch along an edge or at a vertex do not overlap.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    scale = max(np.abs(P).max(), np.abs(Q).max(), 1.0)
    if _polygon_area(P) <= eps * scale**2 or _polygon_area(Q) <= eps * scale**2:
        return False
    for poly in (P, Q):
        edges = np.roll(poly, -1, axis=0) - poly
        for ex, ey in edges:
            axis = np.array([-ey, ex])
            norm = math.hypot(ex, ey)
            if norm == 0.0:
                continue
            axis /= norm
            p = P @ axis
            q = Q @ axis
            if p.max() <= q.min() + eps * scale or q.max() <= p.min() + eps * scale:
                return False
    return True


def interdigitation_check(gripper):
    """True iff the flattened single-finger footprint clears both V fingers."""
    if not gripper.is_v:
        raise NoLeverArmError("interdigitation is defined for a V pair only")
    single = finger_footprint(gripper, 2)
    return not any(convex_polygons_overlap(single, finger_footprint(gripper, i)) for i in (0, 1))


def scale_finger(profile, new_length, uniform=False):
    """Resize a finger to ``new_length``.

    Longitudinal dimensions (length, nail length) always scale. Widths, gel
    thicknesses and nail width scale only when ``uniform`` is set. Angles are
    never changed.
    """
    if not new_length > 0:
        raise DomainError(f"new_length must be > 0, got {new_length}")
    r = new_length / profile.length
    k = r if uniform else 1.0
    return replace(
        profile,
        length=float(new_length),
        nail_length=profile.nail_length * r,
        width_base=profile.width_base * k,
        width_tip=profile.width_tip * k,
        gel_thickness_base=profile.gel_thickness_base * k,
        gel_thickness_tip=profile.gel_thickness_tip * k,
        nail_width=profile.nail_width * k,
    )


def scale_gripper(gripper, new_length, uniform=True):
    """Rescale every finger; with ``uniform`` the V base separation follows."""
    r = new_length / gripper.length
    fingers = tuple(scale_finger(f, f.length * r, uniform) for f in gripper.fingers)
    sep = gripper.base_separation * r if uniform else gripper.base_separation
    return replace(gripper, fingers=fingers, base_separation=sep)


# --------------------------------------------------------------------------
# Objects
# --------------------------------------------------------------------------
# Each primitive clips the line o + t d (local frame, |d| = 1) and returns
# the parameter interval plus the local outward normals at both ends.


def _clip_halfspaces(o, d, A, b):
    ad = A @ d
    ao = o @ A.T
    n = o.shape[0]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    ilo = np.full(n, -1)
    ihi = np.full(n, -1)
    ok = np.ones(n, dtype=bool)
    for k in range(A.shape[0]):
        if abs(ad[k]) < 1e-15:
            ok &= ao[:, k] <= b[k]
            continue
        t = (b[k] - ao[:, k]) / ad[k]
        if ad[k] > 0:
            upd = t < hi
            hi = np.where(upd, t, hi)
            ihi = np.where(upd, k, ihi)
        else:
            upd = t > lo
            lo = np.where(upd, t, lo)
            ilo = np.where(upd, k, ilo)
    return lo, hi, ilo, ihi, ok


def _normals_from_index(A, idx):
    out = np.zeros((idx.size, 3))
    good = idx >= 0
    out[good] = A[idx[good]]
    return out


@dataclass(frozen=True)
class Sphere:
    r: float
    kind = "sphere"

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("sphere radius must be > 0")

    def half_extents(self):
        return np.array([self.r, self.r, self.r])

    def clip_line(self, o, d):
        b = o @ d
        c = np.einsum("ij,ij->i", o, o) - self.r**2
        disc = b * b - c
        ok = disc > 0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        lo, hi = -b - sq, -b + sq
        n_lo = (o + lo[:, None] * d) / self.r
        n_hi = (o + hi[:, None] * d) / self.r
        return lo, hi, n_lo, n_hi, ok

    def section(self):
        return {"type": "sphere", "r": self.r}


@dataclass(frozen=True)
class Cylinder:
    """Solid cylinder with its axis along the local x axis."""

    r: float
    l: float
    kind = "cylinder"

    def __post_init__(self):
        if not (self.r > 0 and self.l > 0):
            raise DomainError("cylinder needs r > 0 and l > 0")

    def half_extents(self):
        return np.array([self.l / 2.0, self.r, self.r])

    def clip_line(self, o, d):
        n = o.shape[0]
        a = d[1] ** 2 + d[2] ** 2
        bq = 2.0 * (o[:, 1] * d[1] + o[:, 2] * d[2])
        c = o[:, 1] ** 2 + o[:, 2] ** 2 - self.r**2
        if a < 1e-15:
            ok_q = c <= 0
            qlo = np.full(n, -np.inf)
            qhi = np.full(n, np.inf)
        else:
            disc = bq * bq - 4 * a * c
            ok_q = disc > 0
            sq = np.sqrt(np.where(ok_q, disc, 0.0))
            qlo = (-bq - sq) / (2 * a)
            qhi = (-bq + sq) / (2 * a)
        A = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
        bb = np.array([self.l / 2.0, self.l / 2.0])
        slo, shi, ilo, ihi, ok_s = _clip_halfspaces(o, d, A, bb)
        lo = np.maximum(qlo, slo)
        hi = np.minimum(qhi, shi)
        ok = ok_q & ok_s & (hi > lo)

        def radial(t):
            p = o + t[:, None] * d
            out = np.zeros_like(p)
            out[:, 1:] = p[:, 1:] / self.r
            return out

        n_lo = np.where((slo > qlo)[:, None], _normals_from_index(A, ilo), radial(np.where(np.isfinite(lo), lo, 0.0)))
        n_hi = np.where((shi < qhi)[:, None], _normals_from_index(A, ihi), radial(np.where(np.isfinite(hi), hi, 0.0)))
        return lo, hi, n_lo, n_hi, ok

    def section(self):
        return {"type": "cylinder", "r": self.r, "l": self.l}


def _box_halfspaces(hx, hy, hz):
    A = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0], [0, -1.0, 0], [0, 0, 1.0], [0, 0, -1.0]])
    b = np.array([hx, hx, hy, hy, hz, hz])
    return A, b


def _clip_polytope(A, b, o, d):
    lo, hi, ilo, ihi, ok = _clip_halfspaces(o, d, A, b)
    ok &= hi > lo
    return lo, hi, _normals_from_index(A, ilo), _normals_from_index(A, ihi), ok


@dataclass(frozen=True)
class Box:
    """Box with full edge lengths ``a, b, c`` along local x, y, z."""

    a: float
    b: float
    c: float
    kind = "box"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise DomainError("box edges must be > 0")

    def half_extents(self):
        return np.array([self.a, self.b, self.c]) / 2.0

    def clip_line(self, o, d):
        A, b = _box_halfspaces(*self.half_extents())
        return _clip_polytope(A, b, o, d)

    def section(self):
        return {"type": "box", "a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class ConvexPrism:
    """Convex polygon in the local y-z plane extruded along local x."""

    polygon: tuple
    depth: float
    kind = "convex_prism"
    _A: np.ndarray = field(init=False, repr=False, compare=False)
    _b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        P = np.asarray(self.polygon, dtype=float)
        if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 3:
            raise DomainError("prism polygon needs >= 3 (y, z) vertices")
        if not self.depth > 0:
            raise DomainError("prism depth must be > 0")
        signed = 0.5 * (np.dot(P[:, 0], np.roll(P[:, 1], -1)) - np.dot(P[:, 1], np.roll(P[:, 0], -1)))
        if signed < 0:
            P = P[::-1]
        edges = np.roll(P, -1, axis=0) - P
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        lens = np.linalg.norm(normals, axis=1)
        if np.any(lens == 0):
            raise DomainError("prism polygon has repeated vertices")
        normals /= lens[:, None]
        offs = np.einsum("ij,ij->i", normals, P)
        if np.any(normals @ P.T - offs[:, None] > 1e-9 * max(1.0, np.abs(P).max())):
            raise DomainError("prism polygon must be convex")
        A = np.zeros((len(P) + 2, 3))
        A[: len(P), 1:] = normals
        A[-2] = (1.0, 0, 0)
        A[-1] = (-1.0, 0, 0)
        b = np.concatenate([offs, [self.depth / 2.0, self.depth / 2.0]])
        object.__setattr__(self, "polygon", tuple(map(tuple, P.tolist())))
        object.__setattr__(self, "_A", A)
        object.__setattr__(self, "_b", b)

    def half_extents(self):
        P = np.asarray(self.polygon)
        return np.array([self.depth / 2.0, np.abs(P[:, 0]).max(), np.abs(P[:, 1]).max()])

    def clip_line(self, o, d):
        return _clip_polytope(self._A, self._b, o, d)

    def section(self):
        return {"type": "convex_prism", "polygon": [list(p) for p in self.polygon], "depth": self.depth}


@dataclass(frozen=True)
class Pose:
    """Rigid transform: local -> grasp frame. Orientation as xyz Euler degrees."""

    position: tuple = (0.0, 0.0, 0.0)
    euler_xyz: tuple = (0.0, 0.0, 0.0)

    @property
    def R(self):
        return Rotation.from_euler("xyz", self.euler_xyz, degrees=True).as_matrix()

    def apply(self, pts):
        return np.asarray(pts, dtype=float) @ self.R.T + np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class ObjectModel:
    shape: object
    pose: Pose = Pose()
    mass: float = 0.0
    mu: float = 0.5
    com: tuple = (0.0, 0.0, 0.0)
    name: str = ""

    def __post_init__(self):
        if self.mass < 0:
            raise DomainError("mass must be >= 0")
        if self.mu < 0:
            raise DomainError("mu must be >= 0")

    def com_position(self):
        return self.pose.apply(np.asarray(self.com, dtype=float)[None, :])[0]

    def aabb(self):
        """Conservative axis-aligned bounds (lo, hi) in the grasp frame."""
        h = self.shape.half_extents()
        signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
        corners = self.pose.apply(signs * h)
        return corners.min(axis=0), corners.max(axis=0)

    def width_y(self):
        lo, hi = self.aabb()
        return float(hi[1] - lo[1])

    def vertical_profile(self, xy):
        """Intersect vertical lines through ``xy`` (N, 2) with the object.

        Returns ``(hit, z_bot, z_top, n_bot, n_top)`` where the normals are
        outward unit normals in the grasp frame.
        """
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        R = self.pose.R
        o = np.column_stack([xy, np.zeros(len(xy))]) - np.asarray(self.pose.position, dtype=float)
        o_l = o @ R  # R^T applied row-wise
        d_l = R.T @ np.array([0.0, 0.0, 1.0])
        lo, hi, n_lo, n_hi, ok = self.shape.clip_line(o_l, d_l)
        n_lo = n_lo @ R.T
        n_hi = n_hi @ R.T
        for nn in (n_lo, n_hi):
            norms = np.linalg.norm(nn, axis=1)
            nn[norms > 0] /= norms[norms > 0, None]
        return ok, lo, hi, n_lo, n_hi

    def section_yz(self, x=0.0, n=361):
        """Outline of the object's cross-section at ``x`` as a closed (y, z) polyline."""
        lo, hi = self.aabb()
        ys = np.linspace(lo[1], hi[1], n)
        ok, zb, zt, _, _ = self.vertical_profile(np.column_stack([np.full(n, x), ys]))
        if not ok.any():
            return np.zeros((0, 2))
        ys, zb, zt = ys[ok], zb[ok], zt[ok]
        return np.vstack([np.column_stack([ys, zb]), np.column_stack([ys[::-1], zt[::-1]])])

import math

import numpy as np
import pytest

from getgrasp import (
    Box, CapacityError, ContactConfig, ContactKind, Cylinder, DomainError, GelModel, NoContactError, ObjectModel,
    Pose, Sphere, UnstablePoseError, close_jaws, contact_force_distribution, gel_indent, point_contact_set,
)
from getgrasp.contact import DEFAULT_STIFFNESS, GelBottomOut

from conftest import flat_gripper, hammer, v_gripper
from oracles import sphere_cap_force_closed_form, sphere_cap_force_quadrature, three_contact_equilibrium

K = DEFAULT_STIFFNESS


def net_force(c):
    return (c.vertex_weights[:, None] * c.vertex_normals).sum(axis=0)


# --- stiffness anchor -------------------------------------------------------


def test_default_stiffness_anchor():
    # 10 x 10 mm flat patch at 1 mm depth carries 15 N
    assert K * 1.0 * 100.0 == pytest.approx(15.0)


def test_gel_model_validates():
    with pytest.raises(DomainError):
        GelModel(0.0, flat_gripper().fingers[0])
    with pytest.raises(DomainError):
        ContactConfig(stiffness_k=-1)


# --- gel_indent -------------------------------------------------------------


def test_zero_depth_is_point_with_zero_force(fg, ball):
    c, ind = gel_indent(ball, fg, 0, 40.0, 0.0)
    assert c.kind is ContactKind.POINT
    assert c.vertex_weights.sum() == 0.0 and ind.normal_force == 0.0


def test_flat_face_force_is_k_d_area(fg):
    box = ObjectModel(Box(30.0, 30.0, 30.0))
    for d in (0.1, 0.5, 1.2):
        c, ind = gel_indent(box, fg, 0, 40.0, d)
        # 12 mm wide pad covers x in [-15, 15] of the box: 30 x 12 mm
        assert ind.patch_area == pytest.approx(360.0, rel=1e-9)
        assert ind.normal_force == pytest.approx(K * d * 360.0, rel=1e-9)
        assert c.kind is ContactKind.PATCH


def test_sphere_cap_closed_form_matches_quadrature():
    for r, d in ((20.0, 0.5), (20.0, 1.5), (6.0, 1.0), (50.0, 0.2)):
        assert sphere_cap_force_closed_form(K, r, d) == pytest.approx(sphere_cap_force_quadrature(K, r, d), rel=1e-8)


def test_sphere_force_matches_cap_integral(fg, ball):
    for d in (0.25, 0.5, 1.0):
        _, ind = gel_indent(ball, fg, 0, 40.0, d, spacing=0.1)
        assert ind.normal_force == pytest.approx(sphere_cap_force_quadrature(K, 20.0, d), rel=5e-3)


def test_sphere_force_is_not_the_half_depth_formula(fg, ball):
    # k pi d^2 (r - d/2) disagrees with the cap integral once d is a sizeable fraction of r
    d, r = 1.2, 3.0
    small = ObjectModel(Sphere(r))
    _, ind = gel_indent(small, fg, 0, 40.0, d, spacing=0.05)
    assert ind.normal_force == pytest.approx(sphere_cap_force_closed_form(K, r, d), rel=1e-2)
    assert abs(ind.normal_force - K * math.pi * d * d * (r - d / 2)) > 0.05 * ind.normal_force


def test_torsional_radius_is_area_equivalent(fg, ball):
    _, ind = gel_indent(ball, fg, 0, 40.0, 1.0)
    assert ind.torsional_radius == pytest.approx(math.sqrt(ind.patch_area / math.pi))


def test_bottom_out(fg, ball):
    gel = fg.fingers[0].gel_thickness_at(40.0)
    with pytest.raises(GelBottomOut):
        gel_indent(ball, fg, 0, 40.0, gel + 0.5)
    _, ind = gel_indent(ball, fg, 0, 40.0, gel + 0.5, strict=False)
    assert ind.bottomed_out


def test_negative_depth_rejected(fg, ball):
    with pytest.raises(DomainError):
        gel_indent(ball, fg, 0, 40.0, -0.1)


def test_force_and_area_monotone_in_depth(fg, ball):
    depths = np.linspace(0.0, 2.5, 26)
    res = [gel_indent(ball, fg, 0, 40.0, d)[1] for d in depths]
    f = [r.normal_force for r in res]
    a = [r.patch_area for r in res]
    assert all(y >= x for x, y in zip(f, f[1:]))
    assert all(y >= x for x, y in zip(a, a[1:]))
    # continuity: a tiny extra depth gives a tiny extra force
    for d in (0.3, 1.0, 2.0):
        f0 = gel_indent(ball, fg, 0, 40.0, d)[1].normal_force
        f1 = gel_indent(ball, fg, 0, 40.0, d + 1e-4)[1].normal_force
        assert 0.0 <= f1 - f0 < 0.05


# --- close_jaws -------------------------------------------------------------


def test_flat_sphere_two_antipodal_contacts(fg, ball):
    cs = close_jaws(fg, ball, 40.0)
    assert len(cs.contacts) == 2
    n = [c.normal for c in cs.contacts]
    np.testing.assert_allclose(n[0], [0, 0, 1], atol=1e-9)
    np.testing.assert_allclose(n[1], [0, 0, -1], atol=1e-9)
    f = [c.normal_force for c in cs.contacts]
    assert f == pytest.approx([15.0, 15.0], rel=1e-9)


def v_sphere_site(g, r):
    return (g.base_separation - 0.9 * 2 * r) / (2 * math.tan(math.radians(g.v_half_angle)))


def test_v_sphere_three_contacts_symmetric_and_balanced(vg, ball):
    s = v_sphere_site(vg, 20.0)
    cs = close_jaws(vg, ball, s)
    assert len(cs.contacts) == 3
    a, b, top = cs.contacts
    assert (a.jaw, b.jaw, top.jaw) == (0, 0, 1)
    mirror = np.array([1.0, -1.0, 1.0])
    np.testing.assert_allclose(a.position, b.position * mirror, atol=1e-9)
    np.testing.assert_allclose(a.normal, b.normal * mirror, atol=1e-9)
    assert a.normal_force == pytest.approx(b.normal_force, rel=1e-9)
    fa, fb, ft = (net_force(c) for c in cs.contacts)
    assert -ft[2] == pytest.approx(fa[2] + fb[2], rel=1e-9)


def test_v_sphere_matches_root_finding_oracle(vg, ball):
    cs = close_jaws(vg, ball, v_sphere_site(vg, 20.0))
    F = [net_force(c) for c in cs.contacts]
    mags = np.array([np.linalg.norm(f) for f in F])
    dirs = np.array([f / np.linalg.norm(f) for f in F])
    # the oracle works in the y-z plane; feed it the projected directions
    dirs[:, 0] = 0.0
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    proj = np.linalg.norm(np.array(F)[:, 1:], axis=1)
    sol = three_contact_equilibrium(dirs, 15.0)
    np.testing.assert_allclose(proj, sol, rtol=1e-6)


def test_hammer_contact_counts():
    h = hammer()
    assert len(close_jaws(flat_gripper(), h, 40.0).contacts) == 2
    cs = close_jaws(v_gripper(), h, 40.0)
    assert len(cs.contacts) == 3
    assert all(c.kind in (ContactKind.LINE, ContactKind.PATCH) for c in cs.contacts)


def test_residual_within_tolerance(vg, fg, ball):
    for g, s in ((fg, 40.0), (vg, v_sphere_site(vg, 20.0))):
        cs = close_jaws(g, ball, s)
        r = cs.residual_wrench
        assert np.abs(r[:3]).max() < 1e-6 * 15.0
        assert np.abs(r[3:]).max() < 1e-6 * 15.0 * g.length


def test_squeeze_equals_f_max(vg, ball):
    cs = close_jaws(vg, ball, v_sphere_site(vg, 20.0), f_max=9.0)
    assert cs.jaw_squeeze(0) == pytest.approx(9.0, rel=1e-9)
    assert cs.jaw_squeeze(1) == pytest.approx(9.0, rel=1e-9)


def test_object_outside_footprint(fg):
    far = ObjectModel(Sphere(5.0), Pose((0.0, 60.0, 0.0)))
    with pytest.raises(NoContactError):
        close_jaws(fg, far, 40.0)


def test_object_exceeding_opening(fg):
    with pytest.raises(CapacityError):
        close_jaws(fg, ObjectModel(Sphere(50.0)), 40.0)


def test_site_outside_finger(fg, ball):
    with pytest.raises(DomainError):
        close_jaws(fg, ball, 90.0)


# --- force distribution -----------------------------------------------------


def test_two_antipodal_points_carry_f_max():
    cs = point_contact_set([[0, 0, -20], [0, 0, 20]], [[0, 0, 1], [0, 0, -1]], [0, 1], 15.0)
    assert [c.normal_force for c in cs.contacts] == pytest.approx([15.0, 15.0])


def test_zero_f_max_gives_zero_forces(vg, ball):
    cs = close_jaws(vg, ball, v_sphere_site(vg, 20.0))
    contact_force_distribution(cs, 0.0)
    assert all(c.normal_force == 0.0 for c in cs.contacts)
    assert not np.any(cs.compute_residual())


def test_unbalanceable_pose_raises():
    # both lower contacts push +y; nothing opposes them
    with pytest.raises(UnstablePoseError):
        point_contact_set([[0, -5, -5], [0, -6, -4], [0, 0, 5]],
                          [[0, 0.6, 0.8], [0, 0.8, 0.6], [0, 0, -1]], [0, 0, 1], 15.0)


def test_rigid_v_pad_ejects_sphere():
    g = v_gripper()
    rigid = type(g)(g.arrangement, [type(f)(f.length, f.width_base, f.width_tip, 0.0, 0.0) for f in g.fingers],
                    v_half_angle=g.v_half_angle, base_separation=g.base_separation, jaw_opening_max=90.0)
    with pytest.raises(UnstablePoseError):
        close_jaws(rigid, ObjectModel(Sphere(20.0)), v_sphere_site(g, 20.0))


def test_point_contact_v_sphere_matches_oracle():
    r, half = 20.0, 18.0
    z = -math.sqrt(r * r - half * half)
    P = np.array([[0, half, z], [0, -half, z], [0, 0, r]])
    cs = point_contact_set(P, -P / r, [0, 0, 1], 15.0)
    sol = three_contact_equilibrium(-P / r, 15.0)
    np.testing.assert_allclose([c.normal_force for c in cs.contacts], sol, rtol=1e-8)

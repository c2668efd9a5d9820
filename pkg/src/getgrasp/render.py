"""
SVG rendering of grasp cross-sections and envelope bar charts.

Cross-sections show the y-z plane of the grasp frame: finger pads at the
grasp site, the object outline, one marker per contact (``class="contact"``)
and friction cones as wedges (``class="cone"``).
"""
import math
import xml.etree.ElementTree as ET

import numpy as np

from .geometry import JAW_LOWER, finger_centerline_y

SCALE = 4.0  # px per mm
BACKING = 4.0  # mm drawn behind the gel
CONE_LEN = 8.0  # mm


def _svg(width, height, view):
    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=f"{width:.1f}",
        height=f"{height:.1f}",
        viewBox=" ".join(f"{v:.3f}" for v in view),
    )
    return root


def _pts(P):
    return " ".join(f"{y:.3f},{-z:.3f}" for y, z in P)


def _to_string(root):
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def cross_section_svg(gripper, obj, cs, mu, title=""):
    """Cross-section diagram of one grasp as an SVG string."""
    site = cs.grasp_site_s
    outline = obj.section_yz(0.0)
    shapes = []
    levels = {}
    for c in cs.contacts:
        z = c.position[2]
        levels[c.jaw] = min(levels.get(c.jaw, z), z) if c.jaw == JAW_LOWER else max(levels.get(c.jaw, z), z)
    for i, prof in enumerate(gripper.fingers):
        jaw = gripper.jaw_of(i)
        if jaw not in levels:
            continue
        yc = float(finger_centerline_y(gripper, i, site))
        hw = float(prof.width_at(site)) / 2.0
        gel = float(prof.gel_thickness_at(site))
        z0 = levels[jaw]
        sgn = -1.0 if jaw == JAW_LOWER else 1.0
        z_gel = z0 + sgn * gel
        z_back = z_gel + sgn * BACKING
        shapes.append(("gel", [(yc - hw, z0), (yc + hw, z0), (yc + hw, z_gel), (yc - hw, z_gel)]))
        shapes.append(("backing", [(yc - hw, z_gel), (yc + hw, z_gel), (yc + hw, z_back), (yc - hw, z_back)]))

    allp = [np.asarray(p) for _, p in shapes]
    if len(outline):
        allp.append(outline)
    allp.append(np.array([[c.position[1], c.position[2]] for c in cs.contacts]))
    P = np.vstack(allp)
    pad = CONE_LEN + 4.0
    lo = P.min(axis=0) - pad
    hi = P.max(axis=0) + pad
    view = (lo[0], -hi[1], hi[0] - lo[0], hi[1] - lo[1])
    root = _svg(view[2] * SCALE, view[3] * SCALE, view)
    ET.SubElement(root, "title").text = title or f"{gripper.name} / {obj.name}"
    g = ET.SubElement(root, "g", {"class": "fingers"})
    for kind, p in shapes:
        fill = "#9ecae1" if kind == "gel" else "#636363"
        ET.SubElement(g, "polygon", {"class": kind, "points": _pts(p), "fill": fill, "stroke": "none"})
    if len(outline):
        ET.SubElement(root, "polygon", {"class": "object", "points": _pts(outline), "fill": "#fdd0a2",
                                        "stroke": "#a63603", "stroke-width": "0.3"})
    cones = ET.SubElement(root, "g", {"class": "cones"})
    marks = ET.SubElement(root, "g", {"class": "contacts"})
    half = math.atan(mu)
    for c in cs.contacts:
        y, z = c.position[1], c.position[2]
        n = np.array([c.normal[1], c.normal[2]])
        if np.linalg.norm(n) > 1e-9:
            a0 = math.atan2(n[1], n[0])
            wedge = [(y, z)] + [
                (y + CONE_LEN * math.cos(a0 + t), z + CONE_LEN * math.sin(a0 + t)) for t in (-half, half)
            ]
            ET.SubElement(cones, "polygon", {"class": "cone", "points": _pts(wedge), "fill": "#31a354",
                                             "fill-opacity": "0.3", "stroke": "#31a354", "stroke-width": "0.2"})
        ET.SubElement(marks, "circle", {"class": "contact", "cx": f"{y:.3f}", "cy": f"{-z:.3f}", "r": "0.8",
                                        "fill": "#de2d26", "data-kind": c.kind.value,
                                        "data-force": f"{c.normal_force:.6g}"})
    return _to_string(root)


def envelope_bars_svg(rows, title="envelope"):
    """Grouped bar chart of tau_x, tau_y, tau_z per (scenario, gripper) row."""
    ok = [r for r in rows if r.get("status") == "ok"]
    keys = ("tau_x_max", "tau_y_max", "tau_z_max")
    colors = ("#3182bd", "#e6550d", "#31a354")
    vmax = max([r[k] for r in ok for k in keys] + [1.0])
    bw, gap, h = 10.0, 8.0, 200.0
    width = max(1, len(ok)) * (3 * bw + gap) + 60.0
    root = _svg(width, h + 80.0, (0.0, 0.0, width, h + 80.0))
    ET.SubElement(root, "title").text = title
    for i, r in enumerate(ok):
        x0 = 40.0 + i * (3 * bw + gap)
        for j, k in enumerate(keys):
            bh = h * r[k] / vmax
            ET.SubElement(root, "rect", {"class": "bar", "x": f"{x0 + j * bw:.2f}", "y": f"{20 + h - bh:.2f}",
                                         "width": f"{bw:.2f}", "height": f"{bh:.2f}", "fill": colors[j],
                                         "data-value": f"{r[k]:.6g}", "data-key": k})
        label = ET.SubElement(root, "text", {"x": f"{x0:.2f}", "y": f"{h + 35:.2f}", "font-size": "7",
                                             "transform": f"rotate(45 {x0:.2f} {h + 35:.2f})"})
        label.text = f"{r['scenario']}/{r['gripper']}"
    for j, k in enumerate(keys):
        t = ET.SubElement(root, "text", {"x": f"{40 + j * 70:.1f}", "y": "12", "font-size": "9", "fill": colors[j]})
        t.text = k
    return _to_string(root)

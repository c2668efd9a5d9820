import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from getgrasp import Cylinder, FingerProfile, GripperConfig, ObjectModel, Pose, Sphere

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def get_finger():
    return FingerProfile(80.0, 12.0, 6.0, 4.5, 1.5, 5.0, 4.0, 6.0)


def v_gripper(base_separation=60.0, half_angle=15.0, finger=None, f_max=15.0):
    f = finger or get_finger()
    return GripperConfig("v_pair_plus_single", [f] * 3, v_half_angle=half_angle, base_separation=base_separation,
                         jaw_opening_max=90.0, f_max=f_max, name="get")


def flat_gripper(w=12.0, gel=(4.5, 1.5), f_max=15.0):
    return GripperConfig("flat_pair", [FingerProfile(80.0, w, w, *gel)] * 2, jaw_opening_max=90.0, f_max=f_max,
                         name="flat")


def hammer(mass=0.4, mu=0.5):
    return ObjectModel(Cylinder(12.0, 150.0), Pose(euler_xyz=(0.0, 0.0, 90.0)), mass=mass, mu=mu,
                       com=(-50.0, 0.0, 0.0), name="hammer")


@pytest.fixture
def vg():
    return v_gripper()


@pytest.fixture
def fg():
    return flat_gripper()


@pytest.fixture
def ball():
    return ObjectModel(Sphere(20.0), mass=0.2, mu=0.5, name="ball")


# --- acceptance report ------------------------------------------------------

ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    """Remember one acceptance verdict and echo it (visible with ``-s``)."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])

"""
Grasp mechanics for a two-against-one V-shaped finger arrangement and flat
parallel-jaw fingers: geometry, gel contact, wrench-space analysis, batch
comparisons and a command-line interface.
"""
from .analysis import AnalysisConfig, ComparisonReport, Scenario, compare_grippers, run_scenario
from .contact import (
    Contact,
    ContactConfig,
    ContactKind,
    ContactSet,
    GelModel,
    close_jaws,
    contact_force_distribution,
    gel_indent,
    point_contact_set,
)
from .errors import (
    CapacityError,
    DomainError,
    GraspError,
    NoContactError,
    NoLeverArmError,
    SolverError,
    UnstablePoseError,
)
from .geometry import (
    Arrangement,
    Box,
    ConvexPrism,
    Cylinder,
    FingerProfile,
    GraspFrame,
    GripperConfig,
    ObjectModel,
    Pose,
    Sphere,
    grasp_site_for_size,
    interdigitation_check,
    lever_arm,
    scale_finger,
    scale_gripper,
)
from .wrench import (
    DisturbanceEnvelope,
    WrenchGenerators,
    epsilon_quality,
    force_closure,
    grasp_matrix,
    max_disturbance,
    secure_grasp_check,
    torque_envelope,
    weight_hold_check,
)

__version__ = "0.1.0"

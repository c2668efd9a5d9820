"""Exception types raised by the analysis pipeline."""


class GraspError(Exception):
    """Base class for grasp-analysis failures that are reported per row."""

    code = "grasp_error"


class DomainError(GraspError, ValueError):
    """An argument is outside the domain of the operation."""

    code = "domain_error"


class NoLeverArmError(DomainError):
    code = "no_lever_arm"


class CapacityError(GraspError):
    """Object exceeds gripper capacity (V opening or jaw opening)."""

    code = "object_exceeds_capacity"


class NoContactError(GraspError):
    code = "no_contact"


class UnstablePoseError(GraspError):
    """Equilibrium cannot be reached with the resolved contacts."""

    code = "unstable_pose"


class SolverError(GraspError):
    code = "solver_error"

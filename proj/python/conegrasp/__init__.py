"""Friction-cone contact force allocation for multi-fingered grasps.

Thin Python layer over the compiled ``_core`` extension.
"""

from ._core import (  # noqa: F401
    GRAVITY,
    ConeBounds,
    ConeProblem,
    ContactFrame,
    DegenerateInputError,
    RotationAxis,
    ScenarioError,
    Solution,
    adaptive_lower_bounds,
    assemble,
    build_contact_frame,
    contact_jacobian,
    forward_kinematics,
    instantaneous_friction,
    instantaneous_gravity,
    local_to_world,
    max_residual,
    metrics_from_csv,
    objective,
    oracle_solve,
    property_suite,
    rotational_slip_bound,
    run_scenario,
    run_scenario_json,
    slip_displacement,
    solve,
    validate_scenario_json,
    world_to_local,
)

__version__ = "0.1.0"

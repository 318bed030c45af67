"""NMPC motion-planner benchmark: particle, kinematic and load-transfer-aware
double-track planners with a self-contained interior-point solver."""

from ._core import (  # noqa: F401
    VehicleParams,
    lateral_load_transfer,
    roll_angle,
    run_scenario,
    scenario_names,
    slip_angles,
    tire_lateral_force,
    validate_planner_model,
    vehicle_params_from_json,
    vehicle_params_to_json,
    vertical_forces,
)

__all__ = [
    "VehicleParams",
    "lateral_load_transfer",
    "roll_angle",
    "run_scenario",
    "scenario_names",
    "slip_angles",
    "tire_lateral_force",
    "validate_planner_model",
    "vehicle_params_from_json",
    "vehicle_params_to_json",
    "vertical_forces",
]

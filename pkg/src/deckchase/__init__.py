"""Chasing and landing on a moving deck: estimation, control, simulation.

The package splits into a pose-only vessel filter whose predictions bend
with the turn (`usv_filter`), a jerk-input aircraft model and condensed
QP controller (`uav_model`, `mpc`), mission supervision (`mission`), the
deliberately mismatched truth plants (`world`), scripted maneuvers
(`scenarios`), the deterministic closed loop (`simulate`), statistics
(`metrics`), and a live WebSocket bridge (`server`).
"""

from .mission import (AttemptRecord, CommitRule, LandingCriteria,
                      MissionPhase, MissionSupervisor)
from .mpc import (ControlCommand, MpcConfig, MpcController, MpcSolution,
                  ReferenceTrajectory, build_reference, extract_command,
                  plan_command,
                  sigmoid_gate, solve)
from .scenarios import ScenarioScript, figure8, load_scenario, straight, triangle, turn
from .simulate import (SimConfig, SimResult, run_estimation,
                       run_landing_campaign, run_prediction_pair,
                       run_tracking, run_tracking_pair, write_outputs)
from .uav_model import UavLtiModel, build_model, rollout, step
from .usv_filter import (DragParams, PoseMeasurement, PredictionHorizon,
                         ProcessNoise, UsvFilter, make_filter)
from .world import (SensorConfig, UavPlantConfig, UavState, UsvPlantConfig,
                    UsvState, deck_visible, sense_pose, uav_plant_step,
                    usv_plant_step)

__version__ = "0.1.0"

__all__ = [
    "AttemptRecord", "CommitRule", "LandingCriteria", "MissionPhase",
    "MissionSupervisor", "ControlCommand", "MpcConfig", "MpcController",
    "MpcSolution", "ReferenceTrajectory", "build_reference",
    "extract_command", "plan_command", "sigmoid_gate", "solve",
    "ScenarioScript", "figure8",
    "load_scenario", "straight", "triangle", "turn", "SimConfig", "SimResult",
    "run_estimation", "run_landing_campaign", "run_prediction_pair",
    "run_tracking", "run_tracking_pair", "write_outputs", "UavLtiModel",
    "build_model", "rollout", "step", "DragParams", "PoseMeasurement",
    "PredictionHorizon", "ProcessNoise", "UsvFilter", "make_filter",
    "SensorConfig", "UavPlantConfig", "UavState", "UsvPlantConfig",
    "UsvState", "deck_visible", "sense_pose", "uav_plant_step",
    "usv_plant_step", "__version__",
]

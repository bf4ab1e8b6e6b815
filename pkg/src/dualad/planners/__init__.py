"""Bottom-layer rule-based planners sharing one interface:
plan(frame, path, cap) -> Trajectory."""

from .base import Trajectory, emergency_stop
from .idm import IdmParams, IdmPlanner, idm_accel
from .lattice import LatticeConfig, LatticePlanner
from .prediction import predict_agents
from .sampling import CostWeights, SamplingPlanner, SamplingPlannerConfig

PLANNERS = {
    "idm": IdmPlanner,
    "lattice": LatticePlanner,
    "sampling": SamplingPlanner,
}

__all__ = [
    "Trajectory",
    "emergency_stop",
    "IdmParams",
    "IdmPlanner",
    "idm_accel",
    "LatticeConfig",
    "LatticePlanner",
    "predict_agents",
    "CostWeights",
    "SamplingPlanner",
    "SamplingPlannerConfig",
    "PLANNERS",
]

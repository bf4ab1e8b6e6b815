"""Sampling planner: spans polynomial trajectory candidates varying in end
offset, end speed and horizon, and picks the minimum of a weighted
multi-term cost."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..frame import WorldFrame
from ..geom import ReferencePath
from .base import (DT, FeasibilityLimits, Trajectory, build_candidate,
                   clearance_to_agents, ego_frenet_state,
                   kinematically_feasible, trajectory_from_candidate)
from .idm import IdmParams, IdmPlanner
from .lattice import _raise_if_colliding_now
from .prediction import predict_agents


@dataclass
class CostWeights:
    lateral_accel: float = 1.0
    longitudinal_accel: float = 1.0
    velocity_deviation: float = 2.0
    route_distance: float = 1.0
    collision_risk: float = 5.0

    def as_tuple(self):
        return (self.lateral_accel, self.longitudinal_accel,
                self.velocity_deviation, self.route_distance,
                self.collision_risk)

    def scaled(self, factor: float) -> "CostWeights":
        return CostWeights(*(w * factor for w in self.as_tuple()))


@dataclass
class SamplingPlannerConfig:
    cost_weights: CostWeights = field(default_factory=CostWeights)
    lateral_end_offsets: tuple = (-3.0, -1.5, 0.0, 1.5, 3.0)
    horizon_set: tuple = (3.0, 5.0, 8.0)
    end_speed_set: tuple = (0.0, 4.0, 8.0, 12.0)
    constraint_limits: FeasibilityLimits = field(default_factory=FeasibilityLimits)
    safety_margin: float = 0.2
    risk_sigma: float = 2.0
    horizon: float = 8.0
    desired_speed: float | None = None


class SamplingPlanner:
    """Frenet polynomial sampling with a five-term weighted cost."""

    name = "sampling"

    def __init__(self, config: SamplingPlannerConfig | None = None,
                 idm_params: IdmParams | None = None,
                 prediction_mode: str = "cv"):
        self.config = config or SamplingPlannerConfig()
        self.fallback_planner = IdmPlanner(idm_params or IdmParams(
            horizon=self.config.horizon))
        self.prediction_mode = prediction_mode

    def desired_speed(self, frame: WorldFrame) -> float:
        v = (self.config.desired_speed
             if self.config.desired_speed is not None else frame.speed_limit)
        return min(v, frame.speed_limit)

    def plan(self, frame: WorldFrame, path: ReferencePath,
             cap: float) -> Trajectory:
        traj, _ = self.plan_with_index(frame, path, cap)
        return traj

    def plan_with_index(self, frame: WorldFrame, path: ReferencePath,
                        cap: float):
        """Plan and also report the selected candidate index (tie-breaks are
        by enumeration order, so the index is the determinism witness)."""
        cfg = self.config
        w = cfg.cost_weights
        ego = ego_frenet_state(frame, path)
        predictions = predict_agents(frame, cfg.horizon, self.prediction_mode)
        v_des = min(self.desired_speed(frame), cap)

        seen = set()
        best = None
        best_cost = np.inf
        index = 0
        for d_end in cfg.lateral_end_offsets:
            for T in cfg.horizon_set:
                for v_term in cfg.end_speed_set:
                    v_end = min(v_term, cap)
                    key = (d_end, T, v_end)
                    if key in seen:
                        continue
                    seen.add(key)
                    cand = build_candidate(ego, d_end, T, v_end,
                                           cfg.horizon, path)
                    cand.index = index
                    index += 1
                    if not kinematically_feasible(cand, cfg.constraint_limits,
                                                  cap, frame.ego_speed):
                        continue
                    clearance = clearance_to_agents(cand.x, cand.y, cand.theta,
                                                    frame, predictions)
                    if np.any(clearance < cfg.safety_margin):
                        continue
                    j_lat = float(np.sum(cand.a_d ** 2) * DT)
                    j_lon = float(np.sum(cand.a_s ** 2) * DT)
                    j_vel = float(np.sum((cand.speed - v_des) ** 2) * DT)
                    j_route = float(np.sum(cand.d ** 2) * DT)
                    if np.all(np.isinf(clearance)):
                        j_risk = 0.0
                    else:
                        j_risk = float(np.sum(
                            np.exp(-clearance ** 2 / cfg.risk_sigma ** 2)))
                    cost = (w.lateral_accel * j_lat
                            + w.longitudinal_accel * j_lon
                            + w.velocity_deviation * j_vel
                            + w.route_distance * j_route
                            + w.collision_risk * j_risk)
                    if cost < best_cost:
                        best_cost = cost
                        best = cand
        if best is not None:
            traj = trajectory_from_candidate(best, cfg.horizon,
                                             label=f"sampling[{best.index}]")
            return traj, best.index
        _raise_if_colliding_now(frame, predictions)
        traj = self.fallback_planner.plan(frame, path, cap)
        traj.fallback = True
        traj.label = "sampling-fallback-idm"
        return traj, -1

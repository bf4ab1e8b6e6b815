"""Lattice planner: a discrete grid of terminal states, connected by
polynomial transitions, filtered by motion constraints and scored by a
transition cost."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NoFeasibleTrajectory
from ..frame import WorldFrame
from ..geom import ReferencePath
from .base import (DT, FeasibilityLimits, Trajectory, build_candidate,
                   clearance_to_agents, ego_frenet_state,
                   kinematically_feasible, trajectory_from_candidate)
from .idm import IdmParams, IdmPlanner
from .prediction import predict_agents


@dataclass
class LatticeConfig:
    terminal_lateral_offsets: tuple = (-3.0, -1.5, 0.0, 1.5, 3.0)
    terminal_times: tuple = (3.0, 5.0, 8.0)
    terminal_speeds: tuple = (0.0, 4.0, 8.0, 12.0)
    # (smoothness, offset, obstacle)
    transition_cost_weights: tuple = (1.0, 1.0, 5.0)
    # deviation from the capped desired speed; without it the cost has no
    # progress incentive and the planner always prefers stopping short
    progress_weight: float = 0.5
    constraint_limits: FeasibilityLimits = field(default_factory=FeasibilityLimits)
    safety_margin: float = 0.2
    risk_sigma: float = 2.0
    horizon: float = 8.0
    desired_speed: float | None = None


class LatticePlanner:
    """Grid of terminal (offset, time, speed) states; picks the feasible
    connection with the lowest summed transition cost, falling back to the
    centerline car-following plan when the whole grid is blocked."""

    name = "lattice"

    def __init__(self, config: LatticeConfig | None = None,
                 idm_params: IdmParams | None = None,
                 prediction_mode: str = "cv"):
        self.config = config or LatticeConfig()
        self.fallback_planner = IdmPlanner(idm_params or IdmParams(
            horizon=self.config.horizon))
        self.prediction_mode = prediction_mode

    def desired_speed(self, frame: WorldFrame) -> float:
        v = (self.config.desired_speed
             if self.config.desired_speed is not None else frame.speed_limit)
        return min(v, frame.speed_limit)

    def plan(self, frame: WorldFrame, path: ReferencePath,
             cap: float) -> Trajectory:
        cfg = self.config
        ego = ego_frenet_state(frame, path)
        predictions = predict_agents(frame, cfg.horizon, self.prediction_mode)
        w_smooth, w_offset, w_obstacle = cfg.transition_cost_weights
        v_des = min(self.desired_speed(frame), cap)

        seen = set()
        best = None
        best_cost = np.inf
        index = 0
        for d_end in cfg.terminal_lateral_offsets:
            for T in cfg.terminal_times:
                for v_term in cfg.terminal_speeds:
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
                    smooth = float(np.sum(cand.a_s ** 2 + cand.a_d ** 2) * DT)
                    offset = float(np.sum(cand.d ** 2) * DT)
                    if np.all(np.isinf(clearance)):
                        risk = 0.0
                    else:
                        risk = float(np.sum(
                            np.exp(-clearance ** 2 / cfg.risk_sigma ** 2)))
                    progress = float(np.sum((cand.speed - v_des) ** 2) * DT)
                    cost = (w_smooth * smooth + w_offset * offset
                            + w_obstacle * risk
                            + cfg.progress_weight * progress)
                    if cost < best_cost:
                        best_cost = cost
                        best = cand
        if best is not None:
            traj = trajectory_from_candidate(best, cfg.horizon,
                                             label=f"lattice[{best.index}]")
            return traj
        # whole grid blocked: follow the centerline with the car-following law
        _raise_if_colliding_now(frame, predictions)
        traj = self.fallback_planner.plan(frame, path, cap)
        traj.fallback = True
        traj.label = "lattice-fallback-idm"
        return traj


def _raise_if_colliding_now(frame: WorldFrame, predictions):
    from .. import kernels
    for track in predictions.values():
        if kernels.boxes_overlap(frame.ego_x, frame.ego_y, frame.ego_theta,
                                 frame.ego_width, frame.ego_length,
                                 track.x[0], track.y[0], track.theta[0],
                                 track.width, track.length):
            raise NoFeasibleTrajectory(
                f"ego overlaps agent {track.agent_id} at plan time")

"""Intelligent Driver Model: car-following acceleration law and the
centerline-following planner built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NonPositiveGap
from ..frame import WorldFrame
from ..geom import ReferencePath
from .base import DT, EgoFrenetState, Trajectory, ego_frenet_state

INF_GAP = math.inf


@dataclass
class IdmParams:
    """Car-following parameters; target speed defaults to the speed limit.

    With `dynamic_gap` the safety distance becomes the classical
    s0 + v*T + v*dv/(2*sqrt(a*b)) instead of the constant `s_star`.
    """

    a: float = 1.5                 # acceleration limit, m/s^2
    v0: float | None = None        # target speed; None -> scenario speed limit
    s_star: float = 10.0           # constant safety distance, m
    delta: float = 4.0             # acceleration exponent
    min_gap_floor: float = 1.0     # bumper gap never planned below this, m
    max_brake: float = 4.0         # deceleration clamp, m/s^2
    half_lane_width: float = 1.5   # leader gating: |d| below this counts
    horizon: float = 8.0           # planning horizon, s
    dynamic_gap: bool = False
    s0: float = 2.0                # dynamic-gap standstill distance
    time_headway: float = 1.5      # dynamic-gap headway, s
    b_comfort: float = 2.0         # dynamic-gap comfortable braking


def idm_accel(v: float, s: float, p: IdmParams, dv: float = 0.0,
              v0: float | None = None) -> float:
    """Acceleration from speed `v` and bumper gap `s` (inf when free).

    `dv` is the approach speed toward the leader; it only matters in
    dynamic-gap mode. Clamped to [-max_brake, a].
    """
    if s <= 0:
        raise NonPositiveGap(f"gap must be positive, got {s}")
    target = p.v0 if v0 is None else v0
    if target is None or target <= 1e-9:
        return -p.max_brake if v > 0 else 0.0
    if p.dynamic_gap:
        gap_term = p.s0 + v * p.time_headway + v * dv / (
            2.0 * math.sqrt(p.a * p.b_comfort))
        gap_term = max(gap_term, p.s0)
    else:
        gap_term = p.s_star
    acc = p.a * (1.0 - (v / target) ** p.delta - (gap_term / s) ** 2)
    return min(max(acc, -p.max_brake), p.a)


def find_leader(frame: WorldFrame, path: ReferencePath, ego: EgoFrenetState,
                half_lane_width: float):
    """Nearest in-lane agent ahead of the ego on the path.

    Returns (gap, leader_speed) with a bumper-to-bumper gap, or
    (inf, 0.0) when the lane ahead is free. Red stop lines act as a
    stationary zero-length leader.
    """
    if frame.agents:
        xs = np.array([a.x for a in frame.agents])
        ys = np.array([a.y for a in frame.agents])
        s_arr, d_arr = path.project_xy(xs, ys)
    best_gap, best_speed = INF_GAP, 0.0
    for i, ag in enumerate(frame.agents):
        s_rel = s_arr[i] - ego.s
        if s_rel <= 0 or abs(d_arr[i]) > half_lane_width:
            continue
        gap = s_rel - 0.5 * ag.length - 0.5 * frame.ego_length
        if gap < best_gap:
            best_gap = gap
            best_speed = ag.speed * math.cos(ag.theta - float(
                path.tangents_at(s_arr[i])))
    for stop_s in frame.red_stop_lines:
        s_rel = stop_s - ego.s
        if s_rel <= 0:
            continue
        gap = s_rel - 0.5 * frame.ego_length
        if gap < best_gap:
            best_gap = gap
            best_speed = 0.0
    return best_gap, best_speed


class IdmPlanner:
    """Follows the route centerline, adapting speed with the IDM law."""

    name = "idm"

    def __init__(self, params: IdmParams | None = None):
        self.params = params or IdmParams()

    def desired_speed(self, frame: WorldFrame) -> float:
        v0 = self.params.v0 if self.params.v0 is not None else frame.speed_limit
        return min(v0, frame.speed_limit)

    def plan(self, frame: WorldFrame, path: ReferencePath,
             cap: float) -> Trajectory:
        p = self.params
        ego = ego_frenet_state(frame, path)
        gap0, v_lead = find_leader(frame, path, ego, p.half_lane_width)
        v0_eff = min(self.desired_speed(frame), cap)

        n = int(round(p.horizon / DT))
        t = np.arange(n + 1) * DT
        s_rel = np.empty(n + 1)
        v = np.empty(n + 1)
        s_rel[0] = 0.0
        v[0] = frame.ego_speed

        has_leader = math.isfinite(gap0)

        def accel_at(adv: float, vk: float, tk: float) -> float:
            if not has_leader:
                return idm_accel(vk, INF_GAP, p, v0=v0_eff)
            gap = max(gap0 + v_lead * tk - adv, 1e-3)
            return idm_accel(vk, gap, p, dv=vk - v_lead, v0=v0_eff)

        for k in range(n):
            tk = t[k]
            adv, vk = s_rel[k], v[k]
            # RK4 on (advance, speed); the leader moves at constant speed
            k1a, k1v = vk, accel_at(adv, vk, tk)
            k2a = vk + 0.5 * DT * k1v
            k2v = accel_at(adv + 0.5 * DT * k1a, max(k2a, 0.0), tk + 0.5 * DT)
            k3a = vk + 0.5 * DT * k2v
            k3v = accel_at(adv + 0.5 * DT * k2a, max(k3a, 0.0), tk + 0.5 * DT)
            k4a = vk + DT * k3v
            k4v = accel_at(adv + DT * k3a, max(k4a, 0.0), tk + DT)
            adv_next = adv + DT / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
            v_next = vk + DT / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            if v_next < 0.0:
                v_next = 0.0
            if v_next > v0_eff:
                v_next = v0_eff
            if v_next <= 0.0 and vk <= 0.0:
                adv_next = adv
            # never plan through the minimum bumper gap
            if has_leader:
                max_adv = gap0 + v_lead * t[k + 1] - p.min_gap_floor
                if adv_next > max_adv:
                    adv_next = max(max_adv, adv)
                    v_next = 0.0
            s_rel[k + 1] = adv_next
            v[k + 1] = v_next

        s_abs = np.clip(ego.s + s_rel, 0.0, path.total_length)
        x, y, theta_t = path.frenet_to_xy(s_abs, np.zeros_like(s_abs))
        accel = np.empty(n + 1)
        accel[:-1] = np.diff(v) / DT
        accel[-1] = accel[-2] if n >= 1 else 0.0
        return Trajectory(t=t, x=x, y=y, theta=theta_t, speed=v, accel=accel,
                          horizon=p.horizon, label="idm")

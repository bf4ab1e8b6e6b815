"""Shared planner machinery: the trajectory container, quintic/quartic
Frenet connections, candidate generation and feasibility checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..frame import WorldFrame
from ..geom import CartesianPose, ReferencePath, to_frenet, wrap_angle

DT = 0.1


@dataclass
class Trajectory:
    """Planned motion over the horizon, sampled on the 0.1 s grid.

    Arrays all share the grid of `t`; `speed` is the vehicle speed along its
    own path of motion and `accel` its rate of change.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    speed: np.ndarray
    accel: np.ndarray
    horizon: float
    fallback: bool = False
    label: str = ""

    def __post_init__(self):
        n = len(self.t)
        if n < 2 or abs(self.t[0]) > 1e-9:
            raise ValueError("trajectory must start at t=0 with >= 2 samples")
        if abs(self.t[-1] - self.horizon) > 1e-6:
            raise ValueError("trajectory must cover [0, horizon]")
        if np.any(np.abs(np.diff(self.t) - DT) > 1e-9):
            raise ValueError("trajectory time step must be 0.1 s")
        if np.any(self.speed < -1e-9):
            raise ValueError("trajectory speeds must be non-negative")

    @property
    def states(self):
        """(t, pose, speed, accel) tuples, the interface contract view."""
        return [(float(self.t[i]),
                 CartesianPose(float(self.x[i]), float(self.y[i]),
                               float(self.theta[i])),
                 float(self.speed[i]), float(self.accel[i]))
                for i in range(len(self.t))]

    def sample(self, i: int):
        i = min(max(i, 0), len(self.t) - 1)
        return (float(self.x[i]), float(self.y[i]), float(self.theta[i]),
                float(self.speed[i]))


@dataclass
class EgoFrenetState:
    """Ego state projected into the planning path's Frenet frame."""

    s: float        # absolute station on the path
    d: float
    v_s: float      # longitudinal speed
    v_d: float      # lateral rate
    a_s: float      # longitudinal acceleration


def ego_frenet_state(frame: WorldFrame, path: ReferencePath,
                     accel_limit: float = 4.0) -> EgoFrenetState:
    fp = to_frenet(path, CartesianPose(frame.ego_x, frame.ego_y,
                                       frame.ego_theta), ego_s=0.0)
    a_s = min(max(frame.ego_accel, -accel_limit), accel_limit)
    return EgoFrenetState(s=fp.s, d=fp.d,
                          v_s=frame.ego_speed * math.cos(fp.theta_fren),
                          v_d=frame.ego_speed * math.sin(fp.theta_fren),
                          a_s=a_s)


def quintic_coeffs(x0, dx0, ddx0, xT, dxT, ddxT, T):
    """Quintic with full boundary conditions at t=0 and t=T."""
    T2, T3, T4, T5 = T * T, T**3, T**4, T**5
    A = np.array([
        [T3, T4, T5],
        [3 * T2, 4 * T3, 5 * T4],
        [6 * T, 12 * T2, 20 * T3],
    ])
    b = np.array([
        xT - x0 - dx0 * T - 0.5 * ddx0 * T2,
        dxT - dx0 - ddx0 * T,
        ddxT - ddx0,
    ])
    c3, c4, c5 = np.linalg.solve(A, b)
    return np.array([x0, dx0, 0.5 * ddx0, c3, c4, c5])


def quartic_coeffs(x0, dx0, ddx0, dxT, ddxT, T):
    """Quartic with free end position: velocity/accel fixed at both ends."""
    T2, T3 = T * T, T**3
    A = np.array([
        [3 * T2, 4 * T3],
        [6 * T, 12 * T2],
    ])
    b = np.array([dxT - dx0 - ddx0 * T, ddxT - ddx0])
    c3, c4 = np.linalg.solve(A, b)
    return np.array([x0, dx0, 0.5 * ddx0, c3, c4])


def polyval(coeffs, t):
    out = np.zeros_like(t)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


def polyder(coeffs):
    return np.array([i * c for i, c in enumerate(coeffs)])[1:]


@dataclass
class Candidate:
    """One Frenet polynomial connection sampled on the grid."""

    d_end: float
    T: float
    v_end: float
    s: np.ndarray
    d: np.ndarray
    v_s: np.ndarray       # longitudinal rate
    a_s: np.ndarray
    v_d: np.ndarray       # lateral rate
    a_d: np.ndarray
    x: np.ndarray = field(default=None, repr=False)
    y: np.ndarray = field(default=None, repr=False)
    theta: np.ndarray = field(default=None, repr=False)
    speed: np.ndarray = field(default=None, repr=False)
    accel: np.ndarray = field(default=None, repr=False)
    index: int = -1


def build_candidate(ego: EgoFrenetState, d_end: float, T: float, v_end: float,
                    horizon: float, path: ReferencePath) -> Candidate:
    """Quintic lateral / quartic longitudinal connection, extended at
    constant velocity from T to the horizon, with a standstill hold if the
    longitudinal speed profile reaches zero."""
    n = int(round(horizon / DT))
    t = np.arange(n + 1) * DT
    tm = np.minimum(t, T)

    lat = quintic_coeffs(ego.d, ego.v_d, 0.0, d_end, 0.0, 0.0, T)
    lat_v = polyder(lat)
    lat_a = polyder(lat_v)
    lon = quartic_coeffs(0.0, ego.v_s, ego.a_s, v_end, 0.0, T)
    lon_v = polyder(lon)
    lon_a = polyder(lon_v)

    d = polyval(lat, tm)
    v_d = polyval(lat_v, tm)
    a_d = polyval(lat_a, tm)
    v_d[t > T] = 0.0
    a_d[t > T] = 0.0

    s_rel = polyval(lon, tm) + np.maximum(t - T, 0.0) * v_end
    v_s = polyval(lon_v, tm)
    a_s = polyval(lon_a, tm)
    v_s[t > T] = v_end
    a_s[t > T] = 0.0

    # standstill hold: freeze the profile after the speed first reaches zero
    zero = np.nonzero(v_s <= 1e-12)[0]
    if len(zero) and v_end <= 1e-12:
        k = zero[0]
        s_rel[k:] = s_rel[k]
        v_s[k:] = 0.0
        a_s[k:] = 0.0
        a_s[max(k - 1, 0)] = (v_s[k] - v_s[max(k - 1, 0)]) / DT if k > 0 else 0.0
        v_d[k:] = 0.0
        a_d[k:] = 0.0
        d[k:] = d[k]
    v_s = np.maximum(v_s, 0.0)
    s_rel = np.maximum.accumulate(s_rel)  # planned motion never reverses

    s_abs = ego.s + s_rel
    s_abs = np.clip(s_abs, 0.0, path.total_length)
    x, y, theta_t = path.frenet_to_xy(s_abs, d)
    speed = np.hypot(v_s, v_d)
    heading = theta_t + np.arctan2(v_d, np.maximum(v_s, 1e-9))
    accel = np.gradient(speed, DT)
    return Candidate(d_end=d_end, T=T, v_end=v_end, s=s_abs, d=d,
                     v_s=v_s, a_s=a_s, v_d=v_d, a_d=a_d,
                     x=x, y=y, theta=heading, speed=speed, accel=accel)


@dataclass
class FeasibilityLimits:
    max_curvature: float = 0.2
    max_accel: float = 4.0
    max_lat_accel: float = 4.0


def kinematically_feasible(cand: Candidate, limits: FeasibilityLimits,
                           cap: float, v_start: float) -> bool:
    """Per-step check of curvature, acceleration and the speed ceiling."""
    if np.any(cand.speed > max(cap, v_start) + 1e-6):
        return False
    if np.any(np.abs(cand.a_s) > limits.max_accel + 1e-9):
        return False
    if np.any(np.abs(cand.a_d) > limits.max_lat_accel + 1e-9):
        return False
    dtheta = np.abs(wrap_angle(np.diff(cand.theta)))
    ds = np.maximum(cand.speed[:-1] * DT, 1e-6)
    moving = cand.speed[:-1] > 0.5
    if np.any((dtheta[moving] / ds[moving]) > limits.max_curvature + 1e-9):
        return False
    return True


def clearance_to_agents(cand_x, cand_y, cand_theta, frame: WorldFrame,
                        predictions) -> np.ndarray:
    """Min clearance per step between the ego box along a candidate and
    every predicted agent box track. Returns +inf when there are no agents."""
    n = len(cand_x)
    out = np.full(n, np.inf)
    for track in predictions.values():
        dist = kernels.sweep_box_distances(
            cand_x, cand_y, cand_theta, frame.ego_width, frame.ego_length,
            track.x[:n], track.y[:n], track.theta[:n],
            track.width, track.length)
        out = np.minimum(out, dist)
    return out


def trajectory_from_candidate(cand: Candidate, horizon: float,
                              fallback: bool = False,
                              label: str = "") -> Trajectory:
    n = len(cand.x)
    return Trajectory(t=np.arange(n) * DT, x=cand.x, y=cand.y,
                      theta=cand.theta, speed=cand.speed, accel=cand.accel,
                      horizon=horizon, fallback=fallback, label=label)


def emergency_stop(frame: WorldFrame, horizon: float,
                   max_brake: float = 4.0) -> Trajectory:
    """Maximum deceleration along the current heading; the hard-brake
    response used when the arbiter demands a full stop or no plan exists."""
    n = int(round(horizon / DT))
    t = np.arange(n + 1) * DT
    v = np.maximum(frame.ego_speed - max_brake * t, 0.0)
    dist = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * DT)))
    x = frame.ego_x + dist * math.cos(frame.ego_theta)
    y = frame.ego_y + dist * math.sin(frame.ego_theta)
    theta = np.full(n + 1, frame.ego_theta)
    accel = np.where(v > 0.0, -max_brake, 0.0)
    return Trajectory(t=t, x=x, y=y, theta=theta, speed=v, accel=accel,
                      horizon=horizon, fallback=True, label="emergency_stop")

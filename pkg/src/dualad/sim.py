"""Deterministic closed-loop engine: 10 Hz plan/act rollout with a
tracking controller, background traffic (log-replay or reactive
car-following) and per-step trace recording.

Trace serialization (`dualad-trace-1`) is line-delimited JSON: one header
line, one record per step, one summary line. Two runs with identical
inputs produce byte-identical traces.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .encoder import EncoderConfig, encode_scene
from .errors import NoFeasibleTrajectory
from .frame import WorldFrame, frame_from_scenario
from .geom import ReferencePath, wrap_angle
from .planners.base import Trajectory, emergency_stop
from .planners.idm import IdmParams, idm_accel
from .reasoner import arbitrate, build_prompt
from .scenario import Scenario

TRACE_FORMAT = "dualad-trace-1"
DT = 0.1


@dataclass
class SimConfig:
    step: float = 0.1
    duration: float | None = None      # None: use the scenario duration
    mode: str = "non_reactive"         # or "reactive"
    controller: str = "lqr"            # or "perfect_tracking"
    seed: int = 0
    plan_period: float = 0.1           # replan every cycle by default
    prediction: str = "cv"             # planners' agent prediction; or "log"
    wheelbase: float = 2.7
    max_steering: float = 0.6
    ego_width: float = 2.0
    ego_length: float = 4.8
    lqr_q: tuple = (1.0, 1.0, 0.1)
    lqr_r: float = 0.1
    accel_limits: tuple = (-6.0, 4.0)  # controller authority
    encoder: EncoderConfig = field(default_factory=EncoderConfig)

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.mode not in ("non_reactive", "reactive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.controller not in ("lqr", "perfect_tracking"):
            raise ValueError(f"unknown controller {self.controller!r}")
        if self.prediction not in ("cv", "log"):
            raise ValueError(f"unknown prediction mode {self.prediction!r}")
        if self.duration is not None:
            ratio = self.duration / self.step
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError("duration must be a multiple of step")


@dataclass
class EgoDynamicsState:
    x: float
    y: float
    theta: float
    v: float
    steering_angle: float = 0.0


def lqr_gain(v_ref: float, cfg: SimConfig) -> np.ndarray:
    """Steering feedback gain on [lateral error, heading error, held
    steering], from the discrete Riccati recursion iterated to 1e-9."""
    dt, L = cfg.step, cfg.wheelbase
    v = max(v_ref, 1.0)
    A = np.array([[1.0, v * dt, 0.0],
                  [0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0]])
    B = np.array([[0.0], [v * dt / L], [1.0]])
    Q = np.diag(cfg.lqr_q)
    R = np.array([[cfg.lqr_r]])
    P = Q.copy()
    for _ in range(10000):
        BtPB = R + B.T @ P @ B
        K = np.linalg.solve(BtPB, B.T @ P @ A)
        P_next = Q + A.T @ P @ (A - B @ K)
        if np.max(np.abs(P_next - P)) < 1e-9:
            P = P_next
            break
        P = P_next
    return np.linalg.solve(R + B.T @ P @ B, B.T @ P @ A)[0]


def step_ego(state: EgoDynamicsState, target: Trajectory, sample_idx: int,
             cfg: SimConfig, gain: np.ndarray | None) -> EgoDynamicsState:
    """Advance the ego one step toward `target`'s sample at `sample_idx`.

    perfect_tracking snaps to the trajectory; lqr steers a kinematic
    bicycle with LQR lateral/heading feedback and deadbeat speed tracking
    clamped to the controller's acceleration authority.
    """
    tx, ty, tth, tv = target.sample(sample_idx)
    if cfg.controller == "perfect_tracking":
        return EgoDynamicsState(x=tx, y=ty, theta=tth, v=tv,
                                steering_angle=0.0)
    dt = cfg.step
    e_lat = -math.sin(tth) * (state.x - tx) + math.cos(tth) * (state.y - ty)
    e_head = wrap_angle(state.theta - tth)
    err = np.array([e_lat, e_head, state.steering_angle])
    steer = float(-gain @ err)
    steer = min(max(steer, -cfg.max_steering), cfg.max_steering)
    accel = (tv - state.v) / dt
    accel = min(max(accel, cfg.accel_limits[0]), cfg.accel_limits[1])
    x = state.x + state.v * math.cos(state.theta) * dt
    y = state.y + state.v * math.sin(state.theta) * dt
    theta = state.theta + state.v / cfg.wheelbase * math.tan(steer) * dt
    v = max(state.v + accel * dt, 0.0)
    return EgoDynamicsState(x=x, y=y, theta=theta, v=v, steering_angle=steer)


BACKGROUND_IDM = IdmParams(a=1.5, max_brake=6.0, dynamic_gap=True,
                           s0=2.0, time_headway=1.5, b_comfort=2.0,
                           min_gap_floor=1.0, half_lane_width=1.5)


class _ReactiveVehicle:
    """A background vehicle driving its own logged path with car-following
    speed control. Guarantees a non-negative bumper gap to its leader."""

    def __init__(self, record):
        self.record = record
        pts = np.c_[record.log_x, record.log_y]
        keep = np.concatenate(
            ([True], np.hypot(*np.diff(pts, axis=0).T) > 1e-6))
        pts = pts[keep]
        self.replay_only = len(pts) < 2
        if not self.replay_only:
            self.path = ReferencePath(pts)
            self.s = 0.0
            self.v = float(record.log_speed[0])

    def state(self, step_idx: int):
        r = self.record
        if self.replay_only:
            i = min(step_idx, len(r.x) - 1)
            return (float(r.x[i]), float(r.y[i]), float(r.theta[i]),
                    float(r.speed[i]))
        x, y = self.path.points_at(self.s)
        theta = float(self.path.tangents_at(self.s))
        return float(x), float(y), theta, self.v

    def advance(self, step_idx: int, others, p: IdmParams = BACKGROUND_IDM):
        if self.replay_only:
            return
        r = self.record
        i = min(step_idx, len(r.speed) - 1)
        v_target = float(r.speed[i])
        gap, v_lead = math.inf, 0.0
        for ox, oy, ospeed, olength in others:
            s_o, d_o = self.path.project_xy(ox, oy)
            s_rel = float(s_o[0]) - self.s
            if s_rel <= 0.1 or abs(float(d_o[0])) > p.half_lane_width:
                continue
            g = s_rel - 0.5 * olength - 0.5 * r.length
            if g < gap:
                gap, v_lead = g, ospeed
        if gap <= 0:
            accel = -p.max_brake
        else:
            accel = idm_accel(self.v, gap, p, dv=self.v - v_lead, v0=v_target)
        v_next = max(self.v + accel * DT, 0.0)
        advance = 0.5 * (self.v + v_next) * DT
        if math.isfinite(gap):
            advance = min(advance, max(gap - p.min_gap_floor, 0.0))
        self.s = min(self.s + advance, self.path.total_length)
        self.v = v_next


class BackgroundTraffic:
    """Per-agent state holder for both background modes."""

    def __init__(self, sc: Scenario, mode: str):
        self.sc = sc
        self.mode = mode
        self.reactive = {}
        if mode == "reactive":
            for rec in sc.agents:
                if rec.kind == "vehicle":
                    self.reactive[rec.agent_id] = _ReactiveVehicle(rec)

    def states(self, step_idx: int) -> dict:
        out = {}
        for rec in self.sc.agents:
            if rec.agent_id in self.reactive:
                out[rec.agent_id] = self.reactive[rec.agent_id].state(step_idx)
            else:
                i = min(step_idx, len(rec.x) - 1)
                out[rec.agent_id] = (float(rec.x[i]), float(rec.y[i]),
                                     float(rec.theta[i]), float(rec.speed[i]))
        return out

    def step(self, step_idx: int, ego: EgoDynamicsState, ego_length: float):
        """Advance reactive vehicles from `step_idx` to `step_idx` + 1."""
        if not self.reactive:
            return
        states = self.states(step_idx)
        lengths = {rec.agent_id: rec.length for rec in self.sc.agents}
        for aid, rv in self.reactive.items():
            others = [(x, y, v, lengths[oid])
                      for oid, (x, y, _, v) in states.items() if oid != aid]
            others.append((ego.x, ego.y, ego.v, ego_length))
            rv.advance(step_idx, others)


@dataclass
class SimTrace:
    header: dict
    records: list
    reasoner_failures: int = 0

    @property
    def collided(self) -> bool:
        return any(rec["collisions"] for rec in self.records)

    def to_ldjson(self) -> str:
        lines = [json.dumps(self.header, sort_keys=True)]
        lines += [json.dumps(rec, sort_keys=True) for rec in self.records]
        lines.append(json.dumps({
            "summary": {"reasoner_failures": self.reasoner_failures,
                        "collision": self.collided}}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_ldjson())

    def sha256(self) -> str:
        return hashlib.sha256(self.to_ldjson().encode("utf-8")).hexdigest()

    @classmethod
    def read(cls, path) -> "SimTrace":
        with open(path, encoding="utf-8") as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        header, *records = lines
        failures = 0
        if records and "summary" in records[-1]:
            failures = records[-1]["summary"]["reasoner_failures"]
            records = records[:-1]
        return cls(header=header, records=records,
                   reasoner_failures=failures)


def run(sc: Scenario, planner, reasoner=None,
        cfg: SimConfig | None = None) -> SimTrace:
    """Closed-loop rollout; runs to the full duration even after collisions
    (scoring gates on them). Deterministic for mock/replay/none reasoners."""
    cfg = cfg or SimConfig()
    duration = cfg.duration if cfg.duration is not None else sc.duration
    n_steps = int(round(duration / cfg.step))
    path = sc.centerline

    if hasattr(planner, "prediction_mode"):
        planner.prediction_mode = cfg.prediction

    ego = EgoDynamicsState(x=sc.ego_init[0], y=sc.ego_init[1],
                           theta=sc.ego_init[2], v=sc.ego_init[3])
    gain = lqr_gain(sc.speed_limit, cfg) if cfg.controller == "lqr" else None
    bg = BackgroundTraffic(sc, cfg.mode)

    plan_steps = max(int(round(cfg.plan_period / cfg.step)), 1)
    reasoner_steps = None
    if reasoner is not None:
        reasoner_steps = max(int(round(reasoner.call_period / cfg.step)), 1)

    decision = None
    traj: Trajectory | None = None
    plan_step_idx = 0
    prev_speed = ego.v
    records = []
    header = {
        "format": TRACE_FORMAT,
        "scenario_id": sc.scenario_id,
        "planner": getattr(planner, "name", "unknown"),
        "reasoner": getattr(reasoner, "name", "none"),
        "mode": cfg.mode,
        "controller": cfg.controller,
        "seed": cfg.seed,
        "step": cfg.step,
        "duration": duration,
        "ego_width": cfg.ego_width,
        "ego_length": cfg.ego_length,
    }

    for i in range(n_steps + 1):
        agent_states = bg.states(i)
        ego_accel = (ego.v - prev_speed) / cfg.step if i > 0 else 0.0
        frame = frame_from_scenario(sc, min(i, sc.n_steps),
                                    ego_state=(ego.x, ego.y, ego.theta, ego.v),
                                    agent_states=agent_states,
                                    ego_accel=ego_accel,
                                    ego_width=cfg.ego_width,
                                    ego_length=cfg.ego_length)
        v_rule = planner.desired_speed(frame)
        if reasoner is not None and i % reasoner_steps == 0:
            descriptions = encode_scene(frame, path, cfg.encoder)
            prompt = build_prompt(descriptions, frame.ego_speed,
                                  frame.speed_limit)
            decision = reasoner.decide(frame, prompt, step=i)
        cap = arbitrate(v_rule, decision) if decision is not None else v_rule

        events = []
        if i % plan_steps == 0 or traj is None:
            if cap <= 0.0:
                # a zero suggestion demands maximum deceleration
                traj = emergency_stop(frame, horizon=8.0)
                events.append("hard_brake_requested")
            else:
                try:
                    traj = planner.plan(frame, path, cap)
                except NoFeasibleTrajectory:
                    traj = emergency_stop(frame, horizon=8.0)
                    events.append("emergency_brake")
            plan_step_idx = i

        collisions = []
        for ag in frame.agents:
            if kernels.boxes_overlap(ego.x, ego.y, ego.theta,
                                     cfg.ego_width, cfg.ego_length,
                                     ag.x, ag.y, ag.theta,
                                     ag.width, ag.length):
                collisions.append(ag.agent_id)

        records.append({
            "i": i,
            "t": round(i * cfg.step, 9),
            "ego": [ego.x, ego.y, ego.theta, ego.v, ego.steering_angle],
            "desired": v_rule,
            "cap": cap,
            "decision": None if decision is None else {
                "speed": decision.suggested_speed, "source": decision.source},
            "traj": traj.label,
            "fallback": traj.fallback,
            "agents": [[ag.agent_id, ag.x, ag.y, ag.theta, ag.speed]
                       for ag in frame.agents],
            "collisions": collisions,
            "events": events,
        })

        if i == n_steps:
            break
        sample_idx = i - plan_step_idx + 1
        bg.step(i, ego, cfg.ego_length)
        prev_speed = ego.v
        ego = step_ego(ego, traj, sample_idx, cfg, gain)

    failures = getattr(reasoner, "failure_count", 0) if reasoner else 0
    return SimTrace(header=header, records=records,
                    reasoner_failures=failures)

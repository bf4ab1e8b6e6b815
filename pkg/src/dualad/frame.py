"""World-frame snapshots: the per-step view of ego and agents that the
encoder, the planners and the reasoner all consume."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scenario import Scenario

EGO_WIDTH = 2.0
EGO_LENGTH = 4.8


@dataclass
class AgentState:
    """One agent at a single instant, plus its known future log if any."""

    agent_id: str
    kind: str
    x: float
    y: float
    theta: float
    speed: float
    width: float
    length: float
    # remaining logged future on the simulation grid (including "now")
    future_x: np.ndarray = field(default=None, repr=False)
    future_y: np.ndarray = field(default=None, repr=False)
    future_theta: np.ndarray = field(default=None, repr=False)


@dataclass
class WorldFrame:
    """Snapshot of the scene at time t."""

    t: float
    ego_x: float
    ego_y: float
    ego_theta: float
    ego_speed: float
    agents: list
    speed_limit: float
    ego_accel: float = 0.0
    ego_width: float = EGO_WIDTH
    ego_length: float = EGO_LENGTH
    red_stop_lines: tuple = ()


def frame_from_scenario(sc: Scenario, step: int,
                        ego_state=None, agent_states=None,
                        ego_accel: float = 0.0,
                        ego_width: float = EGO_WIDTH,
                        ego_length: float = EGO_LENGTH) -> WorldFrame:
    """Build the frame at grid index `step`.

    `ego_state` overrides the scenario's initial ego (x, y, theta, speed);
    `agent_states` (id -> (x, y, theta, speed)) overrides logged agent
    states, as the reactive simulator does.
    """
    t = step * 0.1
    if ego_state is None:
        ego_state = sc.ego_init
    agents = []
    for rec in sc.agents:
        if agent_states is not None and rec.agent_id in agent_states:
            x, y, theta, speed = agent_states[rec.agent_id]
        else:
            x, y, theta, speed = (rec.x[step], rec.y[step],
                                  rec.theta[step], rec.speed[step])
        agents.append(AgentState(
            agent_id=rec.agent_id, kind=rec.kind,
            x=float(x), y=float(y), theta=float(theta), speed=float(speed),
            width=rec.width, length=rec.length,
            future_x=rec.x[step:], future_y=rec.y[step:],
            future_theta=rec.theta[step:]))
    red = tuple(sorted(s for s, state in sc.light_state_at(t).items()
                       if state == "red"))
    return WorldFrame(t=t, ego_x=float(ego_state[0]), ego_y=float(ego_state[1]),
                      ego_theta=float(ego_state[2]), ego_speed=float(ego_state[3]),
                      agents=agents, speed_limit=sc.speed_limit,
                      ego_accel=ego_accel, ego_width=ego_width,
                      ego_length=ego_length, red_stop_lines=red)

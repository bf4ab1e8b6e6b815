"""Agent motion prediction for planning and safety checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..frame import WorldFrame

DT = 0.1


@dataclass
class BoxTrack:
    """Predicted oriented-box poses of one agent on the 0.1 s grid."""

    agent_id: str
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    width: float
    length: float


def predict_agents(frame: WorldFrame, horizon: float,
                   mode: str = "cv") -> dict:
    """Per-agent box tracks over [0, horizon].

    mode "cv": constant velocity, constant heading from the current state.
    mode "log": replay the agent's known future log, constant-velocity
    beyond its end (and for agents without a future log).
    """
    if mode not in ("cv", "log"):
        raise ValueError(f"unknown prediction mode {mode!r}")
    n = int(round(horizon / DT))
    t = np.arange(n + 1) * DT
    tracks = {}
    for ag in frame.agents:
        if mode == "log" and ag.future_x is not None and len(ag.future_x) > 0:
            m = min(n + 1, len(ag.future_x))
            x = np.empty(n + 1)
            y = np.empty(n + 1)
            theta = np.empty(n + 1)
            x[:m] = ag.future_x[:m]
            y[:m] = ag.future_y[:m]
            theta[:m] = ag.future_theta[:m]
            if m < n + 1:
                x[m:] = x[m - 1]
                y[m:] = y[m - 1]
                theta[m:] = theta[m - 1]
        else:
            x = ag.x + ag.speed * np.cos(ag.theta) * t
            y = ag.y + ag.speed * np.sin(ag.theta) * t
            theta = np.full(n + 1, ag.theta)
        tracks[ag.agent_id] = BoxTrack(agent_id=ag.agent_id, x=x, y=y,
                                       theta=theta, width=ag.width,
                                       length=ag.length)
    return tracks

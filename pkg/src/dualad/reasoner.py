"""Upper layer: prompt construction, reasoner backends and the speed
arbiter.

The reasoner suggests a driving speed limit in [0, 15] m/s; the arbiter
only ever lowers the bottom-layer planner's desired speed, never raises
it. All backend failures degrade to a no-intervention decision (15 m/s)
and are counted for reporting.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .frame import WorldFrame
from .planners.prediction import predict_agents

SPEED_MIN = 0.0
SPEED_MAX = 15.0

SYSTEM_MESSAGE = "You are the safety supervisor of an autonomous vehicle."

PROMPT_HEADER = (
    "Review the driving scene below and suggest a driving speed limit "
    "between 0 and 15 m/s as JSON {\"speed\": <number>, "
    "\"rationale\": <string>}. Intervene only when you see potential "
    "danger; otherwise answer 15."
)

NO_AGENTS_LINE = "No agents nearby."


@dataclass(frozen=True)
class ReasonerDecision:
    suggested_speed: float
    rationale: str = ""
    source: str = "fallback"  # remote_llm | mock | fallback

    def __post_init__(self):
        if not SPEED_MIN <= self.suggested_speed <= SPEED_MAX:
            raise ValueError(
                f"suggested speed {self.suggested_speed} outside "
                f"[{SPEED_MIN}, {SPEED_MAX}]")
        if self.source not in ("remote_llm", "mock", "fallback"):
            raise ValueError(f"unknown decision source {self.source!r}")

    @classmethod
    def clamped(cls, speed: float, rationale: str = "",
                source: str = "remote_llm") -> "ReasonerDecision":
        speed = min(max(float(speed), SPEED_MIN), SPEED_MAX)
        return cls(suggested_speed=speed, rationale=rationale, source=source)


NO_INTERVENTION = ReasonerDecision(suggested_speed=SPEED_MAX,
                                   rationale="no intervention",
                                   source="fallback")


@dataclass
class ReasonerBackendConfig:
    endpoint_url: str = "http://localhost:8080/v1/chat/completions"
    model_name: str = "glm-4-flash"
    api_key_env_var: str = "DUALAD_API_KEY"
    timeout: float = 10.0
    max_retries: int = 2
    call_period: float = 1.0

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")
        if self.call_period < 0.1:
            raise ValueError("call_period must cover the simulation step")


def build_prompt(descriptions, ego_speed: float, speed_limit: float,
                 max_length: int = 8000) -> str:
    """Deterministic prompt: task header, ego line, agent blocks verbatim.

    When the prompt would exceed `max_length` characters, whole blocks are
    dropped farthest-first (the blocks arrive ordered nearest-first).
    """
    ego_line = (f"Ego speed: {ego_speed:.1f} m/s. "
                f"Road speed limit: {speed_limit:.1f} m/s.")
    blocks = [d.text for d in descriptions]
    if not blocks:
        return "\n\n".join([PROMPT_HEADER, ego_line, NO_AGENTS_LINE])
    while blocks:
        prompt = "\n\n".join([PROMPT_HEADER, ego_line] + blocks)
        if len(prompt) <= max_length:
            return prompt
        blocks.pop()
    return "\n\n".join([PROMPT_HEADER, ego_line, NO_AGENTS_LINE])


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def extract_first_json(text: str):
    """First balanced JSON object in `text`, or None."""
    start = text.find("{")
    while start != -1:
        depth = 0
        in_str = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_str:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_str = False
            elif ch == '"':
                in_str = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        return json.loads(text[start:i + 1])
                    except json.JSONDecodeError:
                        break
        start = text.find("{", start + 1)
    return None


def parse_reply(content: str):
    """Reply content -> ReasonerDecision, or None when unusable."""
    obj = extract_first_json(content)
    if not isinstance(obj, dict):
        return None
    speed = obj.get("speed")
    if not isinstance(speed, (int, float)) or not math.isfinite(speed):
        return None
    rationale = obj.get("rationale")
    if not isinstance(rationale, str):
        rationale = ""
    return ReasonerDecision.clamped(speed, rationale, source="remote_llm")


def arbitrate(v_rule: float, decision: ReasonerDecision) -> float:
    """Overwrite the planner's desired speed only when the suggestion is
    lower; equivalently the minimum of the two."""
    if decision.suggested_speed <= v_rule:
        return decision.suggested_speed
    return v_rule


def mock_reason(frame: WorldFrame, horizon: float = 8.0) -> ReasonerDecision:
    """Deterministic offline reasoner: scales the suggestion with the
    minimum time-to-collision under constant-velocity extrapolation.

    TTC below 4 s maps to a cap of twice the TTC (so 1 s -> 2 m/s);
    anything safer is left alone.
    """
    ttc = min_time_to_collision(frame, horizon)
    if ttc < 4.0:
        speed = min(max(2.0 * ttc, SPEED_MIN), SPEED_MAX)
        return ReasonerDecision(suggested_speed=speed,
                                rationale=f"min TTC {ttc:.1f} s",
                                source="mock")
    return ReasonerDecision(suggested_speed=SPEED_MAX,
                            rationale="no conflict within 4 s",
                            source="mock")


def min_time_to_collision(frame: WorldFrame, horizon: float = 8.0) -> float:
    """First predicted box contact between the constant-velocity ego and
    any constant-velocity agent; +inf when none occurs within the horizon."""
    if not frame.agents:
        return math.inf
    n = int(round(horizon / 0.1))
    t = np.arange(n + 1) * 0.1
    ex = frame.ego_x + frame.ego_speed * math.cos(frame.ego_theta) * t
    ey = frame.ego_y + frame.ego_speed * math.sin(frame.ego_theta) * t
    eth = np.full(n + 1, frame.ego_theta)
    best = math.inf
    for track in predict_agents(frame, horizon, mode="cv").values():
        dist = kernels.sweep_box_distances(
            ex, ey, eth, frame.ego_width, frame.ego_length,
            track.x, track.y, track.theta, track.width, track.length)
        hits = np.nonzero(dist <= 0.0)[0]
        if len(hits):
            best = min(best, float(t[hits[0]]))
    return best


class MockReasoner:
    """Synchronous deterministic stand-in; never fails."""

    name = "mock"

    def __init__(self, horizon: float = 8.0,
                 call_period: float = 1.0):
        self.horizon = horizon
        self.call_period = call_period
        self.failure_count = 0

    def decide(self, frame: WorldFrame, prompt: str, step: int) -> ReasonerDecision:
        return mock_reason(frame, self.horizon)


class RemoteReasoner:
    """OpenAI-compatible chat-completions client.

    Failures (network errors, timeouts, malformed replies) never raise:
    they produce the no-intervention decision and bump `failure_count`.
    Every exchange can be recorded to a replay file for deterministic
    regression runs.
    """

    name = "remote"

    def __init__(self, config: ReasonerBackendConfig,
                 record_path: str | None = None):
        self.config = config
        self.failure_count = 0
        self.call_period = config.call_period
        self.record_path = record_path
        self._record_fh = None

    def decide(self, frame: WorldFrame, prompt: str, step: int) -> ReasonerDecision:
        return query(self, prompt, step=step)

    def _record(self, step: int, prompt: str, reply: str):
        if self.record_path is None:
            return
        if self._record_fh is None:
            self._record_fh = open(self.record_path, "a", encoding="utf-8")
        self._record_fh.write(json.dumps({
            "step": step, "prompt_hash": prompt_hash(prompt), "reply": reply,
        }) + "\n")
        self._record_fh.flush()

    def close(self):
        if self._record_fh is not None:
            self._record_fh.close()
            self._record_fh = None


def query(backend: RemoteReasoner, prompt: str, step: int = -1) -> ReasonerDecision:
    """Send one chat-completion request and parse the suggestion.

    Retries up to `max_retries` extra attempts; after that (or on any
    malformed reply) returns the no-intervention fallback and counts the
    failure.
    """
    import requests

    cfg = backend.config
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(cfg.api_key_env_var, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": cfg.model_name,
        "messages": [
            {"role": "system", "content": SYSTEM_MESSAGE},
            {"role": "user", "content": prompt},
        ],
        "temperature": 0,
    }
    content = None
    for _ in range(cfg.max_retries + 1):
        try:
            resp = requests.post(cfg.endpoint_url, json=body, headers=headers,
                                 timeout=cfg.timeout)
            resp.raise_for_status()
            payload = resp.json()
            content = payload["choices"][0]["message"]["content"]
            break
        except Exception:  # noqa: BLE001 - every failure mode degrades the same way
            content = None
    if content is None:
        backend.failure_count += 1
        return NO_INTERVENTION
    backend._record(step, prompt, content)
    decision = parse_reply(content)
    if decision is None:
        backend.failure_count += 1
        return NO_INTERVENTION
    return decision


class ReplayReasoner:
    """Replays recorded remote replies keyed by prompt hash; misses count
    as failures and fall back to no intervention."""

    name = "replay"

    def __init__(self, replay_path: str, call_period: float = 1.0):
        self.call_period = call_period
        self.failure_count = 0
        self._replies = {}
        with open(replay_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                self._replies[rec["prompt_hash"]] = rec["reply"]

    def decide(self, frame: WorldFrame, prompt: str, step: int) -> ReasonerDecision:
        reply = self._replies.get(prompt_hash(prompt))
        if reply is None:
            self.failure_count += 1
            return NO_INTERVENTION
        decision = parse_reply(reply)
        if decision is None:
            self.failure_count += 1
            return NO_INTERVENTION
        return decision

"""Scenario data model, JSON file format, validation and worst-K selection.

One scenario per UTF-8 JSON document, schema version `dualad-scn-1`:

    {
      "format": "dualad-scn-1",
      "id": "...",
      "centerline": [[x, y], ...],
      "speed_limit_mps": 10.0,
      "ego_init": [x, y, theta, speed],
      "agents": [{"id": ..., "kind": ..., "width_m": ..., "length_m": ...,
                  "states": [[t, x, y, theta, speed], ...]}, ...],
      "duration_s": 15.0,
      "traffic_lights": [[t, stop_line_s, "red"|"green"], ...]   # optional
    }

On load, agent states are resampled onto the 0.1 s simulation grid by
linear interpolation (headings interpolated on the circle); outside their
logged span agents clamp to the nearest endpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InsufficientResults, ParseError, SchemaError,
                     ValidationError)
from .geom import ReferencePath, wrap_angle

FORMAT_VERSION = "dualad-scn-1"
GRID_STEP = 0.1
AGENT_KINDS = ("vehicle", "pedestrian", "bicycle", "static_object")
LIGHT_STATES = ("red", "green")


@dataclass
class AgentRecord:
    """One background agent with its log, resampled to the simulation grid."""

    agent_id: str
    kind: str
    width: float
    length: float
    # logged knots as given in the file
    log_t: np.ndarray
    log_x: np.ndarray
    log_y: np.ndarray
    log_theta: np.ndarray
    log_speed: np.ndarray
    # grid-resampled states, aligned with the scenario grid
    t: np.ndarray = field(default=None, repr=False)
    x: np.ndarray = field(default=None, repr=False)
    y: np.ndarray = field(default=None, repr=False)
    theta: np.ndarray = field(default=None, repr=False)
    speed: np.ndarray = field(default=None, repr=False)

    def resample(self, grid: np.ndarray):
        self.t = grid
        self.x = np.interp(grid, self.log_t, self.log_x)
        self.y = np.interp(grid, self.log_t, self.log_y)
        self.speed = np.interp(grid, self.log_t, self.log_speed)
        self.theta = _interp_angle(grid, self.log_t, self.log_theta)

    def __eq__(self, other):
        if not isinstance(other, AgentRecord):
            return NotImplemented
        return (self.agent_id == other.agent_id and self.kind == other.kind
                and self.width == other.width and self.length == other.length
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("t", "x", "y", "theta", "speed")))


@dataclass
class TrafficLightEvent:
    t: float
    stop_line_s: float
    state: str


@dataclass
class Scenario:
    """Immutable-after-load description of one driving scene."""

    scenario_id: str
    centerline: ReferencePath
    speed_limit: float
    ego_init: tuple  # (x, y, theta, speed)
    agents: list
    duration: float
    traffic_lights: list = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / GRID_STEP))

    @property
    def grid(self) -> np.ndarray:
        return np.round(np.arange(self.n_steps + 1) * GRID_STEP, 9)

    def light_state_at(self, t: float):
        """Latest (stop_line_s, state) pairs at time t, one per stop line."""
        active = {}
        for ev in self.traffic_lights:
            if ev.t <= t + 1e-9:
                active[ev.stop_line_s] = ev.state
        return active

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.scenario_id == other.scenario_id
                and np.array_equal(self.centerline.points, other.centerline.points)
                and self.speed_limit == other.speed_limit
                and self.ego_init == other.ego_init
                and self.duration == other.duration
                and self.agents == other.agents
                and self.traffic_lights == other.traffic_lights)


@dataclass(frozen=True)
class BenchmarkSet:
    """An ordered worst-K selection over scored scenarios."""

    name: str
    scenario_ids: tuple
    selection_metric: str  # "r_cls" or "nr_cls"
    k: int

    def __post_init__(self):
        if self.k != len(self.scenario_ids):
            raise ValidationError("k must equal the number of scenario ids")
        if len(set(self.scenario_ids)) != len(self.scenario_ids):
            raise ValidationError("benchmark scenario ids must be unique")
        if self.selection_metric not in ("r_cls", "nr_cls"):
            raise ValidationError(
                f"unknown selection_metric {self.selection_metric!r}")

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "scenario_ids": list(self.scenario_ids),
            "selection_metric": self.selection_metric,
            "k": self.k,
        }, indent=2) + "\n"


def _interp_angle(t, tk, theta_k):
    """Linear interpolation of headings on the circle, clamped outside."""
    t = np.asarray(t, dtype=np.float64)
    if len(tk) == 1:
        return np.full(t.shape, theta_k[0])
    idx = np.clip(np.searchsorted(tk, t, side="right") - 1, 0, len(tk) - 2)
    t0, t1 = tk[idx], tk[idx + 1]
    frac = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
    return theta_k[idx] + frac * wrap_angle(theta_k[idx + 1] - theta_k[idx])


def _require(doc: dict, key: str, types, where: str = "scenario"):
    if key not in doc:
        raise SchemaError(f"missing required field '{key}' in {where}")
    value = doc[key]
    if not isinstance(value, types):
        raise SchemaError(f"field '{key}' in {where} has wrong type "
                          f"({type(value).__name__})")
    return value


def _validate(cond: bool, field_name: str, message: str):
    if not cond:
        raise ValidationError(f"field '{field_name}': {message}")


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file; see the module docstring schema."""
    with open(path, encoding="utf-8") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return scenario_from_dict(doc, where=str(path))


def scenario_from_dict(doc: dict, where: str = "scenario") -> Scenario:
    fmt = _require(doc, "format", str, where)
    _validate(fmt == FORMAT_VERSION, "format",
              f"expected {FORMAT_VERSION!r}, got {fmt!r}")
    scenario_id = _require(doc, "id", str, where)
    centerline_raw = _require(doc, "centerline", list, where)
    speed_limit = _require(doc, "speed_limit_mps", (int, float), where)
    ego_init = _require(doc, "ego_init", list, where)
    agents_raw = _require(doc, "agents", list, where)
    duration = _require(doc, "duration_s", (int, float), where)
    lights_raw = doc.get("traffic_lights", [])

    _validate(duration > 0, "duration_s", "must be positive")
    _validate(abs(duration / GRID_STEP - round(duration / GRID_STEP)) < 1e-9,
              "duration_s", f"must be a multiple of the {GRID_STEP} s grid")
    _validate(speed_limit > 0, "speed_limit_mps", "must be positive")
    _validate(len(ego_init) == 4, "ego_init", "expected [x, y, theta, speed]")
    _validate(all(isinstance(v, (int, float)) and math.isfinite(v)
                  for v in ego_init), "ego_init", "entries must be finite numbers")
    _validate(ego_init[3] >= 0, "ego_init", "speed must be non-negative")

    try:
        centerline = ReferencePath(centerline_raw)
    except Exception as exc:
        raise ValidationError(f"field 'centerline': {exc}") from None

    grid = np.round(np.arange(int(round(duration / GRID_STEP)) + 1) * GRID_STEP, 9)
    agents = []
    seen_ids = set()
    for i, a in enumerate(agents_raw):
        whereA = f"agents[{i}]"
        if not isinstance(a, dict):
            raise SchemaError(f"{whereA} must be an object")
        aid = _require(a, "id", str, whereA)
        kind = _require(a, "kind", str, whereA)
        width = _require(a, "width_m", (int, float), whereA)
        length = _require(a, "length_m", (int, float), whereA)
        states = _require(a, "states", list, whereA)
        _validate(aid not in seen_ids, f"{whereA}.id", f"duplicate id {aid!r}")
        seen_ids.add(aid)
        _validate(kind in AGENT_KINDS, f"{whereA}.kind",
                  f"must be one of {AGENT_KINDS}")
        _validate(width > 0, f"{whereA}.width_m", "must be positive")
        _validate(length > 0, f"{whereA}.length_m", "must be positive")
        _validate(len(states) >= 1, f"{whereA}.states", "needs at least one state")
        arr = np.asarray(states, dtype=np.float64)
        _validate(arr.ndim == 2 and arr.shape[1] == 5, f"{whereA}.states",
                  "each state must be [t, x, y, theta, speed]")
        _validate(np.all(np.isfinite(arr)), f"{whereA}.states",
                  "states must be finite")
        _validate(np.all(np.diff(arr[:, 0]) > 0), f"{whereA}.states",
                  "state times must be strictly increasing")
        _validate(np.all(arr[:, 4] >= 0), f"{whereA}.states",
                  "speeds must be non-negative")
        rec = AgentRecord(agent_id=aid, kind=kind, width=float(width),
                          length=float(length), log_t=arr[:, 0],
                          log_x=arr[:, 1], log_y=arr[:, 2],
                          log_theta=arr[:, 3], log_speed=arr[:, 4])
        rec.resample(grid)
        agents.append(rec)

    lights = []
    if not isinstance(lights_raw, list):
        raise SchemaError(f"field 'traffic_lights' in {where} has wrong type")
    for i, ev in enumerate(lights_raw):
        _validate(isinstance(ev, list) and len(ev) == 3,
                  f"traffic_lights[{i}]", "expected [t, stop_line_s, state]")
        t, stop_s, state = ev
        _validate(isinstance(t, (int, float)) and isinstance(stop_s, (int, float)),
                  f"traffic_lights[{i}]", "t and stop_line_s must be numbers")
        _validate(state in LIGHT_STATES, f"traffic_lights[{i}].state",
                  f"must be one of {LIGHT_STATES}")
        lights.append(TrafficLightEvent(float(t), float(stop_s), state))

    return Scenario(scenario_id=scenario_id, centerline=centerline,
                    speed_limit=float(speed_limit),
                    ego_init=tuple(float(v) for v in ego_init),
                    agents=agents, duration=float(duration),
                    traffic_lights=lights)


def scenario_to_dict(sc: Scenario) -> dict:
    """Serialize a scenario; grid-resampled agent states are written back,
    so load -> save -> load is the identity."""
    return {
        "format": FORMAT_VERSION,
        "id": sc.scenario_id,
        "centerline": [[float(x), float(y)] for x, y in sc.centerline.points],
        "speed_limit_mps": sc.speed_limit,
        "ego_init": list(sc.ego_init),
        "agents": [{
            "id": a.agent_id,
            "kind": a.kind,
            "width_m": a.width,
            "length_m": a.length,
            "states": [[float(t), float(x), float(y), float(th), float(v)]
                       for t, x, y, th, v
                       in zip(a.t, a.x, a.y, a.theta, a.speed)],
        } for a in sc.agents],
        "duration_s": sc.duration,
        "traffic_lights": [[ev.t, ev.stop_line_s, ev.state]
                           for ev in sc.traffic_lights],
    }


def save_scenario(sc: Scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def select_worst_k(results, k: int, name: str = "worst-k",
                   selection_metric: str = "r_cls") -> BenchmarkSet:
    """Pick the k lowest-scoring scenarios, ascending by score.

    Ties break lexicographically by scenario id. Raises InsufficientResults
    when k exceeds the number of results.
    """
    results = list(results)
    if k > len(results):
        raise InsufficientResults(
            f"asked for k={k} of only {len(results)} results")
    for sid, score in results:
        if not 0.0 <= score <= 100.0:
            raise ValidationError(
                f"score for {sid!r} out of range [0, 100]: {score}")
    ranked = sorted(results, key=lambda r: (r[1], r[0]))
    return BenchmarkSet(name=name,
                        scenario_ids=tuple(sid for sid, _ in ranked[:k]),
                        selection_metric=selection_metric, k=k)

"""Composite closed-loop scoring of simulation traces.

The score is a documented approximation of a closed-loop driving score:
a collision zeroes it outright; otherwise it is 100 times the weighted sum
of progress, speed-limit compliance, comfort and a time-to-collision
margin term. Absolute values are only meaningful relative to other runs
scored the same way.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBenchmark, IncompleteTrace
from .frame import WorldFrame, AgentState
from .reasoner import min_time_to_collision
from .scenario import Scenario
from .sim import SimTrace

DT = 0.1
COMFORT_MAX_ACCEL = 3.0     # m/s^2
COMFORT_MAX_JERK = 5.0      # m/s^3
TTC_SATURATION = 3.0        # s; larger margins score full marks


@dataclass(frozen=True)
class MetricWeights:
    w_progress: float = 0.5
    w_speed: float = 0.2
    w_comfort: float = 0.2
    w_ttc: float = 0.1

    def __post_init__(self):
        vals = (self.w_progress, self.w_speed, self.w_comfort, self.w_ttc)
        if any(w < 0 for w in vals):
            raise ValueError("metric weights must be non-negative")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ValueError(f"metric weights must sum to 1, got {sum(vals)}")


@dataclass
class ScoreCard:
    score: float
    collision: bool
    progress_ratio: float
    speed_compliance: float
    comfort: float
    min_ttc: float
    drivable_deviation: float
    failed: bool = False


def score_trace(trace: SimTrace, sc: Scenario,
                weights: MetricWeights | None = None) -> ScoreCard:
    """Score one complete trace; raises IncompleteTrace for short traces."""
    weights = weights or MetricWeights()
    duration = trace.header["duration"]
    expected = int(round(duration / DT)) + 1
    if len(trace.records) < expected:
        raise IncompleteTrace(
            f"trace has {len(trace.records)} records, expected {expected}")

    ego = np.array([rec["ego"] for rec in trace.records])
    ex, ey, ev = ego[:, 0], ego[:, 1], ego[:, 3]
    collision = trace.collided

    # progress along the route, against driving the limit for the duration
    s_arr, d_arr = sc.centerline.project_xy(ex, ey)
    progress = max(float(s_arr[-1] - s_arr[0]), 0.0)
    reference = min(sc.speed_limit * duration,
                    max(sc.centerline.total_length - float(s_arr[0]), 1e-6))
    progress_ratio = min(progress / reference, 1.0)

    over = np.sum(ev > sc.speed_limit + 1e-6) * DT
    speed_compliance = max(1.0 - over / duration, 0.0)

    accel = np.diff(ev) / DT
    jerk = np.diff(accel) / DT
    ok_accel = np.abs(accel) <= COMFORT_MAX_ACCEL + 1e-9
    ok_jerk = np.abs(jerk) <= COMFORT_MAX_JERK + 1e-9
    comfort = float(np.mean(ok_accel[1:] & ok_jerk)) if len(jerk) else 1.0

    min_ttc = math.inf
    ego_w = trace.header["ego_width"]
    ego_l = trace.header["ego_length"]
    dims = {rec.agent_id: (rec.kind, rec.width, rec.length)
            for rec in sc.agents}
    for rec in trace.records:
        if rec["collisions"]:
            min_ttc = 0.0
            break
        if not rec["agents"]:
            continue
        agents = [AgentState(agent_id=aid, kind=dims[aid][0], x=x, y=y,
                             theta=th, speed=v, width=dims[aid][1],
                             length=dims[aid][2])
                  for aid, x, y, th, v in rec["agents"]]
        frame = WorldFrame(t=rec["t"], ego_x=rec["ego"][0], ego_y=rec["ego"][1],
                           ego_theta=rec["ego"][2], ego_speed=rec["ego"][3],
                           agents=agents, speed_limit=sc.speed_limit,
                           ego_width=ego_w, ego_length=ego_l)
        min_ttc = min(min_ttc, min_time_to_collision(frame, horizon=4.0))
    ttc_term = 1.0 if math.isinf(min_ttc) else min(min_ttc / TTC_SATURATION, 1.0)

    drivable_deviation = float(np.max(np.abs(d_arr)))

    if collision:
        score = 0.0
    else:
        score = 100.0 * (weights.w_progress * progress_ratio
                         + weights.w_speed * speed_compliance
                         + weights.w_comfort * comfort
                         + weights.w_ttc * ttc_term)
    return ScoreCard(score=score, collision=collision,
                     progress_ratio=progress_ratio,
                     speed_compliance=speed_compliance, comfort=comfort,
                     min_ttc=min_ttc, drivable_deviation=drivable_deviation,
                     failed=trace.reasoner_failures > 0)


def score_benchmark(traces: dict, scenarios: dict,
                    weights: MetricWeights | None = None,
                    failure_threshold: int = 0):
    """Score a map of scenario_id -> SimTrace.

    Returns (rows, mean_score, failure_proportion) where rows are
    (scenario_id, ScoreCard) sorted by id. A run counts as failed when its
    reasoner failure count exceeds `failure_threshold`.
    """
    if not traces:
        raise EmptyBenchmark("no traces to score")
    rows = []
    for sid in sorted(traces):
        card = score_trace(traces[sid], scenarios[sid], weights)
        card.failed = traces[sid].reasoner_failures > failure_threshold
        rows.append((sid, card))
    mean_score = sum(card.score for _, card in rows) / len(rows)
    failure_proportion = sum(card.failed for _, card in rows) / len(rows)
    return rows, mean_score, failure_proportion


CSV_COLUMNS = ("scenario_id", "score", "collision", "progress",
               "speed_compliance", "comfort", "min_ttc", "failed")


def _fmt_float(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.4f}"


def report_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for sid, card in rows:
        writer.writerow([
            sid, _fmt_float(card.score),
            "true" if card.collision else "false",
            _fmt_float(card.progress_ratio),
            _fmt_float(card.speed_compliance),
            _fmt_float(card.comfort),
            _fmt_float(card.min_ttc),
            "true" if card.failed else "false",
        ])
    return buf.getvalue()


def report_json(rows, mean_score: float, failure_proportion: float,
                mode: str) -> str:
    payload = {
        "format": "dualad-report-1",
        "mode": mode,
        "n_scenarios": len(rows),
        "mean_score": round(mean_score, 4),
        "failure_proportion": round(failure_proportion, 4),
        "rows": [{
            "scenario_id": sid,
            "score": round(card.score, 4),
            "collision": card.collision,
            "progress": round(card.progress_ratio, 4),
            "speed_compliance": round(card.speed_compliance, 4),
            "comfort": round(card.comfort, 4),
            "min_ttc": None if math.isinf(card.min_ttc) else round(card.min_ttc, 4),
            "failed": card.failed,
        } for sid, card in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"

"""Bundled synthetic scenario corpus.

Thirty deterministic scenarios spanning six hazard classes: free road,
stopped traffic, lead-vehicle hard brake, crossing pedestrian, oncoming
drift and side merge. A ten-scenario critical suite (the crossing /
hard-brake / oncoming fixtures crafted so the bare planners fail) backs
the directional benchmark claims.

`build_corpus` regenerates the JSON files; the generated corpus ships as
package data under `dualad/data/corpus`.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

EGO_LEN = 4.8

# scenarios whose hazards defeat the bare rule-based planners; used by the
# directional benchmark checks
CRITICAL_SUITE = (
    "ped-cross-01", "ped-cross-02", "ped-cross-03", "ped-cross-04",
    "lead-brake-01", "lead-brake-02", "lead-brake-03",
    "oncoming-01", "oncoming-02", "oncoming-03",
)


def corpus_dir() -> Path:
    """Directory of the bundled scenario JSON files."""
    return Path(resources.files("dualad").joinpath("data", "corpus"))


def _straight(length=240.0, spacing=2.0):
    n = int(round(length / spacing))
    return [[round(i * spacing, 3), 0.0] for i in range(n + 1)]


def _s_curve(length=240.0, amplitude=4.0, wavelength=160.0, spacing=1.0):
    n = int(round(length / spacing))
    return [[round(i * spacing, 3),
             round(amplitude * math.sin(2 * math.pi * i * spacing / wavelength), 4)]
            for i in range(n + 1)]


def _agent(aid, kind, width, length, states):
    return {"id": aid, "kind": kind, "width_m": width, "length_m": length,
            "states": [[round(float(t), 3), round(float(x), 4),
                        round(float(y), 4), round(float(th), 6),
                        round(float(v), 4)] for t, x, y, th, v in states]}


def _const_states(x, y, theta, t_end=15.0):
    return [[0.0, x, y, theta, 0.0], [t_end, x, y, theta, 0.0]]


def _longitudinal_profile(x0, v, brake_t, decel, t_end=15.0, dt=0.25):
    """1-D log: constant speed, then braking to a stop at `decel`."""
    states = []
    x, t, speed = x0, 0.0, v
    while t <= t_end + 1e-9:
        states.append([t, x, 0.0, 0.0, speed])
        if t >= brake_t:
            speed = max(speed - decel * dt, 0.0)
        x += speed * dt
        t += dt
    return states


def _parked_rows(x_from, x_to, offsets, step=11.0):
    agents = []
    i = 0
    for d in offsets:
        x = x_from
        while x <= x_to:
            agents.append(_agent(f"parked-{i:02d}", "vehicle", 2.0, 4.5,
                                 _const_states(x, d, 0.0)))
            i += 1
            x += step
    return agents


def _scenario(sid, centerline, limit, ego, agents, lights=None):
    doc = {
        "format": "dualad-scn-1",
        "id": sid,
        "centerline": centerline,
        "speed_limit_mps": limit,
        "ego_init": ego,
        "agents": agents,
        "duration_s": 15.0,
    }
    if lights:
        doc["traffic_lights"] = lights
    return doc


def free_road(sid, limit, ego_v, curved=False):
    line = _s_curve() if curved else _straight()
    return _scenario(sid, line, limit, [0.0, 0.0, 0.0, ego_v], [])


def stopped_traffic(sid, queue_x, n_cars=3, limit=10.0, with_light=False):
    agents = [_agent(f"queue-{i}", "vehicle", 2.0, 4.5,
                     _const_states(queue_x + 7.0 * i, 0.0, 0.0))
              for i in range(n_cars)]
    lights = [[0.0, queue_x - 8.0, "red"], [10.0, queue_x - 8.0, "green"]] \
        if with_light else None
    return _scenario(sid, _straight(), limit, [0.0, 0.0, 0.0, 8.0],
                     agents, lights)


def lead_brake(sid, gap0, v_road, brake_t, decel, flanked,
               flank_from=20.0, flank_to=150.0):
    lead_x = gap0 + 0.5 * EGO_LEN + 0.5 * 4.5
    agents = [_agent("lead", "vehicle", 2.0, 4.5,
                     _longitudinal_profile(lead_x, v_road, brake_t, decel))]
    if flanked:
        agents += _parked_rows(flank_from, flank_to, (-3.0, 3.0))
    return _scenario(sid, _straight(), v_road,
                     [0.0, 0.0, 0.0, v_road], agents)


def ped_cross(sid, ped_x, start_y, walk_speed, limit=12.0, ego_v=12.0,
              start_t=0.0):
    """Pedestrian crossing through the ego path (sign of `walk_speed` gives
    the direction); `start_t` > 0 makes a dart-out (standing until then)."""
    heading = math.pi / 2 if walk_speed >= 0 else -math.pi / 2
    states = []
    t, y = 0.0, start_y
    while t <= 15.0 + 1e-9:
        moving = t >= start_t
        v = abs(walk_speed) if moving else 0.0
        states.append([t, ped_x, y, heading, v])
        if moving:
            y += walk_speed * 0.25
        t += 0.25
    return _scenario(sid, _straight(), limit, [0.0, 0.0, 0.0, ego_v],
                     [_agent("ped", "pedestrian", 0.6, 0.6, states)])


def oncoming(sid, start_x, v, drift_into=(92.0, 46.0), blocker=(65.0, 1.0),
             flanked=True, limit=12.0, ego_v=12.0, ramp=12.0):
    """Oncoming vehicle overtaking its own slow queue through the ego's
    lane: it pulls out into the ego lane between two stations of its
    travel, then returns to its side ahead of the queue. The queue blocks a
    leftward dodge; an optional parked row blocks the right."""
    x_in, x_out = drift_into

    def lane_y(x):
        if x >= x_in or x <= x_out - ramp:
            return 3.5
        if x >= x_in - ramp:
            return 3.5 + (0.4 - 3.5) * (x_in - x) / ramp
        if x >= x_out:
            return 0.4
        return 0.4 + (3.5 - 0.4) * (x_out - x) / ramp

    points = []
    t, x = 0.0, start_x
    while t <= 15.0 + 1e-9:
        points.append((t, x, lane_y(x)))
        x -= v * 0.25
        t += 0.25
    states = []
    for i, (t, x, y) in enumerate(points):
        nxt = points[min(i + 1, len(points) - 1)]
        th = math.atan2(nxt[2] - y, nxt[1] - x) if nxt[1] != x else math.pi
        states.append([t, x, y, th, v])
    agents = [_agent("oncoming", "vehicle", 2.0, 4.5, states)]
    if blocker is not None:
        bx, bv = blocker
        b_states = [[t, bx - bv * t, 3.5, math.pi, bv]
                    for t in [0.25 * k for k in range(61)]]
        agents.append(_agent("queue-head", "vehicle", 2.0, 4.5, b_states))
    if flanked:
        agents += _parked_rows(15.0, 100.0, (-3.0,))
    return _scenario(sid, _straight(), limit, [0.0, 0.0, 0.0, ego_v], agents)


def merge_in(sid, merge_x, start_d, approach_speed, limit=11.0, ego_v=11.0):
    """Vehicle angling from a side position into the ego lane ahead, then
    proceeding along it slowly."""
    angle = math.atan2(-start_d, 18.0)
    states = []
    t, x, y = 0.0, merge_x - 18.0, start_d
    while t <= 15.0 + 1e-9:
        if abs(y) > 0.15:
            vx = approach_speed * math.cos(angle)
            vy = approach_speed * math.sin(angle)
            th = angle
            v = approach_speed
        else:
            vx, vy, th, v = 6.0, 0.0, 0.0, 6.0
            y = 0.0
        states.append([t, x, y, th, v])
        x += vx * 0.25
        y += vy * 0.25
        t += 0.25
    return _scenario(sid, _straight(), limit, [0.0, 0.0, 0.0, ego_v],
                     [_agent("merger", "vehicle", 2.0, 4.5, states)])


def build_corpus_docs() -> list:
    docs = []
    docs.append(free_road("free-01", 10.0, 0.0))
    docs.append(free_road("free-02", 12.0, 5.0))
    docs.append(free_road("free-03", 8.0, 0.0, curved=True))
    docs.append(free_road("free-04", 11.0, 8.0, curved=True))
    docs.append(free_road("free-05", 9.0, 3.0))

    docs.append(stopped_traffic("stopped-01", 60.0))
    docs.append(stopped_traffic("stopped-02", 45.0, n_cars=4))
    docs.append(stopped_traffic("stopped-03", 70.0, with_light=True))
    docs.append(stopped_traffic("stopped-04", 55.0, limit=12.0))
    docs.append(stopped_traffic("stopped-05", 80.0, n_cars=2, with_light=True))

    docs.append(lead_brake("lead-brake-01", 22.0, 12.0, 1.0, 6.0, True))
    docs.append(lead_brake("lead-brake-02", 20.0, 11.0, 1.5, 6.0, True))
    docs.append(lead_brake("lead-brake-03", 24.0, 12.0, 0.5, 5.5, True))
    docs.append(lead_brake("lead-brake-04", 32.0, 10.0, 2.0, 5.0, False))
    docs.append(lead_brake("lead-brake-05", 30.0, 11.0, 1.0, 4.5, False))

    docs.append(ped_cross("ped-cross-01", 38.0, -4.9, 1.4))
    docs.append(ped_cross("ped-cross-02", 36.0, -6.0, 1.6))
    docs.append(ped_cross("ped-cross-03", 42.0, -5.4, 1.5, ego_v=11.0, limit=11.0))
    docs.append(ped_cross("ped-cross-04", 33.0, 5.8, -1.6))
    docs.append(ped_cross("ped-cross-05", 50.0, -4.0, 1.2, start_t=2.0))

    docs.append(oncoming("oncoming-01", 80.0, 10.0))
    docs.append(oncoming("oncoming-02", 76.0, 9.0, drift_into=(88.0, 44.0),
                         blocker=(62.0, 1.0)))
    docs.append(oncoming("oncoming-03", 84.0, 11.0, drift_into=(96.0, 48.0),
                         blocker=(68.0, 1.2)))
    docs.append(oncoming("oncoming-04", 82.0, 10.0, drift_into=(94.0, 46.0),
                         blocker=None, flanked=False))
    docs.append(oncoming("oncoming-05", 78.0, 8.0, drift_into=(90.0, 48.0),
                         flanked=False))

    docs.append(merge_in("merge-01", 45.0, -6.0, 7.0))
    docs.append(merge_in("merge-02", 55.0, 6.5, 7.5))
    docs.append(merge_in("merge-03", 50.0, -7.0, 8.0))
    docs.append(merge_in("merge-04", 60.0, -5.5, 6.5))
    docs.append(merge_in("merge-05", 40.0, 5.5, 6.0))
    return docs


def build_corpus(outdir) -> list:
    """Write every corpus scenario into `outdir`; returns the file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for doc in build_corpus_docs():
        path = outdir / f"{doc['id']}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        paths.append(path)
    return paths


def ped_cross_fixture_id() -> str:
    """The canonical crossing-pedestrian fixture used by the qualitative
    slow-down-before-conflict check."""
    return "ped-cross-01"

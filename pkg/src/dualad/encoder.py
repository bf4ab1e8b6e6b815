"""Rule-based scene-to-text encoder.

Each nearby agent is rendered as a five-line block:

    ID: {id}
    Position: ({s}, {d}) meters ({longitudinal}, {lateral})
    Size: Width: {w} m, Length: {l} m
    Speed: {v} m/s
    Orientation: {theta} rad ({orientation})

Positions are the agent's Frenet coordinates relative to the ego (station
and signed lateral offset, positive left). The template is a byte-exact
external contract: numbers use fixed half-up rounding (one decimal place,
two for the orientation angle) so identical frames always produce
identical text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .frame import WorldFrame
from .geom import CartesianPose, ReferencePath, to_frenet

ORIENTATION_PHRASES = (
    "{W} in the same direction as the ego vehicle",
    "{W} in the opposite direction of the ego vehicle",
    "{W} towards the ego vehicle's planned trajectory",
    "{W} away from the ego vehicle's planned trajectory",
)


@dataclass(frozen=True)
class EncoderConfig:
    alpha: float = 0.06              # rad; near-parallel orientation band
    beta: float = 3.08               # rad; near-opposite orientation band
    gamma: float = 1.0               # m; lateral band for towards/away
    lon_lat_threshold: float = 1.0   # m; ahead/behind and left/right band
    moving_speed_threshold: float = 0.01  # m/s
    orientation_phrases: tuple = ORIENTATION_PHRASES
    attention_radius: float = 50.0   # m; agents beyond this are omitted

    def __post_init__(self):
        if not 0 < self.alpha < self.beta < math.pi:
            raise ValueError("need 0 < alpha < beta < pi")
        if self.gamma <= 0 or self.lon_lat_threshold <= 0:
            raise ValueError("thresholds must be positive")


@dataclass(frozen=True)
class AgentDescription:
    agent_id: str
    text: str


def _fmt(value: float, places: int) -> str:
    """Fixed-width decimal rendering with half-up (away from zero) ties."""
    q = Decimal(1).scaleb(-places)
    d = Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)  # never render "-0.0"
    return str(d)


def describe_longitudinal(s: float, threshold: float = 1.0) -> str:
    """Ahead / behind / parallel phrase for a relative station."""
    if s > threshold:
        return f"{_fmt(s, 1)} meters ahead"
    if s < -threshold:
        return f"{_fmt(abs(s), 1)} meters behind"
    return "parallel with the ego"


def describe_lateral(d: float, threshold: float = 1.0) -> str:
    """Left / right / in-line phrase for a lateral offset."""
    if d > threshold:
        return f"{_fmt(d, 1)} meters left"
    if d < -threshold:
        return f"{_fmt(abs(d), 1)} meters right"
    return "directly in line with the ego"


def normalize_orientation(theta: float) -> float:
    """Wrap a relative heading into [-pi, pi) with a non-negative modulus."""
    return (theta + math.pi) % (2.0 * math.pi) - math.pi


def describe_orientation(o_norm: float, d: float, speed: float,
                         cfg: EncoderConfig | None = None) -> str:
    """Orientation phrase from the normalized relative heading.

    The lateral offset decides between "towards" and "away" for oblique
    headings; agents slower than the moving threshold "face" rather than
    "move".
    """
    cfg = cfg or EncoderConfig()
    w = "moving" if speed >= cfg.moving_speed_threshold else "facing"
    phrases = cfg.orientation_phrases
    if -cfg.alpha <= o_norm <= cfg.alpha:
        phrase = phrases[0]
    elif o_norm <= -cfg.beta or o_norm >= cfg.beta:
        phrase = phrases[1]
    elif d >= cfg.gamma and -cfg.beta <= o_norm <= -cfg.alpha:
        phrase = phrases[2]
    elif d <= -cfg.gamma and cfg.alpha <= o_norm <= cfg.beta:
        phrase = phrases[2]
    else:
        phrase = phrases[3]
    return phrase.format(W=w)


def render_block(agent_id: str, s: float, d: float, o_norm: float,
                 speed: float, width: float, length: float,
                 cfg: EncoderConfig | None = None) -> str:
    cfg = cfg or EncoderConfig()
    lon = describe_longitudinal(s, cfg.lon_lat_threshold)
    lat = describe_lateral(d, cfg.lon_lat_threshold)
    orient = describe_orientation(o_norm, d, speed, cfg)
    return (f"ID: {agent_id}\n"
            f"Position: ({_fmt(s, 1)}, {_fmt(d, 1)}) meters ({lon}, {lat})\n"
            f"Size: Width: {_fmt(width, 1)} m, Length: {_fmt(length, 1)} m\n"
            f"Speed: {_fmt(speed, 1)} m/s\n"
            f"Orientation: {_fmt(o_norm, 2)} rad ({orient})")


def encode_scene(frame: WorldFrame, path: ReferencePath,
                 cfg: EncoderConfig | None = None) -> list:
    """Describe every agent within the attention radius.

    Blocks are ordered by ascending |station| with the agent id as the
    tie-break; an empty scene yields an empty list.
    """
    cfg = cfg or EncoderConfig()
    ego_fp = to_frenet(path, CartesianPose(frame.ego_x, frame.ego_y,
                                           frame.ego_theta), ego_s=0.0)
    entries = []
    for ag in frame.agents:
        if math.hypot(ag.x - frame.ego_x, ag.y - frame.ego_y) > cfg.attention_radius:
            continue
        fp = to_frenet(path, CartesianPose(ag.x, ag.y, ag.theta),
                       ego_s=ego_fp.s)
        o_norm = normalize_orientation(fp.theta_fren)
        text = render_block(ag.agent_id, fp.s, fp.d, o_norm, ag.speed,
                            ag.width, ag.length, cfg)
        entries.append((abs(fp.s), ag.agent_id, text))
    entries.sort(key=lambda e: (e[0], e[1]))
    return [AgentDescription(agent_id=aid, text=text)
            for _, aid, text in entries]

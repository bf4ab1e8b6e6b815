"""Frenet-frame geometry: reference paths, Cartesian<->Frenet conversion and
oriented-box collision primitives.

Paths are piecewise-linear polylines. Tangent headings are interpolated
linearly (on the circle) between per-vertex tangents, which makes the
Frenet mapping continuous across vertices; the exact inverse is recovered
by a bracketed root solve, so Cartesian->Frenet->Cartesian round-trips to
solver precision for any pose closer to the path than its local turning
radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidPath, OutOfRange

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Wrap an angle (scalar or array) into [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class CartesianPose:
    """Pose in the scenario's local Cartesian frame."""

    x: float
    y: float
    theta_cart: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)
                and math.isfinite(self.theta_cart)):
            raise ValueError(f"non-finite pose: {self}")


@dataclass(frozen=True)
class FrenetPose:
    """Pose relative to a reference path.

    s: arc length along the path, relative to the ego station.
    d: signed lateral offset, positive left of the travel direction.
    theta_fren: heading relative to the path tangent.
    """

    s: float
    d: float
    theta_fren: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and math.isfinite(self.d)
                and math.isfinite(self.theta_fren)):
            raise ValueError(f"non-finite Frenet pose: {self}")


@dataclass(frozen=True)
class OrientedBox:
    """Axis-oriented rectangle footprint: length along heading, width across."""

    center: CartesianPose
    width: float
    length: float

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise ValueError(
                f"box dimensions must be positive, got {self.width}x{self.length}")

    def corners(self):
        return kernels.box_corners(self.center.x, self.center.y,
                                   self.center.theta_cart,
                                   self.width, self.length)


class ReferencePath:
    """Arc-length-parameterized polyline.

    Attributes:
        points: (N, 2) vertex array.
        cumulative_arclength: (N,) strictly increasing, starts at 0.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise InvalidPath(f"need at least 2 (x, y) points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidPath("path contains non-finite coordinates")
        deltas = np.diff(pts, axis=0)
        seg_len = np.hypot(deltas[:, 0], deltas[:, 1])
        if np.any(seg_len <= 0.0):
            raise InvalidPath("consecutive path points must be distinct")

        self.points = pts
        self.cumulative_arclength = np.concatenate(([0.0], np.cumsum(seg_len)))
        self._seg_len = seg_len
        self._seg_dir = deltas / seg_len[:, None]
        seg_heading = np.arctan2(deltas[:, 1], deltas[:, 0])
        self._seg_heading = seg_heading
        # per-vertex tangents: circular mean of adjacent segment headings
        psi = np.empty(pts.shape[0])
        psi[0] = seg_heading[0]
        psi[-1] = seg_heading[-1]
        if pts.shape[0] > 2:
            psi[1:-1] = seg_heading[:-1] + 0.5 * wrap_angle(
                seg_heading[1:] - seg_heading[:-1])
        self._vertex_tangent = psi
        self._tangent_turn = wrap_angle(psi[1:] - psi[:-1])

    @property
    def total_length(self) -> float:
        return float(self.cumulative_arclength[-1])

    def _locate(self, s):
        """Segment index and within-segment fraction for arc lengths `s`."""
        idx = np.searchsorted(self.cumulative_arclength, s, side="right") - 1
        idx = np.clip(idx, 0, len(self._seg_len) - 1)
        u = (s - self.cumulative_arclength[idx]) / self._seg_len[idx]
        return idx, u

    def points_at(self, s):
        """Polyline point(s) at arc length `s` (clamped to the extent)."""
        s = np.clip(np.asarray(s, dtype=np.float64), 0.0, self.total_length)
        idx, _ = self._locate(s)
        ds = s - self.cumulative_arclength[idx]
        return self.points[idx] + ds[..., None] * self._seg_dir[idx]

    def tangents_at(self, s):
        """Interpolated tangent heading(s) at arc length `s`."""
        s = np.clip(np.asarray(s, dtype=np.float64), 0.0, self.total_length)
        idx, u = self._locate(s)
        return self._vertex_tangent[idx] + u * self._tangent_turn[idx]

    def frenet_to_xy(self, s, d):
        """Vectorized Frenet -> Cartesian for (s, d) arrays (absolute s)."""
        s = np.asarray(s, dtype=np.float64)
        d = np.asarray(d, dtype=np.float64)
        base = self.points_at(s)
        theta_t = self.tangents_at(s)
        x = base[..., 0] - d * np.sin(theta_t)
        y = base[..., 1] + d * np.cos(theta_t)
        return x, y, theta_t

    def project_xy(self, xs, ys):
        """Coarse (nearest-segment) projection of many points.

        Returns (s, d) with absolute arc length; exact to the polyline but
        without the tangent-interpolation refinement used by `to_frenet`.
        """
        s, d, _ = kernels.project_points(
            self.points[:, 0], self.points[:, 1],
            self.cumulative_arclength, xs, ys)
        return s, d

    def smoothed(self, iterations: int = 2) -> "ReferencePath":
        """Chaikin corner-cut smoothing; optional, not used by default."""
        pts = self.points
        for _ in range(iterations):
            q = 0.75 * pts[:-1] + 0.25 * pts[1:]
            r = 0.25 * pts[:-1] + 0.75 * pts[1:]
            mid = np.empty((2 * len(q), 2))
            mid[0::2] = q
            mid[1::2] = r
            pts = np.vstack([pts[:1], mid, pts[-1:]])
        keep = np.concatenate(([True], np.hypot(*np.diff(pts, axis=0).T) > 1e-9))
        return ReferencePath(pts[keep])


def _normal_residual(path: ReferencePath, px: float, py: float, s: float) -> float:
    """Along-tangent residual of (px, py) at station s; zero at the foot."""
    idx, u = path._locate(np.float64(s))
    base = path.points[idx] + (s - path.cumulative_arclength[idx]) * path._seg_dir[idx]
    theta_t = path._vertex_tangent[idx] + u * path._tangent_turn[idx]
    return ((px - base[0]) * math.cos(theta_t)
            + (py - base[1]) * math.sin(theta_t))


def _refine_station(path: ReferencePath, px: float, py: float, seg: int) -> float:
    """Solve for the station whose interpolated normal passes through (px, py).

    Starts from the coarse nearest-segment window and expands until the
    residual brackets zero; clamps to a path endpoint when the pose lies
    beyond it.
    """
    cum = path.cumulative_arclength
    n_seg = len(path._seg_len)
    lo_i = max(seg - 1, 0)
    hi_i = min(seg + 2, n_seg)
    lo, hi = float(cum[lo_i]), float(cum[hi_i])
    g_lo = _normal_residual(path, px, py, lo)
    g_hi = _normal_residual(path, px, py, hi)
    while g_lo <= 0.0 and lo_i > 0:
        lo_i = max(lo_i - 2, 0)
        lo = float(cum[lo_i])
        g_lo = _normal_residual(path, px, py, lo)
    while g_hi >= 0.0 and hi_i < n_seg:
        hi_i = min(hi_i + 2, n_seg)
        hi = float(cum[hi_i])
        g_hi = _normal_residual(path, px, py, hi)
    if g_lo <= 0.0:
        return 0.0
    if g_hi >= 0.0:
        return path.total_length
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-12:
            break
        if _normal_residual(path, px, py, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def to_frenet(path: ReferencePath, pose: CartesianPose, ego_s: float = 0.0) -> FrenetPose:
    """Convert a Cartesian pose to Frenet coordinates relative to `ego_s`.

    The returned station is measured from the ego's own station, so the ego
    itself maps to s = 0. Ties in the coarse nearest-segment search resolve
    to the smallest arc length.
    """
    s_coarse, _, seg = kernels.project_points(
        path.points[:, 0], path.points[:, 1], path.cumulative_arclength,
        pose.x, pose.y)
    s_abs = _refine_station(path, pose.x, pose.y, int(seg[0]))
    idx, u = path._locate(np.float64(s_abs))
    base = (path.points[idx]
            + (s_abs - path.cumulative_arclength[idx]) * path._seg_dir[idx])
    theta_t = path._vertex_tangent[idx] + u * path._tangent_turn[idx]
    d = (-(pose.x - base[0]) * math.sin(theta_t)
         + (pose.y - base[1]) * math.cos(theta_t))
    return FrenetPose(s=float(s_abs - ego_s), d=float(d),
                      theta_fren=float(pose.theta_cart - theta_t))


def to_cartesian(path: ReferencePath, fp: FrenetPose, ego_s: float = 0.0) -> CartesianPose:
    """Convert a Frenet pose back to the Cartesian frame.

    Raises OutOfRange when ego_s + fp.s falls outside the path extent.
    """
    s_abs = ego_s + fp.s
    if s_abs < -1e-9 or s_abs > path.total_length + 1e-9:
        raise OutOfRange(
            f"station {s_abs:.6f} outside path extent [0, {path.total_length:.6f}]")
    s_abs = min(max(s_abs, 0.0), path.total_length)
    idx, u = path._locate(np.float64(s_abs))
    base = (path.points[idx]
            + (s_abs - path.cumulative_arclength[idx]) * path._seg_dir[idx])
    theta_t = path._vertex_tangent[idx] + u * path._tangent_turn[idx]
    return CartesianPose(
        x=float(base[0] - fp.d * math.sin(theta_t)),
        y=float(base[1] + fp.d * math.cos(theta_t)),
        theta_cart=float(fp.theta_fren + theta_t),
    )


def boxes_collide(a: OrientedBox, b: OrientedBox) -> bool:
    """True iff two oriented boxes overlap; touching edges collide."""
    return kernels.boxes_overlap(
        a.center.x, a.center.y, a.center.theta_cart, a.width, a.length,
        b.center.x, b.center.y, b.center.theta_cart, b.width, b.length)


def box_clearance(a: OrientedBox, b: OrientedBox) -> float:
    """Euclidean clearance between two boxes, 0 when they overlap."""
    return kernels.box_distance(
        a.center.x, a.center.y, a.center.theta_cart, a.width, a.length,
        b.center.x, b.center.y, b.center.theta_cart, b.width, b.length)

"""Pure-Python (numpy) geometry kernels.

Reference implementation of the hot inner loops: polyline projection,
oriented-rectangle overlap (separating axis test) and rectangle-rectangle
clearance. `dualad.kernels` exposes either this module or the compiled
`_core` extension with the identical signatures.
"""

import numpy as np

BACKEND = "python"


def project_points(path_x, path_y, cumlen, px, py):
    """Project probe points onto a polyline, nearest-segment-first.

    Args:
        path_x, path_y: polyline vertices, shape (N,).
        cumlen: cumulative arc length per vertex, shape (N,), cumlen[0] = 0.
        px, py: probe point coordinates, shape (P,).

    Returns:
        (s, d, seg): arc length of the foot point, signed lateral offset
        (positive left of the segment direction) and segment index, each
        shape (P,). Exact distance ties resolve to the smallest arc length.
    """
    path_x = np.asarray(path_x, dtype=np.float64)
    path_y = np.asarray(path_y, dtype=np.float64)
    cumlen = np.asarray(cumlen, dtype=np.float64)
    px = np.atleast_1d(np.asarray(px, dtype=np.float64))
    py = np.atleast_1d(np.asarray(py, dtype=np.float64))

    ax, ay = path_x[:-1], path_y[:-1]          # segment starts, (M,)
    dx = path_x[1:] - ax
    dy = path_y[1:] - ay
    seg_len2 = dx * dx + dy * dy

    # (M, P) parameter of the perpendicular foot, clamped to the segment
    rx = px[None, :] - ax[:, None]
    ry = py[None, :] - ay[:, None]
    t = (rx * dx[:, None] + ry * dy[:, None]) / seg_len2[:, None]
    np.clip(t, 0.0, 1.0, out=t)

    fx = rx - t * dx[:, None]
    fy = ry - t * dy[:, None]
    dist2 = fx * fx + fy * fy

    seg = np.argmin(dist2, axis=0)             # first minimum = smallest s
    p_idx = np.arange(px.shape[0])
    t_best = t[seg, p_idx]
    seg_len = np.sqrt(seg_len2)
    s = cumlen[seg] + t_best * seg_len[seg]

    cross = dx[seg] * fy[seg, p_idx] - dy[seg] * fx[seg, p_idx]
    dist = np.sqrt(dist2[seg, p_idx])
    d = np.where(cross >= 0.0, dist, -dist)
    return s, d, seg


def box_corners(cx, cy, theta, width, length):
    """Corners of an oriented rectangle, counter-clockwise, shape (4, 2).

    `length` extends along the heading, `width` across it.
    """
    c, s = np.cos(theta), np.sin(theta)
    hl, hw = 0.5 * length, 0.5 * width
    ux, uy = c * hl, s * hl
    vx, vy = -s * hw, c * hw
    return np.array([
        [cx + ux + vx, cy + uy + vy],
        [cx - ux + vx, cy - uy + vy],
        [cx - ux - vx, cy - uy - vy],
        [cx + ux - vx, cy + uy - vy],
    ])


def boxes_overlap(ax, ay, atheta, aw, al, bx, by, btheta, bw, bl):
    """Separating-axis overlap test for two oriented rectangles.

    Touching edges count as overlap. Only the four edge normals need
    checking for rectangles.
    """
    ca, sa = np.cos(atheta), np.sin(atheta)
    cb, sb = np.cos(btheta), np.sin(btheta)
    # unit axes: heading and lateral for each box
    axes = ((ca, sa), (-sa, ca), (cb, sb), (-sb, cb))
    half = ((0.5 * al, 0.5 * aw), (0.5 * bl, 0.5 * bw))
    tx, ty = bx - ax, by - ay
    for nx, ny in axes:
        ra = half[0][0] * abs(nx * ca + ny * sa) + half[0][1] * abs(-nx * sa + ny * ca)
        rb = half[1][0] * abs(nx * cb + ny * sb) + half[1][1] * abs(-nx * sb + ny * cb)
        if abs(nx * tx + ny * ty) > ra + rb:
            return False
    return True


def _point_segment_dist2(px, py, x1, y1, x2, y2):
    """Squared distance from points to segments, elementwise (broadcasts)."""
    dx, dy = x2 - x1, y2 - y1
    len2 = dx * dx + dy * dy
    len2 = np.where(len2 > 0.0, len2, 1.0)
    t = np.clip(((px - x1) * dx + (py - y1) * dy) / len2, 0.0, 1.0)
    fx = x1 + t * dx - px
    fy = y1 + t * dy - py
    return fx * fx + fy * fy


def box_distance(ax, ay, atheta, aw, al, bx, by, btheta, bw, bl):
    """Euclidean clearance between two oriented rectangles (0 if they overlap).

    For disjoint convex polygons the minimum distance is attained between a
    vertex of one and an edge of the other, so checking all 4x4 vertex-edge
    pairs in both directions is exact.
    """
    if boxes_overlap(ax, ay, atheta, aw, al, bx, by, btheta, bw, bl):
        return 0.0
    pa = box_corners(ax, ay, atheta, aw, al)
    pb = box_corners(bx, by, btheta, bw, bl)
    best = np.inf
    for corners, other in ((pa, pb), (pb, pa)):
        e1 = other
        e2 = np.roll(other, -1, axis=0)
        d2 = _point_segment_dist2(
            corners[:, 0:1], corners[:, 1:2],
            e1[None, :, 0], e1[None, :, 1], e2[None, :, 0], e2[None, :, 1])
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def sweep_box_distances(exs, eys, eths, ew, el, axs, ays, aths, aw, al):
    """Per-step clearance between two box tracks of equal length.

    Args:
        exs, eys, eths: first track centers/headings, shape (T,).
        ew, el: first box width/length (constant).
        axs, ays, aths: second track, shape (T,).
        aw, al: second box width/length (constant).

    Returns:
        distances, shape (T,): clearance per step, 0 where the boxes overlap.
    """
    exs = np.asarray(exs, dtype=np.float64)
    eys = np.asarray(eys, dtype=np.float64)
    eths = np.asarray(eths, dtype=np.float64)
    axs = np.asarray(axs, dtype=np.float64)
    ays = np.asarray(ays, dtype=np.float64)
    aths = np.asarray(aths, dtype=np.float64)
    T = exs.shape[0]

    ca, sa = np.cos(eths), np.sin(eths)
    cb, sb = np.cos(aths), np.sin(aths)
    tx, ty = axs - exs, ays - eys

    # SAT per step over the 4 edge normals
    overlap = np.ones(T, dtype=bool)
    hla, hwa = 0.5 * el, 0.5 * ew
    hlb, hwb = 0.5 * al, 0.5 * aw
    for nx, ny in ((ca, sa), (-sa, ca), (cb, sb), (-sb, cb)):
        ra = hla * np.abs(nx * ca + ny * sa) + hwa * np.abs(-nx * sa + ny * ca)
        rb = hlb * np.abs(nx * cb + ny * sb) + hwb * np.abs(-nx * sb + ny * cb)
        overlap &= np.abs(nx * tx + ny * ty) <= ra + rb

    corners_a = _corner_tracks(exs, eys, ca, sa, ew, el)     # (T, 4, 2)
    corners_b = _corner_tracks(axs, ays, cb, sb, aw, al)

    d2 = np.full(T, np.inf)
    for pts, poly in ((corners_a, corners_b), (corners_b, corners_a)):
        e1 = poly
        e2 = np.roll(poly, -1, axis=1)
        # (T, 4 points, 4 edges)
        dd = _point_segment_dist2(
            pts[:, :, 0:1], pts[:, :, 1:2],
            e1[:, None, :, 0], e1[:, None, :, 1],
            e2[:, None, :, 0], e2[:, None, :, 1])
        d2 = np.minimum(d2, dd.min(axis=(1, 2)))

    out = np.sqrt(d2)
    out[overlap] = 0.0
    return out


def _corner_tracks(cx, cy, c, s, width, length):
    hl, hw = 0.5 * length, 0.5 * width
    ux, uy = c * hl, s * hl
    vx, vy = -s * hw, c * hw
    corners = np.empty((cx.shape[0], 4, 2))
    corners[:, 0, 0] = cx + ux + vx
    corners[:, 0, 1] = cy + uy + vy
    corners[:, 1, 0] = cx - ux + vx
    corners[:, 1, 1] = cy - uy + vy
    corners[:, 2, 0] = cx - ux - vx
    corners[:, 2, 1] = cy - uy - vy
    corners[:, 3, 0] = cx + ux - vx
    corners[:, 3, 1] = cy + uy - vy
    return corners

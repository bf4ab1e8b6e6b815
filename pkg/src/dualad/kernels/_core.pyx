# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels: same contracts as `dualad.kernels._ref`."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin, sqrt, INFINITY

cnp.import_array()

BACKEND = "compiled"


def project_points(path_x, path_y, cumlen, px, py):
    """Project probe points onto a polyline; see `_ref.project_points`."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] X = np.ascontiguousarray(path_x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] Y = np.ascontiguousarray(path_y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] L = np.ascontiguousarray(cumlen, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] PX = np.atleast_1d(np.ascontiguousarray(px, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] PY = np.atleast_1d(np.ascontiguousarray(py, dtype=np.float64))

    cdef Py_ssize_t n_seg = X.shape[0] - 1
    cdef Py_ssize_t n_pts = PX.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_s = np.empty(n_pts)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_d = np.empty(n_pts)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_seg = np.empty(n_pts, dtype=np.int64)

    cdef Py_ssize_t i, j, best_j
    cdef double ax, ay, dx, dy, len2, rx, ry, t, fx, fy, dist2
    cdef double best_d2, best_t, cross, dist, qx, qy

    for i in range(n_pts):
        qx = PX[i]
        qy = PY[i]
        best_d2 = INFINITY
        best_j = 0
        best_t = 0.0
        for j in range(n_seg):
            ax = X[j]
            ay = Y[j]
            dx = X[j + 1] - ax
            dy = Y[j + 1] - ay
            len2 = dx * dx + dy * dy
            rx = qx - ax
            ry = qy - ay
            t = (rx * dx + ry * dy) / len2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            fx = rx - t * dx
            fy = ry - t * dy
            dist2 = fx * fx + fy * fy
            if dist2 < best_d2:
                best_d2 = dist2
                best_j = j
                best_t = t
        ax = X[best_j]
        ay = Y[best_j]
        dx = X[best_j + 1] - ax
        dy = Y[best_j + 1] - ay
        out_s[i] = L[best_j] + best_t * sqrt(dx * dx + dy * dy)
        fx = (qx - ax) - best_t * dx
        fy = (qy - ay) - best_t * dy
        cross = dx * fy - dy * fx
        dist = sqrt(best_d2)
        out_d[i] = dist if cross >= 0.0 else -dist
        out_seg[i] = best_j
    return out_s, out_d, out_seg


cdef inline bint _overlap(double ax, double ay, double ca, double sa,
                          double hwa, double hla,
                          double bx, double by, double cb, double sb,
                          double hwb, double hlb) nogil:
    cdef double tx = bx - ax
    cdef double ty = by - ay
    cdef double nx, ny, ra, rb
    cdef int k
    for k in range(4):
        if k == 0:
            nx = ca; ny = sa
        elif k == 1:
            nx = -sa; ny = ca
        elif k == 2:
            nx = cb; ny = sb
        else:
            nx = -sb; ny = cb
        ra = hla * fabs(nx * ca + ny * sa) + hwa * fabs(-nx * sa + ny * ca)
        rb = hlb * fabs(nx * cb + ny * sb) + hwb * fabs(-nx * sb + ny * cb)
        if fabs(nx * tx + ny * ty) > ra + rb:
            return False
    return True


cdef inline void _corners(double cx, double cy, double c, double s,
                          double hw, double hl,
                          double* xs, double* ys) nogil:
    cdef double ux = c * hl
    cdef double uy = s * hl
    cdef double vx = -s * hw
    cdef double vy = c * hw
    xs[0] = cx + ux + vx; ys[0] = cy + uy + vy
    xs[1] = cx - ux + vx; ys[1] = cy - uy + vy
    xs[2] = cx - ux - vx; ys[2] = cy - uy - vy
    xs[3] = cx + ux - vx; ys[3] = cy + uy - vy


cdef inline double _pt_seg_d2(double px, double py, double x1, double y1,
                              double x2, double y2) nogil:
    cdef double dx = x2 - x1
    cdef double dy = y2 - y1
    cdef double len2 = dx * dx + dy * dy
    cdef double t
    if len2 <= 0.0:
        len2 = 1.0
    t = ((px - x1) * dx + (py - y1) * dy) / len2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = x1 + t * dx - px
    dy = y1 + t * dy - py
    return dx * dx + dy * dy


cdef double _box_dist(double ax, double ay, double atheta, double aw, double al,
                      double bx, double by, double btheta, double bw, double bl) nogil:
    cdef double ca = cos(atheta)
    cdef double sa = sin(atheta)
    cdef double cb = cos(btheta)
    cdef double sb = sin(btheta)
    cdef double hwa = 0.5 * aw, hla = 0.5 * al
    cdef double hwb = 0.5 * bw, hlb = 0.5 * bl
    if _overlap(ax, ay, ca, sa, hwa, hla, bx, by, cb, sb, hwb, hlb):
        return 0.0
    cdef double xa[4]
    cdef double ya[4]
    cdef double xb[4]
    cdef double yb[4]
    _corners(ax, ay, ca, sa, hwa, hla, xa, ya)
    _corners(bx, by, cb, sb, hwb, hlb, xb, yb)
    cdef double best = INFINITY
    cdef double d2
    cdef int i, j, jn
    for i in range(4):
        for j in range(4):
            jn = (j + 1) & 3
            d2 = _pt_seg_d2(xa[i], ya[i], xb[j], yb[j], xb[jn], yb[jn])
            if d2 < best:
                best = d2
            d2 = _pt_seg_d2(xb[i], yb[i], xa[j], ya[j], xa[jn], ya[jn])
            if d2 < best:
                best = d2
    return sqrt(best)


def boxes_overlap(double ax, double ay, double atheta, double aw, double al,
                  double bx, double by, double btheta, double bw, double bl):
    """Separating-axis overlap test; touching counts as overlap."""
    return bool(_overlap(ax, ay, cos(atheta), sin(atheta), 0.5 * aw, 0.5 * al,
                         bx, by, cos(btheta), sin(btheta), 0.5 * bw, 0.5 * bl))


def box_distance(double ax, double ay, double atheta, double aw, double al,
                 double bx, double by, double btheta, double bw, double bl):
    """Clearance between two oriented rectangles (0 when overlapping)."""
    return _box_dist(ax, ay, atheta, aw, al, bx, by, btheta, bw, bl)


def sweep_box_distances(exs, eys, eths, double ew, double el,
                        axs, ays, aths, double aw, double al):
    """Per-step clearance between two equal-length box tracks."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] EX = np.ascontiguousarray(exs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] EY = np.ascontiguousarray(eys, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ET = np.ascontiguousarray(eths, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] AX = np.ascontiguousarray(axs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] AY = np.ascontiguousarray(ays, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] AT = np.ascontiguousarray(aths, dtype=np.float64)
    cdef Py_ssize_t n = EX.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _box_dist(EX[i], EY[i], ET[i], ew, el,
                           AX[i], AY[i], AT[i], aw, al)
    return out

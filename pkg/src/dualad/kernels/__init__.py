"""Geometry kernel dispatch.

Selects the compiled extension when available, otherwise the numpy
reference implementation. Set DUALAD_PURE_PYTHON=1 to force the fallback
(used by the parity tests and the kernel benchmark).
"""

import os

from . import _ref

if os.environ.get("DUALAD_PURE_PYTHON"):
    _impl = _ref
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

BACKEND = _impl.BACKEND
project_points = _impl.project_points
box_corners = _ref.box_corners  # cheap, numpy everywhere
boxes_overlap = _impl.boxes_overlap
box_distance = _impl.box_distance
sweep_box_distances = _impl.sweep_box_distances

__all__ = [
    "BACKEND",
    "project_points",
    "box_corners",
    "boxes_overlap",
    "box_distance",
    "sweep_box_distances",
]

"""Exception hierarchy shared across the package."""


class DualADError(Exception):
    """Base class for all package-specific errors."""


# --- geometry ---

class InvalidPath(DualADError):
    """Reference path violates its invariants (too short, duplicate points,
    non-increasing arc length)."""


class DegenerateProjection(DualADError):
    """Pose is equidistant from multiple non-adjacent path segments beyond
    tolerance. Resolved by the smallest-arc-length tie-break in practice;
    kept for completeness."""


class OutOfRange(DualADError):
    """Requested arc length lies outside the path extent."""


# --- scenario files ---

class ParseError(DualADError):
    """Scenario file is not valid JSON."""


class SchemaError(DualADError):
    """Scenario file is missing a required field or has a wrong type."""


class ValidationError(DualADError):
    """Scenario content violates an invariant (named in the message)."""


class InsufficientResults(DualADError):
    """Asked for more worst-k scenarios than results available."""


# --- planners ---

class NonPositiveGap(DualADError):
    """Car-following gap is non-positive; a collision already occurred
    upstream of the planner."""


class NoFeasibleTrajectory(DualADError):
    """No candidate trajectory is collision-free, including the fallback."""


# --- metrics ---

class IncompleteTrace(DualADError):
    """Trace is shorter than the scenario duration."""


class EmptyBenchmark(DualADError):
    """No traces to aggregate."""

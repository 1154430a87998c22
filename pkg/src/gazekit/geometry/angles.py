"""Gaze angle parameterization and the angular error metric.

Convention used everywhere in gazekit: camera looks along +z, image y points
down, and a gaze straight into the camera is (0, 0, -1). Pitch/yaw are the
polar angles of that direction:

    pitch = asin(-y),  yaw = atan2(-x, -z)
    vector = (-cos(pitch) sin(yaw), -sin(pitch), -cos(pitch) cos(yaw))

All functions accept single vectors or stacked arrays with the vector in the
trailing axis.
"""

import numpy as np

from gazekit.errors import NumericError


def pitchyaw_to_vector(pitchyaw: np.ndarray) -> np.ndarray:
    """Convert (..., 2) pitch/yaw radians to unit gaze vectors (..., 3)."""
    pitchyaw = np.asarray(pitchyaw, dtype=np.float64)
    pitch = pitchyaw[..., 0]
    yaw = pitchyaw[..., 1]
    if not np.all(np.isfinite(pitchyaw)):
        raise NumericError("pitchyaw_to_vector: non-finite angles")
    cp = np.cos(pitch)
    return np.stack([-cp * np.sin(yaw), -np.sin(pitch), -cp * np.cos(yaw)], axis=-1)


def vector_to_pitchyaw(vec: np.ndarray) -> np.ndarray:
    """Convert (..., 3) gaze vectors to (..., 2) pitch/yaw radians.

    Raises NumericError for zero-norm inputs (degenerate direction).
    """
    vec = np.asarray(vec, dtype=np.float64)
    norm = np.linalg.norm(vec, axis=-1)
    if np.any(norm == 0.0):
        raise NumericError("vector_to_pitchyaw: degenerate direction (zero norm)")
    unit = vec / norm[..., None]
    pitch = np.arcsin(np.clip(-unit[..., 1], -1.0, 1.0))
    # "+ 0.0" flushes -0.0 so a straight-up/down gaze gets yaw 0, not -pi
    yaw = np.arctan2(-unit[..., 0] + 0.0, -unit[..., 2] + 0.0)
    return np.stack([pitch, yaw], axis=-1)


def angular_error_deg(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Arc angle in degrees between gaze vectors, scale-invariant per argument."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise NumericError("angular_error_deg: zero-norm gaze vector")
    cos = np.sum(a * b, axis=-1) / (na * nb)
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


POSE_FILTER_EPS_DEG = 1e-9


def pose_filter_check(pitchyaw: np.ndarray, limit_deg: float) -> bool:
    """Keep/discard flag for a pose: keep iff the L2 norm of (pitch, yaw) in
    degrees does not exceed `limit_deg`.

    The boundary is inclusive; a 1e-9 degree slack keeps it inclusive for
    poses that round-trip through rotation matrices (roundoff there is around
    1e-13 degrees).
    """
    pitchyaw = np.asarray(pitchyaw, dtype=np.float64)
    norm_deg = float(np.hypot(np.degrees(pitchyaw[..., 0]), np.degrees(pitchyaw[..., 1])))
    return norm_deg <= limit_deg + POSE_FILTER_EPS_DEG

"""Rotation helpers: axis-angle (Rodrigues) maps and pose conventions."""

import numpy as np

from gazekit.errors import NumericError


def axis_angle_to_matrix(axis_angle: np.ndarray) -> np.ndarray:
    """Rodrigues formula: (3,) axis-angle vector (radians) to 3x3 rotation."""
    w = np.asarray(axis_angle, dtype=np.float64).reshape(3)
    theta = np.linalg.norm(w)
    if theta < 1e-12:
        k = _skew(w)
        return np.eye(3) + k  # first-order term; exact at theta = 0
    k = _skew(w / theta)
    return np.eye(3) + np.sin(theta) * k + (1.0 - np.cos(theta)) * (k @ k)


def matrix_to_axis_angle(rot: np.ndarray) -> np.ndarray:
    """Log map of a rotation matrix to its (3,) axis-angle vector."""
    rot = np.asarray(rot, dtype=np.float64)
    cos_theta = np.clip((np.trace(rot) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos_theta)
    if theta < 1e-12:
        return np.array(
            [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
        ) / 2.0
    if np.pi - theta < 1e-6:
        # Near pi the antisymmetric part vanishes; recover axis from R + I.
        m = (rot + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diagonal(m), 0.0))
        # Fix signs using the largest component.
        k = int(np.argmax(axis))
        if axis[k] == 0.0:
            raise NumericError("matrix_to_axis_angle: cannot recover axis")
        signs = np.sign(m[k, :])
        signs[signs == 0.0] = 1.0
        axis = axis * signs * np.sign(axis[k])
        axis = axis / np.linalg.norm(axis)
        return axis * theta
    axis = np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    ) / (2.0 * np.sin(theta))
    return axis * theta


def pitchyaw_to_rotation(pitch: float, yaw: float) -> np.ndarray:
    """Zero-roll head rotation whose facing direction equals
    pitchyaw_to_vector((pitch, yaw)): R = Ry(yaw) @ Rx(-pitch)."""
    cp, sp = np.cos(-pitch), np.sin(-pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    return ry @ rx


def rotation_to_pitchyaw(rot: np.ndarray) -> np.ndarray:
    """Pitch/yaw of the head facing direction R @ (0, 0, -1)."""
    from gazekit.geometry.angles import vector_to_pitchyaw

    facing = np.asarray(rot, dtype=np.float64) @ np.array([0.0, 0.0, -1.0])
    return vector_to_pitchyaw(facing)


def rotation_angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Geodesic angle (radians) between two rotation matrices."""
    rel = np.asarray(a) @ np.asarray(b).T
    return float(np.arccos(np.clip((np.trace(rel) - 1.0) / 2.0, -1.0, 1.0)))


def _skew(v: np.ndarray) -> np.ndarray:
    return np.array(
        [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
    )

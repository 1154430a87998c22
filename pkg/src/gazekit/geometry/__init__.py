"""Camera-space math: angles, rotations, normalization, warping, PnP."""

from gazekit.geometry.angles import (
    angular_error_deg,
    pitchyaw_to_vector,
    pose_filter_check,
    vector_to_pitchyaw,
)
from gazekit.geometry.normalization import (
    NORMALIZED_FOCAL_PX,
    NORMALIZED_SIZE_PX,
    STANDARD_DISTANCE_MM,
    CameraIntrinsics,
    NormalizationResult,
    build_normalization,
    default_normalized_camera,
    denormalize_gaze,
    normalize_gaze,
    normalize_headpose,
)
from gazekit.geometry.pnp import project_points, solve_pnp
from gazekit.geometry.rotation import (
    axis_angle_to_matrix,
    matrix_to_axis_angle,
    pitchyaw_to_rotation,
    rotation_angle_between,
    rotation_to_pitchyaw,
)
from gazekit.geometry.warp import warp_image

__all__ = [
    "angular_error_deg",
    "pitchyaw_to_vector",
    "pose_filter_check",
    "vector_to_pitchyaw",
    "CameraIntrinsics",
    "NormalizationResult",
    "NORMALIZED_FOCAL_PX",
    "NORMALIZED_SIZE_PX",
    "STANDARD_DISTANCE_MM",
    "build_normalization",
    "default_normalized_camera",
    "denormalize_gaze",
    "normalize_gaze",
    "normalize_headpose",
    "project_points",
    "solve_pnp",
    "axis_angle_to_matrix",
    "matrix_to_axis_angle",
    "pitchyaw_to_rotation",
    "rotation_angle_between",
    "rotation_to_pitchyaw",
    "warp_image",
]

"""Camera-space data normalization for face crops.

A virtual camera is rotated so its optical axis passes through the face
center, with the head's x-axis kept horizontal, and the face is rescaled to a
standard distance. The resulting homography re-renders the source image as if
taken by that canonical camera; gaze vectors are rotated (rotation only, no
scaling) into the same canonical frame.
"""

from dataclasses import dataclass

import numpy as np

from gazekit.errors import NumericError


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise NumericError(f"CameraIntrinsics: focal lengths must be positive, got fx={self.fx}, fy={self.fy}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @staticmethod
    def default_for_image(width: int, height: int) -> "CameraIntrinsics":
        """Fallback when the true camera is unknown: focal length equal to the
        image width, principal point at the image center."""
        return CameraIntrinsics(fx=float(width), fy=float(width), cx=width / 2.0, cy=height / 2.0)


# Conventional normalized-camera defaults for 224x224 crops. The standard
# distance and virtual intrinsics are configuration, not physics.
STANDARD_DISTANCE_MM = 600.0
NORMALIZED_FOCAL_PX = 960.0
NORMALIZED_SIZE_PX = 224


def default_normalized_camera(size_px: int = NORMALIZED_SIZE_PX, focal_px: float = NORMALIZED_FOCAL_PX) -> CameraIntrinsics:
    return CameraIntrinsics(fx=focal_px, fy=focal_px, cx=size_px / 2.0, cy=size_px / 2.0)


@dataclass(frozen=True)
class NormalizationResult:
    """Everything produced by build_normalization.

    rotation: 3x3 R aligning the camera z-axis with the face center.
    scaling: diag(1, 1, ds/d).
    conversion: S @ R.
    warp: Cn @ S @ R @ Cr^-1 homography, source pixels to normalized pixels.
    actual_distance / standard_distance: d and ds in millimeters.
    """

    rotation: np.ndarray
    scaling: np.ndarray
    conversion: np.ndarray
    warp: np.ndarray
    actual_distance: float
    standard_distance: float


def build_normalization(
    head: np.ndarray,
    face_center_cam: np.ndarray,
    cr: CameraIntrinsics,
    cn: CameraIntrinsics,
    ds: float = STANDARD_DISTANCE_MM,
) -> NormalizationResult:
    """Compute the normalizing rotation, scaling, and image warp.

    `head` is the head rotation in the source camera frame (its first column
    is the head's x-axis); `face_center_cam` is the face center in camera
    coordinates (mm).
    """
    center = np.asarray(face_center_cam, dtype=np.float64).reshape(3)
    d = float(np.linalg.norm(center))
    if d == 0.0:
        raise NumericError("build_normalization: face center at camera origin")

    z_axis = center / d
    head_x = np.asarray(head, dtype=np.float64)[:, 0]
    y_axis = np.cross(z_axis, head_x)
    ny = np.linalg.norm(y_axis)
    if ny == 0.0:
        raise NumericError("build_normalization: head x-axis parallel to view direction")
    y_axis = y_axis / ny
    x_axis = np.cross(y_axis, z_axis)
    x_axis = x_axis / np.linalg.norm(x_axis)
    rot = np.vstack([x_axis, y_axis, z_axis])

    scaling = np.diag([1.0, 1.0, ds / d])
    conversion = scaling @ rot
    warp = cn.matrix @ conversion @ np.linalg.inv(cr.matrix)
    return NormalizationResult(
        rotation=rot,
        scaling=scaling,
        conversion=conversion,
        warp=warp,
        actual_distance=d,
        standard_distance=float(ds),
    )


def normalize_gaze(gaze: np.ndarray, norm: NormalizationResult) -> np.ndarray:
    """Rotate a gaze vector into the normalized camera frame (rotation only;
    the distance scaling applies to the image, not to directions)."""
    return norm.rotation @ np.asarray(gaze, dtype=np.float64).reshape(3)


def denormalize_gaze(gaze: np.ndarray, norm: NormalizationResult) -> np.ndarray:
    """Inverse of normalize_gaze."""
    return norm.rotation.T @ np.asarray(gaze, dtype=np.float64).reshape(3)


def normalize_headpose(head: np.ndarray, norm: NormalizationResult) -> np.ndarray:
    """Head rotation expressed in the normalized camera frame: R @ head."""
    return norm.rotation @ np.asarray(head, dtype=np.float64)

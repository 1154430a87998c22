"""Perspective-n-point pose recovery: DLT initialization + Gauss-Newton.

Works on normalized image coordinates (intrinsics divided out), which keeps
the DLT system well conditioned. No RANSAC: inputs are curated landmark
correspondences, so a deterministic solver is both sufficient and testable.
"""

import numpy as np

from gazekit.errors import NumericError
from gazekit.geometry.normalization import CameraIntrinsics
from gazekit.geometry.rotation import axis_angle_to_matrix, _skew

MIN_POINTS = 6
MAX_GN_ITERS = 50
GN_STEP_TOL = 1e-10


def project_points(
    model: np.ndarray, rotation: np.ndarray, translation: np.ndarray, cam: CameraIntrinsics
) -> np.ndarray:
    """Pinhole projection of (N, 3) model points under (R, t):
    u = fx X/Z + cx, v = fy Y/Z + cy."""
    pts = np.asarray(model, dtype=np.float64) @ np.asarray(rotation).T + np.asarray(
        translation, dtype=np.float64
    ).reshape(1, 3)
    z = pts[:, 2]
    if np.any(z <= 0.0):
        raise NumericError("project_points: point at or behind the camera plane")
    return np.stack([cam.fx * pts[:, 0] / z + cam.cx, cam.fy * pts[:, 1] / z + cam.cy], axis=1)


def solve_pnp(model: np.ndarray, image: np.ndarray, cam: CameraIntrinsics):
    """Recover (rotation, translation) from 2D-3D correspondences.

    Requires >= 6 non-coplanar model points. Returns the pose minimizing the
    reprojection error, found by DLT followed by Gauss-Newton refinement.
    """
    model = np.asarray(model, dtype=np.float64)
    image = np.asarray(image, dtype=np.float64)
    if model.ndim != 2 or model.shape[1] != 3 or image.ndim != 2 or image.shape[1] != 2:
        raise NumericError(
            f"solve_pnp: expected (N,3) model and (N,2) image points, got {model.shape} and {image.shape}"
        )
    n = model.shape[0]
    if n != image.shape[0]:
        raise NumericError(f"solve_pnp: point count mismatch ({n} vs {image.shape[0]})")
    if n < MIN_POINTS:
        raise NumericError(f"solve_pnp: need at least {MIN_POINTS} correspondences, got {n}")

    centered = model - model.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[2] < 1e-9 * max(sv[0], 1.0):
        raise NumericError("solve_pnp: degenerate configuration (coplanar model points)")

    uv = _to_normalized(image, cam)
    rot, trans = _dlt(model, uv)
    rot, trans = _gauss_newton(model, uv, rot, trans)
    return rot, trans


def _to_normalized(image: np.ndarray, cam: CameraIntrinsics) -> np.ndarray:
    return np.stack([(image[:, 0] - cam.cx) / cam.fx, (image[:, 1] - cam.cy) / cam.fy], axis=1)


def _dlt(model: np.ndarray, uv: np.ndarray):
    n = model.shape[0]
    xh = np.hstack([model, np.ones((n, 1))])
    a = np.zeros((2 * n, 12))
    a[0::2, 0:4] = xh
    a[0::2, 8:12] = -uv[:, 0:1] * xh
    a[1::2, 4:8] = xh
    a[1::2, 8:12] = -uv[:, 1:2] * xh

    _, s, vt = np.linalg.svd(a)
    if s[10] < 1e-12 * max(s[0], 1.0):
        raise NumericError("solve_pnp: degenerate configuration (rank-deficient DLT system)")
    p = vt[-1].reshape(3, 4)
    m = p[:, :3]
    if np.linalg.det(m) < 0:
        p = -p
        m = p[:, :3]
    u, sv, vt2 = np.linalg.svd(m)
    rot = u @ vt2
    if np.linalg.det(rot) < 0:
        rot = -rot
    scale = sv.mean()
    trans = p[:, 3] / scale
    return rot, trans


def _gauss_newton(model: np.ndarray, uv: np.ndarray, rot: np.ndarray, trans: np.ndarray):
    n = model.shape[0]
    for _ in range(MAX_GN_ITERS):
        pts = model @ rot.T + trans.reshape(1, 3)
        z = pts[:, 2]
        if np.any(np.abs(z) < 1e-12):
            raise NumericError("solve_pnp: point on the camera plane during refinement")
        proj = pts[:, :2] / z[:, None]
        residual = (proj - uv).reshape(-1)

        jac = np.zeros((2 * n, 6))
        for i in range(n):
            x, y, zz = pts[i]
            # d(projection)/d(camera point)
            j_proj = np.array([[1.0 / zz, 0.0, -x / zz**2], [0.0, 1.0 / zz, -y / zz**2]])
            # left-multiplied rotation increment: d(exp(w)p)/dw = -[p]x
            j_rot = -_skew(pts[i])
            jac[2 * i : 2 * i + 2, 0:3] = j_proj @ j_rot
            jac[2 * i : 2 * i + 2, 3:6] = j_proj

        jtj = jac.T @ jac
        jtr = jac.T @ residual
        try:
            step = np.linalg.solve(jtj, -jtr)
        except np.linalg.LinAlgError as exc:
            raise NumericError("solve_pnp: normal equations singular") from exc
        rot = axis_angle_to_matrix(step[0:3]) @ rot
        trans = trans + step[3:6]
        if np.linalg.norm(step) < GN_STEP_TOL:
            break
    return rot, trans

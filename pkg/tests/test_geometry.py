"""Angle conversions, normalization geometry, and pose filtering."""

import numpy as np
import pytest

from gazekit.errors import NumericError
from gazekit.geometry import (
    CameraIntrinsics,
    angular_error_deg,
    build_normalization,
    denormalize_gaze,
    normalize_gaze,
    normalize_headpose,
    pitchyaw_to_rotation,
    pitchyaw_to_vector,
    pose_filter_check,
    rotation_to_pitchyaw,
    vector_to_pitchyaw,
)


def random_rotation(rng):
    # QR of a Gaussian matrix, sign-fixed to det +1
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diagonal(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


class TestPitchYaw:
    def test_zero_angles_forward(self):
        np.testing.assert_allclose(pitchyaw_to_vector(np.array([0.0, 0.0])), [0.0, 0.0, -1.0], atol=1e-15)

    def test_quarter_yaw(self):
        np.testing.assert_allclose(pitchyaw_to_vector(np.array([0.0, np.pi / 2])), [-1.0, 0.0, 0.0], atol=1e-15)

    def test_forward_to_zero(self):
        np.testing.assert_allclose(vector_to_pitchyaw(np.array([0.0, 0.0, -1.0])), [0.0, 0.0], atol=1e-15)

    def test_straight_up(self):
        np.testing.assert_allclose(vector_to_pitchyaw(np.array([0.0, -1.0, 0.0])), [np.pi / 2, 0.0], atol=1e-12)

    def test_closed_form_yaw(self):
        # (-1/2, 0, -sqrt(3)/2) has pitch 0 and yaw atan2(1/2, sqrt(3)/2) = pi/6
        got = vector_to_pitchyaw(np.array([-0.5, 0.0, -np.sqrt(3) / 2]))
        np.testing.assert_allclose(got, [0.0, np.pi / 6], atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        ang = np.stack(
            [rng.uniform(-np.pi / 2 + 1e-3, np.pi / 2 - 1e-3, 1000), rng.uniform(-np.pi, np.pi, 1000)],
            axis=1,
        )
        back = vector_to_pitchyaw(pitchyaw_to_vector(ang))
        np.testing.assert_allclose(back, ang, atol=1e-9)

    def test_unit_norm(self):
        rng = np.random.default_rng(8)
        ang = rng.uniform(-1.0, 1.0, size=(100, 2))
        v = pitchyaw_to_vector(ang)
        np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(NumericError, match="degenerate"):
            vector_to_pitchyaw(np.zeros(3))


class TestAngularError:
    def test_identical(self):
        assert angular_error_deg(np.array([0.0, 0, -1]), np.array([0.0, 0, -1])) == 0.0

    def test_orthogonal(self):
        assert angular_error_deg(np.array([0.0, 0, -1]), np.array([-1.0, 0, 0])) == pytest.approx(90.0)

    def test_antipodal(self):
        g = np.array([0.3, -0.4, -0.5])
        assert angular_error_deg(g, -g) == pytest.approx(180.0)

    def test_symmetry_and_scale_invariance(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        assert angular_error_deg(a, b) == pytest.approx(angular_error_deg(b, a), abs=1e-12)
        assert angular_error_deg(5.0 * a, b) == pytest.approx(angular_error_deg(a, b), abs=1e-12)

    def test_zero_norm_rejected(self):
        with pytest.raises(NumericError):
            angular_error_deg(np.zeros(3), np.array([0.0, 0, -1]))


class TestBuildNormalization:
    CR = CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0)
    CN = CameraIntrinsics(fx=960.0, fy=960.0, cx=112.0, cy=112.0)

    def test_already_normalized_pose(self):
        n = build_normalization(np.eye(3), np.array([0.0, 0.0, 600.0]), self.CR, self.CN, ds=600.0)
        np.testing.assert_allclose(n.rotation, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(n.scaling, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(n.warp, self.CN.matrix @ np.linalg.inv(self.CR.matrix), atol=1e-12)

    def test_double_distance_halves_scale(self):
        n = build_normalization(np.eye(3), np.array([0.0, 0.0, 1200.0]), self.CR, self.CN, ds=600.0)
        np.testing.assert_allclose(np.diagonal(n.scaling), [1.0, 1.0, 0.5], atol=1e-12)

    def test_face_center_maps_to_principal_point(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            head = random_rotation(rng)
            center = rng.uniform(-300, 300, size=3)
            center[2] = rng.uniform(400, 900)
            n = build_normalization(head, center, self.CR, self.CN, ds=600.0)
            # project with the source camera, then move through the warp
            uv = self.CR.matrix @ (center / center[2])
            mapped = n.warp @ uv
            mapped = mapped[:2] / mapped[2]
            np.testing.assert_allclose(mapped, [self.CN.cx, self.CN.cy], atol=1e-6)

    def test_rotation_orthonormal_and_z_toward_face(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            head = random_rotation(rng)
            center = rng.uniform(-200, 200, size=3)
            center[2] = rng.uniform(300, 900)
            n = build_normalization(head, center, self.CR, self.CN)
            np.testing.assert_allclose(n.rotation @ n.rotation.T, np.eye(3), atol=1e-9)
            np.testing.assert_allclose(n.rotation[2], center / np.linalg.norm(center), atol=1e-9)

    def test_origin_rejected(self):
        with pytest.raises(NumericError):
            build_normalization(np.eye(3), np.zeros(3), self.CR, self.CN)


class TestGazeNormalization:
    CR = CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0)
    CN = CameraIntrinsics(fx=960.0, fy=960.0, cx=112.0, cy=112.0)

    def _norm(self, seed):
        rng = np.random.default_rng(seed)
        head = random_rotation(rng)
        center = np.array([rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(400, 800)])
        return build_normalization(head, center, self.CR, self.CN)

    def test_identity_rotation_leaves_gaze(self):
        n = build_normalization(np.eye(3), np.array([0.0, 0.0, 600.0]), self.CR, self.CN)
        g = np.array([0.1, -0.2, -0.97])
        np.testing.assert_allclose(normalize_gaze(g, n), g, atol=1e-12)

    def test_matches_matrix_product(self):
        n = self._norm(21)
        g = pitchyaw_to_vector(np.array([0.2, -0.4]))
        np.testing.assert_allclose(normalize_gaze(g, n), n.rotation @ g, atol=0)

    def test_round_trip(self):
        rng = np.random.default_rng(22)
        for seed in range(50):
            n = self._norm(seed)
            g = pitchyaw_to_vector(rng.uniform(-1, 1, size=2))
            np.testing.assert_allclose(denormalize_gaze(normalize_gaze(g, n), n), g, atol=1e-12)
            assert abs(np.linalg.norm(normalize_gaze(g, n)) - 1.0) < 1e-12

    def test_headpose_stays_orthonormal(self):
        rng = np.random.default_rng(23)
        n = self._norm(30)
        head = random_rotation(rng)
        out = normalize_headpose(head, n)
        np.testing.assert_allclose(out @ out.T, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(out, n.rotation @ head, atol=0)


class TestPoseFilter:
    def test_frontal_kept(self):
        assert pose_filter_check(np.array([0.0, 0.0]), 80.0)

    def test_6060_discarded(self):
        # norm = sqrt(60^2 + 60^2) = 84.85 deg
        assert not pose_filter_check(np.radians([60.0, 60.0]), 80.0)

    def test_boundary_inclusive(self):
        assert pose_filter_check(np.radians([80.0, 0.0]), 80.0)


class TestHeadRotationHelpers:
    def test_facing_matches_pitchyaw(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            p, y = rng.uniform(-1.2, 1.2), rng.uniform(-1.5, 1.5)
            rot = pitchyaw_to_rotation(p, y)
            np.testing.assert_allclose(rot @ rot.T, np.eye(3), atol=1e-12)
            np.testing.assert_allclose(
                rot @ np.array([0.0, 0.0, -1.0]), pitchyaw_to_vector(np.array([p, y])), atol=1e-12
            )
            np.testing.assert_allclose(rotation_to_pitchyaw(rot), [p, y], atol=1e-9)

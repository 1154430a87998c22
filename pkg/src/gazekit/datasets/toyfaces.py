"""Procedural toy face generator with exact gaze labels.

Renders a face as shaded ellipses: the head, two eyes whose placement follows
the head pose, pupils offset linearly in the eye-in-head angle (gaze minus
head pose), and a mouth. Labels are exact by construction and the pupil
placement formula is invertible, which gives the tests an inverse-render
oracle. Named "domains" vary background, lighting, noise, blur, and pose
ranges to emulate dataset shift at desk scale.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gazekit import _accel
from gazekit.datasets.manifest import DatasetManifest, SampleRecord
from gazekit.errors import DataError
from gazekit.geometry import CameraIntrinsics
from gazekit.geometry.rotation import matrix_to_axis_angle, pitchyaw_to_rotation

# largest eye-in-head angle (radians) the pupil gain maps onto the eye radius
EYE_IN_HEAD_MAX = 0.7


@dataclass(frozen=True)
class ToyDomainSpec:
    """Appearance and label-range knobs for one synthetic dataset."""

    name: str
    background: tuple = (0.35, 0.35, 0.35)
    skin: tuple = (0.80, 0.62, 0.50)
    lighting: float = 1.0
    noise_sigma: float = 0.015
    blur_radius: int = 0
    head_range_deg: float = 25.0
    eye_in_head_deg: float = 30.0
    texture_amp: float = 0.20
    texture_wavelength_px: tuple = (5.0, 9.0)
    # randomize wave direction/wavelength/phase per sample; a fixed texture
    # makes backgrounds positionally predictable (easy smoke-test corpora)
    texture_jitter: bool = True


DEFAULT_DOMAINS = (
    ToyDomainSpec(name="plain"),
    ToyDomainSpec(
        name="warm", background=(0.55, 0.34, 0.18), skin=(0.85, 0.60, 0.45),
        lighting=1.12, head_range_deg=30.0, texture_amp=0.15,
    ),
    ToyDomainSpec(
        name="cool", background=(0.18, 0.30, 0.55), skin=(0.72, 0.60, 0.55),
        lighting=0.88, head_range_deg=35.0, eye_in_head_deg=35.0, texture_amp=0.3,
        texture_wavelength_px=(7.0, 12.0),
    ),
    ToyDomainSpec(
        name="dim", background=(0.12, 0.12, 0.16), skin=(0.78, 0.64, 0.52),
        lighting=0.55, noise_sigma=0.025, head_range_deg=25.0, texture_amp=0.4,
    ),
    ToyDomainSpec(
        name="noisy", background=(0.42, 0.44, 0.38), skin=(0.82, 0.58, 0.46),
        lighting=1.0, noise_sigma=0.06, blur_radius=1, head_range_deg=20.0,
        texture_amp=0.25, texture_wavelength_px=(4.0, 7.0),
    ),
)


def pupil_offset(gaze_pitchyaw, head_pitchyaw, gain_x: float, gain_y: float):
    """Pixel offset of the pupil from the eye center for a gaze direction.
    Linear in the eye-in-head angle, so it inverts exactly."""
    dx = gain_x * (gaze_pitchyaw[1] - head_pitchyaw[1])
    dy = -gain_y * (gaze_pitchyaw[0] - head_pitchyaw[0])
    return dx, dy


def gaze_from_pupil_offset(offset, head_pitchyaw, gain_x: float, gain_y: float):
    """Inverse of pupil_offset: recover (pitch, yaw) from the pupil shift."""
    yaw = head_pitchyaw[1] + offset[0] / gain_x
    pitch = head_pitchyaw[0] - offset[1] / gain_y
    return pitch, yaw


def render_toy_face(domain: ToyDomainSpec, image_size: int, rng) -> tuple:
    """Render one face; returns (image [0,1], labels dict, geometry dict)."""
    s = float(image_size)
    head_range = math.radians(domain.head_range_deg)
    eih_range = math.radians(domain.eye_in_head_deg)

    fcx = s / 2.0 + rng.uniform(-s / 16.0, s / 16.0)
    fcy = s / 2.0 + rng.uniform(-s / 16.0, s / 16.0)
    frx = s * rng.uniform(0.33, 0.40)
    fry = s * rng.uniform(0.37, 0.44)

    head_pitch = rng.uniform(-head_range, head_range)
    head_yaw = rng.uniform(-head_range, head_range)
    gaze_pitch = head_pitch + rng.uniform(-eih_range, eih_range)
    gaze_yaw = head_yaw + rng.uniform(-eih_range, eih_range)

    dxh = 0.30 * frx * math.sin(head_yaw)
    dyh = -0.30 * fry * math.sin(head_pitch)
    sep = 0.42 * frx * math.cos(head_yaw)
    eye_y = fcy + dyh - 0.18 * fry
    # eyes are deliberately oversized so pupil shifts stay visible at 32 px
    eye_rx = 0.30 * frx * rng.uniform(0.9, 1.1)
    eye_ry = 0.24 * fry * rng.uniform(0.9, 1.1)
    gain_x = 0.62 * eye_rx / EYE_IN_HEAD_MAX
    gain_y = 0.62 * eye_ry / EYE_IN_HEAD_MAX

    off_x, off_y = pupil_offset((gaze_pitch, gaze_yaw), (head_pitch, head_yaw), gain_x, gain_y)
    left = (fcx + dxh - sep, eye_y)
    right = (fcx + dxh + sep, eye_y)
    pupil_rad = 0.40 * min(eye_rx, eye_ry)

    if domain.texture_jitter:
        theta = rng.uniform(0.0, math.pi)
        wavelength = rng.uniform(*domain.texture_wavelength_px)
        phase = rng.uniform(0.0, 2.0 * math.pi)
    else:
        theta = 0.5
        wavelength = sum(domain.texture_wavelength_px) / 2.0
        phase = 0.0
    freq = 2.0 * math.pi / wavelength

    geom = np.array(
        [
            fcx, fcy, frx, fry,
            left[0], left[1], right[0], right[1],
            eye_rx, eye_ry,
            left[0] + off_x, left[1] + off_y, right[0] + off_x, right[1] + off_y,
            pupil_rad,
            fcx + 1.2 * dxh, fcy + 0.45 * fry + 1.1 * dyh,
            0.28 * frx, 0.07 * fry,
            0.35, domain.lighting,
            freq * math.cos(theta), freq * math.sin(theta), phase, domain.texture_amp,
        ]
    )
    colors = np.array(
        [domain.background, domain.skin, (0.95, 0.95, 0.93), (0.06, 0.05, 0.05)]
    )
    img = _accel.render_face(image_size, image_size, geom, colors)
    if domain.blur_radius > 0:
        img = _accel.box_blur(img, domain.blur_radius)
    if domain.noise_sigma > 0:
        img = img + rng.normal(0.0, domain.noise_sigma, size=img.shape)
    img = np.clip(img, 0.0, 1.0)

    labels = {
        "gaze": (gaze_pitch, gaze_yaw),
        "head_pitchyaw": (head_pitch, head_yaw),
        "face_px": (fcx, fcy),
    }
    geometry = {
        "gain_x": gain_x,
        "gain_y": gain_y,
        "pupil_offset": (off_x, off_y),
        "eye_centers": (left, right),
    }
    return img, labels, geometry


def toy_face_generate(
    domain: ToyDomainSpec,
    n: int,
    seed: int,
    image_size: int = 32,
    distance_mm: float = 600.0,
    n_subjects: int = 25,
):
    """Generate n samples of one toy domain.

    Returns (manifest, images, geometries): images as an (n, S, S, 3) float
    array in [0, 1]; geometries carry the per-sample pupil gains for the
    inverse-render oracle. Deterministic for a given seed.
    """
    if n < 1:
        raise DataError(f"toy_face_generate: n must be >= 1, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x70F]))
    cam = CameraIntrinsics.default_for_image(image_size, image_size)
    images = np.empty((n, image_size, image_size, 3), dtype=np.float64)
    records = []
    geometries = []
    for i in range(n):
        img, labels, geometry = render_toy_face(domain, image_size, rng)
        images[i] = img
        geometries.append(geometry)
        head_rot = pitchyaw_to_rotation(*labels["head_pitchyaw"])
        z = distance_mm * (1.0 + rng.uniform(-0.12, 0.12))
        fcx, fcy = labels["face_px"]
        center = ((fcx - cam.cx) / cam.fx * z, (fcy - cam.cy) / cam.fy * z, z)
        records.append(
            SampleRecord(
                dataset_id=domain.name,
                subject_id=f"id{i % n_subjects:03d}",
                frame_index=i,
                camera_id="cam0",
                image_path=f"{domain.name}/{i:06d}.png",
                intrinsics=cam,
                head_axis_angle=tuple(matrix_to_axis_angle(head_rot)),
                face_center_cam=center,
                gaze=labels["gaze"],
                split="unsplit",
            )
        )
    manifest = DatasetManifest(
        name=domain.name,
        records=records,
        provenance=[f"toy_face_generate(domain={domain.name}, n={n}, seed={seed})"],
    )
    return manifest, images, geometries


def write_toy_dataset(out_dir, domain: ToyDomainSpec, n_train: int, n_test: int, seed: int, image_size: int = 32):
    """Render a train/test split of one domain to PNG files plus a manifest.
    Returns the manifest (with split tags and paths relative to out_dir)."""
    from gazekit.datasets.images import save_png

    out_dir = Path(out_dir)
    manifest, images, _ = toy_face_generate(domain, n_train + n_test, seed, image_size=image_size)
    records = []
    for i, rec in enumerate(manifest.records):
        split = "train" if i < n_train else "test"
        records.append(
            SampleRecord(
                **{
                    **rec.__dict__,
                    "split": split,
                }
            )
        )
        save_png(images[i], out_dir / rec.image_path)
    tagged = DatasetManifest(
        name=manifest.name,
        records=records,
        provenance=manifest.provenance + [f"split(train={n_train}, test={n_test})"],
    )
    return tagged

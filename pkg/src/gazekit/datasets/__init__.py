"""Manifests, curation, augmentation, toy-face synthesis, and batching."""

from gazekit.datasets.batching import batch_iterator, sample_rng
from gazekit.datasets.curation import (
    camera_subset_select,
    every_k_sampler,
    per_identity_cap,
    pose_filter,
)
from gazekit.datasets.images import ImageStore, load_png, save_png
from gazekit.datasets.jitter import JitterSpec, apply_color_factors, color_jitter, to_grayscale
from gazekit.datasets.manifest import (
    FORMAT_VERSION,
    DatasetManifest,
    SampleRecord,
    load_manifest,
    write_manifest,
)
from gazekit.datasets.toyfaces import (
    DEFAULT_DOMAINS,
    ToyDomainSpec,
    gaze_from_pupil_offset,
    pupil_offset,
    render_toy_face,
    toy_face_generate,
    write_toy_dataset,
)

__all__ = [
    "DEFAULT_DOMAINS",
    "DatasetManifest",
    "FORMAT_VERSION",
    "ImageStore",
    "JitterSpec",
    "SampleRecord",
    "ToyDomainSpec",
    "apply_color_factors",
    "batch_iterator",
    "camera_subset_select",
    "color_jitter",
    "every_k_sampler",
    "gaze_from_pupil_offset",
    "load_manifest",
    "load_png",
    "per_identity_cap",
    "pose_filter",
    "pupil_offset",
    "render_toy_face",
    "sample_rng",
    "save_png",
    "to_grayscale",
    "toy_face_generate",
    "write_manifest",
    "write_toy_dataset",
]

"""Manifest curation: frame subsampling, identity caps, camera subsets,
head-pose filtering. Every operation returns a new manifest whose records are
a subset of the input, with a provenance note appended."""

import zlib

import numpy as np

from gazekit.errors import DataError
from gazekit.datasets.manifest import DatasetManifest
from gazekit.geometry import pose_filter_check
from gazekit.geometry.rotation import rotation_to_pitchyaw


def _stable_int(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def every_k_sampler(manifest: DatasetManifest, k: int) -> DatasetManifest:
    """Keep records whose frame_index is a multiple of k, per (subject,
    camera) stream."""
    if k < 1:
        raise DataError(f"every_k_sampler: k must be >= 1, got {k}")
    kept = [r for r in manifest.records if r.frame_index % k == 0]
    return manifest.derive(kept, f"every_k(k={k})")


def per_identity_cap(manifest: DatasetManifest, cap: int, seed: int) -> DatasetManifest:
    """Uniform random subset of at most `cap` records per subject, keeping
    the original record order, deterministic for a given seed."""
    if cap < 1:
        raise DataError(f"per_identity_cap: cap must be >= 1, got {cap}")
    by_subject = {}
    for idx, rec in enumerate(manifest.records):
        by_subject.setdefault(rec.subject_id, []).append(idx)
    keep = set()
    for subject in sorted(by_subject):
        idxs = by_subject[subject]
        if len(idxs) <= cap:
            keep.update(idxs)
        else:
            rng = np.random.default_rng(np.random.SeedSequence([seed, _stable_int(subject)]))
            chosen = rng.choice(len(idxs), size=cap, replace=False)
            keep.update(idxs[j] for j in chosen)
    kept = [rec for idx, rec in enumerate(manifest.records) if idx in keep]
    return manifest.derive(kept, f"per_identity_cap(cap={cap}, seed={seed})")


def camera_subset_select(manifest: DatasetManifest, n_cameras: int, seed: int) -> DatasetManifest:
    """Choose n camera ids uniformly once for the dataset and keep only their
    records."""
    cameras = sorted({r.camera_id for r in manifest.records})
    if n_cameras > len(cameras):
        raise DataError(
            f"camera_subset_select: asked for {n_cameras} cameras, dataset has {len(cameras)}"
        )
    rng = np.random.default_rng(seed)
    chosen = set(np.array(cameras)[rng.choice(len(cameras), size=n_cameras, replace=False)].tolist())
    kept = [r for r in manifest.records if r.camera_id in chosen]
    return manifest.derive(kept, f"camera_subset(n={n_cameras}, seed={seed})")


def pose_filter(manifest: DatasetManifest, limit_deg: float) -> DatasetManifest:
    """Drop records whose head-pose pitch/yaw L2 norm exceeds limit_deg."""
    kept = []
    for rec in manifest.records:
        pitchyaw = rotation_to_pitchyaw(rec.head_rotation())
        if pose_filter_check(pitchyaw, limit_deg):
            kept.append(rec)
    return manifest.derive(kept, f"pose_filter(limit_deg={limit_deg})")

"""Line-delimited manifest files describing labeled face samples.

Format: one JSON object per line. The first line is a header carrying the
format name, schema version, dataset name, and provenance notes; every other
line is one sample record. Keys are written sorted so rewriting a manifest is
byte-stable.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from gazekit.errors import DataError
from gazekit.geometry import CameraIntrinsics, axis_angle_to_matrix

FORMAT_NAME = "gazekit-manifest"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class SampleRecord:
    """One labeled face sample. Pose and gaze fields are optional because
    raw manifests may carry only landmarks until PnP fills the pose in."""

    dataset_id: str
    subject_id: str
    frame_index: int
    camera_id: str
    image_path: str
    intrinsics: Optional[CameraIntrinsics] = None
    head_axis_angle: Optional[tuple] = None
    face_center_cam: Optional[tuple] = None
    gaze: Optional[tuple] = None
    split: str = "unsplit"
    landmarks2d: Optional[tuple] = None

    @property
    def key(self):
        return (self.dataset_id, self.subject_id, self.frame_index, self.camera_id)

    def head_rotation(self) -> np.ndarray:
        if self.head_axis_angle is None:
            raise DataError(f"record {self.key}: head pose missing")
        return axis_angle_to_matrix(np.array(self.head_axis_angle))

    def require_gaze(self) -> np.ndarray:
        if self.gaze is None:
            raise DataError(f"record {self.key}: gaze label missing")
        return np.array(self.gaze, dtype=np.float64)


@dataclass
class DatasetManifest:
    """Named, ordered collection of sample records with unique keys."""

    name: str
    records: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        seen = {}
        for i, rec in enumerate(self.records):
            if rec.key in seen:
                raise DataError(f"manifest {self.name!r}: duplicate key {rec.key} (records {seen[rec.key]} and {i})")
            seen[rec.key] = i

    def __len__(self):
        return len(self.records)

    def keys(self):
        return [r.key for r in self.records]

    def derive(self, records, note: str) -> "DatasetManifest":
        return DatasetManifest(name=self.name, records=list(records), provenance=self.provenance + [note])

    def with_split(self, split: str) -> "DatasetManifest":
        kept = [r for r in self.records if r.split == split]
        return self.derive(kept, f"split={split}")


def _record_to_obj(rec: SampleRecord) -> dict:
    obj = {
        "dataset": rec.dataset_id,
        "subject": rec.subject_id,
        "frame": rec.frame_index,
        "camera": rec.camera_id,
        "image": rec.image_path,
        "split": rec.split,
    }
    if rec.intrinsics is not None:
        obj["fx"], obj["fy"] = rec.intrinsics.fx, rec.intrinsics.fy
        obj["cx"], obj["cy"] = rec.intrinsics.cx, rec.intrinsics.cy
    if rec.head_axis_angle is not None:
        obj["head"] = list(rec.head_axis_angle)
    if rec.face_center_cam is not None:
        obj["center"] = list(rec.face_center_cam)
    if rec.gaze is not None:
        obj["gaze"] = list(rec.gaze)
    if rec.landmarks2d is not None:
        obj["landmarks"] = [list(p) for p in rec.landmarks2d]
    return obj


def _record_from_obj(obj: dict, line_no: int) -> SampleRecord:
    try:
        intrinsics = None
        if "fx" in obj:
            intrinsics = CameraIntrinsics(fx=obj["fx"], fy=obj["fy"], cx=obj["cx"], cy=obj["cy"])
        return SampleRecord(
            dataset_id=obj["dataset"],
            subject_id=obj["subject"],
            frame_index=int(obj["frame"]),
            camera_id=obj["camera"],
            image_path=obj["image"],
            intrinsics=intrinsics,
            head_axis_angle=tuple(obj["head"]) if "head" in obj else None,
            face_center_cam=tuple(obj["center"]) if "center" in obj else None,
            gaze=tuple(obj["gaze"]) if "gaze" in obj else None,
            split=obj.get("split", "unsplit"),
            landmarks2d=tuple(tuple(p) for p in obj["landmarks"]) if "landmarks" in obj else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"manifest line {line_no}: bad record field: {exc}") from exc


def write_manifest(manifest: DatasetManifest, path) -> None:
    path = Path(path)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "name": manifest.name,
        "provenance": manifest.provenance,
    }
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in manifest.records:
            fh.write(json.dumps(_record_to_obj(rec), sort_keys=True) + "\n")


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise DataError(f"manifest not found: {path}")
    records = []
    keys = {}
    name = path.stem
    provenance = []
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 0
    if lines:
        try:
            first = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise DataError(f"manifest line 1: not valid JSON: {exc}") from exc
        if isinstance(first, dict) and first.get("format") == FORMAT_NAME:
            if first.get("version") != FORMAT_VERSION:
                raise DataError(
                    f"manifest {path}: version {first.get('version')} unsupported (expected {FORMAT_VERSION})"
                )
            name = first.get("name", name)
            provenance = list(first.get("provenance", []))
            start = 1
    for idx in range(start, len(lines)):
        line = lines[idx].strip()
        if not line:
            continue
        line_no = idx + 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"manifest line {line_no}: not valid JSON: {exc}") from exc
        rec = _record_from_obj(obj, line_no)
        if rec.key in keys:
            raise DataError(
                f"manifest {path}: duplicate key {rec.key} on lines {keys[rec.key]} and {line_no}"
            )
        keys[rec.key] = line_no
        records.append(rec)
    return DatasetManifest(name=name, records=records, provenance=provenance)

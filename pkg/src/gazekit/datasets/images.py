"""PNG image I/O and the in-memory image store used by training loops."""

from pathlib import Path

import numpy as np
from PIL import Image

from gazekit.errors import DataError


def save_png(img: np.ndarray, path) -> None:
    """Write a [0, 1] float image as 8-bit RGB PNG (deterministic bytes)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.clip(np.asarray(img), 0.0, 1.0)
    Image.fromarray((arr * 255.0 + 0.5).astype(np.uint8), mode="RGB").save(path, format="PNG")


def load_png(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"image not found: {path}")
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


class ImageStore:
    """Maps sample records to [0, 1] float images.

    Backed either by a root directory of PNGs (paths are record.image_path
    relative to the root) or by an in-memory dict keyed by record key; loads
    are cached.
    """

    def __init__(self, root=None, arrays=None):
        if (root is None) == (arrays is None):
            raise DataError("ImageStore: exactly one of root or arrays is required")
        self.root = Path(root) if root is not None else None
        self.arrays = arrays
        self._cache = {}

    def load(self, record) -> np.ndarray:
        key = record.key
        if key in self._cache:
            return self._cache[key]
        if self.arrays is not None:
            if key not in self.arrays:
                raise DataError(f"ImageStore: no array for record {key}")
            img = np.asarray(self.arrays[key], dtype=np.float64)
        else:
            img = load_png(self.root / record.image_path)
        self._cache[key] = img
        return img

    @staticmethod
    def from_images(manifest, images) -> "ImageStore":
        if len(manifest.records) != len(images):
            raise DataError("ImageStore.from_images: record/image count mismatch")
        return ImageStore(arrays={r.key: images[i] for i, r in enumerate(manifest.records)})

"""Color jitter and grayscale augmentation on [0, 1] float images."""

from dataclasses import dataclass

import numpy as np

from gazekit import _accel
from gazekit.errors import DataError

# Rec.601 luma weights, used for grayscale and saturation.
LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class JitterSpec:
    """Parameter ranges for color jitter, matching common training defaults:
    factors are drawn uniformly, hue is a fraction of the full HSV circle."""

    brightness: tuple = (0.7, 1.3)
    contrast: tuple = (0.4, 1.8)
    saturation: tuple = (0.8, 1.2)
    hue: tuple = (-0.15, 0.15)
    jitter_prob: float = 0.5
    grayscale_prob: float = 0.05

    def __post_init__(self):
        for name in ("brightness", "contrast", "saturation", "hue"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise DataError(f"JitterSpec: {name} range {lo}..{hi} not ordered")
        for name in ("jitter_prob", "grayscale_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DataError(f"JitterSpec: {name}={p} outside [0, 1]")


def to_grayscale(img: np.ndarray) -> np.ndarray:
    luma = img @ LUMA
    return np.repeat(luma[..., None], 3, axis=-1)


def apply_color_factors(img: np.ndarray, brightness: float, contrast: float, saturation: float, hue: float) -> np.ndarray:
    """Apply the four jitter factors in a fixed order: brightness, contrast,
    saturation, then an HSV hue rotation with wraparound."""
    out = img * brightness
    mean_luma = float(np.mean(out @ LUMA))
    out = (out - mean_luma) * contrast + mean_luma
    luma = (out @ LUMA)[..., None]
    out = (out - luma) * saturation + luma
    if hue != 0.0:
        hsv = _accel.rgb_to_hsv(np.clip(out, 0.0, 1.0))
        hsv[..., 0] = (hsv[..., 0] + hue) % 1.0
        out = _accel.hsv_to_rgb(hsv)
    return np.clip(out, 0.0, 1.0)


def color_jitter(img: np.ndarray, spec: JitterSpec, rng) -> np.ndarray:
    """Randomized jitter: with probability jitter_prob draw and apply the four
    factors, then independently convert to grayscale with grayscale_prob.
    `rng` is a numpy Generator (or an integer seed)."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    img = np.asarray(img, dtype=np.float64)
    out = img
    if rng.random() < spec.jitter_prob:
        b = rng.uniform(*spec.brightness)
        c = rng.uniform(*spec.contrast)
        s = rng.uniform(*spec.saturation)
        h = rng.uniform(*spec.hue)
        out = apply_color_factors(out, b, c, s, h)
    if rng.random() < spec.grayscale_prob:
        out = to_grayscale(out)
    return np.clip(out, 0.0, 1.0)

"""Random patch masking for masked-autoencoder pre-training."""

from dataclasses import dataclass

import numpy as np

from gazekit.errors import NumericError


@dataclass(frozen=True)
class MaskPlan:
    """Partition of patch indices into masked and visible sets."""

    masked_ids: np.ndarray
    visible_ids: np.ndarray
    ratio: float

    @property
    def n_patches(self) -> int:
        return len(self.masked_ids) + len(self.visible_ids)


def mask_count(n_patches: int, ratio: float) -> int:
    """|M| = round(N * ratio), half away from zero."""
    return int(np.floor(n_patches * ratio + 0.5))


def sample_mask(n_patches: int, ratio: float, rng_seed: int) -> MaskPlan:
    """Uniform random subset of round(N * ratio) masked patches, deterministic
    for a given seed. Index arrays come back sorted."""
    if not 0.0 < ratio < 1.0:
        raise NumericError(f"sample_mask: ratio must be in (0, 1), got {ratio}")
    k = mask_count(n_patches, ratio)
    perm = np.random.default_rng(rng_seed).permutation(n_patches)
    return MaskPlan(
        masked_ids=np.sort(perm[:k]),
        visible_ids=np.sort(perm[k:]),
        ratio=float(ratio),
    )

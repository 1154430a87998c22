"""ViT encoder, masked-autoencoder decoder, gaze head, and their losses."""

from gazekit.model.losses import gaze_loss, mae_loss
from gazekit.model.masking import MaskPlan, mask_count, sample_mask
from gazekit.model.network import (
    ModelConfig,
    decoder_forward,
    encoder_forward,
    gaze_forward,
    init_params,
    mae_forward,
    sincos_position_table,
)
from gazekit.model.patches import (
    PATCH_NORM_EPS,
    PatchGrid,
    patchify,
    per_patch_normalize,
    unpatchify,
)

__all__ = [
    "MaskPlan",
    "ModelConfig",
    "PATCH_NORM_EPS",
    "PatchGrid",
    "decoder_forward",
    "encoder_forward",
    "gaze_forward",
    "gaze_loss",
    "init_params",
    "mae_forward",
    "mae_loss",
    "mask_count",
    "patchify",
    "per_patch_normalize",
    "sample_mask",
    "sincos_position_table",
    "unpatchify",
]

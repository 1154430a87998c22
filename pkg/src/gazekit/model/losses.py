"""Training objectives: masked reconstruction and L1 gaze regression."""

import numpy as np

from gazekit.autodiff import Tensor, constant
from gazekit.autodiff import ops as O
from gazekit.errors import NumericError, ShapeError
from gazekit.model.masking import MaskPlan
from gazekit.model.patches import per_patch_normalize


def mae_loss(pred: Tensor, target_patches: np.ndarray, plan: MaskPlan, pixel_norm: bool) -> Tensor:
    """Mean over masked patches of the mean squared element error.

    Visible rows never touch the value. Targets are standardized per patch
    when pixel_norm is set.
    """
    if len(plan.masked_ids) == 0:
        raise NumericError("mae_loss: empty masked set")
    target = np.asarray(target_patches, dtype=np.float64)
    if target.ndim == 2:
        target = target[None]
    if pred.data.ndim != 3 or pred.shape[1:] != target.shape[1:] or pred.shape[0] != target.shape[0]:
        raise ShapeError(f"mae_loss: prediction {pred.shape} does not match targets {target.shape}")
    if pixel_norm:
        target = per_patch_normalize(target)

    pred_masked = O.gather_rows(O.transpose(pred, (1, 0, 2)), plan.masked_ids)
    target_masked = constant(target.transpose(1, 0, 2)[plan.masked_ids].astype(pred.dtype))
    diff = O.add(pred_masked, O.scalar_mul(target_masked, -1.0))
    return O.mean(O.square(diff))


def gaze_loss(pred: Tensor, labels: np.ndarray) -> Tensor:
    """L1 distance on the (pitch, yaw) vector, averaged over the batch."""
    labels = np.asarray(labels, dtype=np.float64)
    if labels.ndim == 1:
        labels = labels[None]
    pred2 = pred if pred.data.ndim == 2 else O.reshape(pred, (1, pred.shape[0]))
    if pred2.shape != labels.shape:
        raise ShapeError(f"gaze_loss: prediction {pred2.shape} does not match labels {labels.shape}")
    diff = O.add(pred2, O.scalar_mul(constant(labels.astype(pred.dtype)), -1.0))
    return O.scalar_mul(O.sum(O.abs_val(diff)), 1.0 / labels.shape[0])

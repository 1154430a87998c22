"""Pre-training and fine-tuning loops.

Both loops are deterministic functions of (seed, config, data): batch order,
augmentation draws, and mask plans all derive from the run seed through named
SeedSequence streams, and reference precision (float64) makes reruns
bit-identical.
"""

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from gazekit.autodiff import Tensor, dtype_for_mode, grads_for, zero_grad
from gazekit.datasets import JitterSpec, batch_iterator, color_jitter, sample_rng
from gazekit.errors import DataError, NumericError
from gazekit.geometry import angular_error_deg, pitchyaw_to_vector
from gazekit.model import (
    ModelConfig,
    gaze_forward,
    gaze_loss,
    init_params,
    mae_forward,
    mae_loss,
    patchify,
    sample_mask,
)
from gazekit.training.checkpoint import Checkpoint, save_checkpoint
from gazekit.training.optim import clip_grad_norm, init_optim_state
from gazekit.training.optim import adam_step as _adam_step
from gazekit.training.schedule import ScheduleSpec, lr_at

TRAIN_MODES = ("pretrain", "finetune")


@dataclass
class TrainRunConfig:
    """Everything one training run needs besides the data itself."""

    mode: str
    model: ModelConfig = field(default_factory=ModelConfig)
    seed: int = 0
    epochs: int = 10
    batch_size: int = 64
    max_steps: Optional[int] = None
    precision: str = "fast"
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    decoupled_decay: bool = True
    grad_clip: Optional[float] = None
    flip_prob: float = 0.0
    jitter: Optional[JitterSpec] = None
    pixel_norm: bool = True
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.mode not in TRAIN_MODES:
            raise DataError(f"TrainRunConfig: mode must be one of {TRAIN_MODES}, got {self.mode!r}")
        if self.batch_size < 1:
            raise DataError(f"TrainRunConfig: batch_size must be >= 1, got {self.batch_size}")


def pretrain_config(**overrides) -> TrainRunConfig:
    """Masked-autoencoder defaults: flip + color jitter augmentation, decoupled
    weight decay 0.05, one-cycle peaking at 1.5e-4."""
    base = dict(
        mode="pretrain",
        epochs=40,
        weight_decay=0.05,
        flip_prob=0.5,
        jitter=JitterSpec(),
        schedule=ScheduleSpec(kind="one_cycle", max_lr=1.5e-4),
    )
    base.update(overrides)
    return TrainRunConfig(**base)


def finetune_config(**overrides) -> TrainRunConfig:
    """Gaze regression defaults: no augmentation, weight decay 1e-6,
    one-cycle peaking at 1e-4."""
    base = dict(
        mode="finetune",
        epochs=10,
        weight_decay=1e-6,
        flip_prob=0.0,
        jitter=None,
        schedule=ScheduleSpec(kind="one_cycle", max_lr=1e-4),
    )
    base.update(overrides)
    return TrainRunConfig(**base)


def augment_image(img: np.ndarray, cfg: TrainRunConfig, rng) -> np.ndarray:
    out = img
    if cfg.flip_prob > 0.0 and rng.random() < cfg.flip_prob:
        out = out[:, ::-1, :].copy()
    if cfg.jitter is not None:
        out = color_jitter(out, cfg.jitter, rng)
    return out


def _mask_seed(seed: int, step: int) -> int:
    return int(np.random.SeedSequence([seed, 0x3A5C, step]).generate_state(1)[0])


def _resolve_schedule(spec: ScheduleSpec, total_steps: int, steps_per_epoch: int) -> ScheduleSpec:
    updates = {}
    if spec.total_steps <= 0:
        updates["total_steps"] = total_steps
    if spec.kind == "step_decay" and spec.steps_per_epoch <= 1:
        updates["steps_per_epoch"] = steps_per_epoch
    return replace(spec, **updates) if updates else spec


def _total_steps(cfg: TrainRunConfig, n_records: int):
    steps_per_epoch = math.ceil(n_records / cfg.batch_size)
    total = cfg.epochs * steps_per_epoch
    if cfg.max_steps is not None:
        total = min(total, cfg.max_steps)
    return total, steps_per_epoch


def _batch_images(batch, store, cfg: TrainRunConfig, epoch: int, dtype):
    imgs = [augment_image(store.load(r), cfg, sample_rng(cfg.seed, epoch, r)) for r in batch]
    return np.stack(imgs).astype(dtype)


def _save_periodic(out_dir, ckpt, step):
    save_checkpoint(ckpt, Path(out_dir) / f"checkpoint_step{step:06d}.bin")


def pretrain_loop(cfg: TrainRunConfig, manifest, store, out_dir=None):
    """Masked-autoencoder pre-training; needs images only.

    Returns (checkpoint, trace) where trace rows are (step, lr, loss).
    """
    if cfg.mode != "pretrain":
        raise DataError(f"pretrain_loop: config mode is {cfg.mode!r}")
    if len(manifest.records) == 0:
        raise DataError("pretrain_loop: empty dataset")
    dtype = dtype_for_mode(cfg.precision)
    grid = cfg.model.grid
    params = init_params(cfg.model, cfg.seed, dtype=dtype)
    state = init_optim_state(
        params, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay, cfg.decoupled_decay
    )
    total, steps_per_epoch = _total_steps(cfg, len(manifest.records))
    spec = _resolve_schedule(cfg.schedule, total, steps_per_epoch)

    trace = []
    step = 0
    for epoch in range(cfg.epochs):
        if step >= total:
            break
        for batch in batch_iterator(manifest, cfg.batch_size, cfg.seed, epoch):
            if step >= total:
                break
            images = _batch_images(batch, store, cfg, epoch, dtype)
            patches = patchify(images, grid)
            plan = sample_mask(grid.n_patches, cfg.model.mask_ratio, _mask_seed(cfg.seed, step))
            zero_grad(params)
            pred = mae_forward(params, cfg.model, patches, plan)
            loss = mae_loss(pred, patches, plan, cfg.pixel_norm)
            loss_val = float(loss.data)
            if not np.isfinite(loss_val):
                raise NumericError(f"pretrain_loop: non-finite loss at step {step}")
            grads = grads_for(loss, params)
            if cfg.grad_clip is not None:
                clip_grad_norm(grads, cfg.grad_clip)
            lr = lr_at(spec, step)
            _adam_step(params, grads, state, lr)
            trace.append((step, lr, loss_val))
            step += 1
            if out_dir and cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                _save_periodic(out_dir, _snapshot(cfg, params, state, step), step)

    ckpt = _snapshot(cfg, params, state, step)
    if out_dir:
        save_checkpoint(ckpt, Path(out_dir) / "checkpoint_final.bin")
        write_trace(trace, Path(out_dir) / "trace.csv")
    return ckpt, trace


def finetune_loop(cfg: TrainRunConfig, train_manifest, store, val_manifest=None, val_store=None, init: Optional[Checkpoint] = None, out_dir=None):
    """Gaze regression training with L1 loss.

    Starts from `init` (a pre-trained checkpoint) or random weights. Returns
    (checkpoint, trace, val_errors): val_errors[0] is the validation mean
    angular error before any update, then one entry per epoch.
    """
    if cfg.mode != "finetune":
        raise DataError(f"finetune_loop: config mode is {cfg.mode!r}")
    if len(train_manifest.records) == 0:
        raise DataError("finetune_loop: empty dataset")
    for rec in train_manifest.records:
        if rec.gaze is None:
            raise DataError(f"finetune_loop: record {rec.key} missing gaze label")
    dtype = dtype_for_mode(cfg.precision)

    if init is not None:
        if _shape_signature(init.config) != _shape_signature(cfg.model):
            raise DataError(
                "finetune_loop: checkpoint model config does not match run config "
                f"({init.config} vs {cfg.model})"
            )
        params = {k: Tensor(v.astype(dtype), requires_grad=True) for k, v in init.params.items()}
    else:
        params = init_params(cfg.model, cfg.seed, dtype=dtype)

    state = init_optim_state(
        params, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay, cfg.decoupled_decay
    )
    total, steps_per_epoch = _total_steps(cfg, len(train_manifest.records))
    spec = _resolve_schedule(cfg.schedule, total, steps_per_epoch)

    def validation_error():
        if val_manifest is None or len(val_manifest.records) == 0:
            return None
        preds = predict_gaze(params, cfg.model, val_manifest, val_store or store)
        labels = np.stack([r.require_gaze() for r in val_manifest.records])
        return float(np.mean(angular_error_deg(pitchyaw_to_vector(preds), pitchyaw_to_vector(labels))))

    trace = []
    val_errors = []
    err0 = validation_error()
    if err0 is not None:
        val_errors.append(err0)
    step = 0
    for epoch in range(cfg.epochs):
        if step >= total:
            break
        for batch in batch_iterator(train_manifest, cfg.batch_size, cfg.seed, epoch):
            if step >= total:
                break
            images = _batch_images(batch, store, cfg, epoch, dtype)
            labels = np.stack([r.require_gaze() for r in batch])
            zero_grad(params)
            loss = gaze_loss(gaze_forward(params, cfg.model, images), labels)
            loss_val = float(loss.data)
            if not np.isfinite(loss_val):
                raise NumericError(f"finetune_loop: non-finite loss at step {step}")
            grads = grads_for(loss, params)
            if cfg.grad_clip is not None:
                clip_grad_norm(grads, cfg.grad_clip)
            lr = lr_at(spec, step)
            _adam_step(params, grads, state, lr)
            trace.append((step, lr, loss_val))
            step += 1
            if out_dir and cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                _save_periodic(out_dir, _snapshot(cfg, params, state, step), step)
        err = validation_error()
        if err is not None:
            val_errors.append(err)

    ckpt = _snapshot(cfg, params, state, step)
    if out_dir:
        save_checkpoint(ckpt, Path(out_dir) / "checkpoint_final.bin")
        write_trace(trace, Path(out_dir) / "trace.csv")
        if val_errors:
            Path(out_dir, "validation.csv").write_text(
                "epoch,mean_angular_error_deg\n"
                + "".join(f"{i},{e:.17g}\n" for i, e in enumerate(val_errors))
            )
    return ckpt, trace, val_errors


def predict_gaze(params, model_cfg: ModelConfig, manifest, store, batch_size: int = 256) -> np.ndarray:
    """Forward every record's image through the gaze head; (N, 2) pitch/yaw."""
    out = np.empty((len(manifest.records), 2), dtype=np.float64)
    for start in range(0, len(manifest.records), batch_size):
        batch = manifest.records[start : start + batch_size]
        images = np.stack([store.load(r) for r in batch])
        pred = gaze_forward(params, model_cfg, images)
        out[start : start + len(batch)] = pred.data.astype(np.float64)
    return out


def write_trace(trace, path) -> None:
    """CSV rows (step, lr, loss); floats keep full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["step,lr,loss"]
    lines += [f"{s},{lr:.17g},{lv:.17g}" for s, lr, lv in trace]
    path.write_text("\n".join(lines) + "\n")


def _snapshot(cfg: TrainRunConfig, params, state, step) -> Checkpoint:
    return Checkpoint.from_tensors(
        cfg.model,
        params,
        step=step,
        optim=state,
        meta={"mode": cfg.mode, "seed": cfg.seed, "precision": cfg.precision},
    )


def _shape_signature(cfg: ModelConfig):
    return (
        cfg.image_size,
        cfg.patch_size,
        cfg.channels,
        cfg.depth,
        cfg.heads,
        cfg.embed_dim,
        cfg.mlp_ratio,
        cfg.decoder_depth,
        cfg.decoder_dim,
        cfg.decoder_heads,
    )

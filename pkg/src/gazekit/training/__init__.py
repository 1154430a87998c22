"""Optimization, schedules, training loops, and checkpointing."""

from gazekit.training.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from gazekit.training.loops import (
    TrainRunConfig,
    augment_image,
    finetune_config,
    finetune_loop,
    predict_gaze,
    pretrain_config,
    pretrain_loop,
    write_trace,
)
from gazekit.training.optim import OptimState, adam_step, clip_grad_norm, init_optim_state
from gazekit.training.schedule import ScheduleSpec, lr_at

__all__ = [
    "Checkpoint",
    "OptimState",
    "ScheduleSpec",
    "TrainRunConfig",
    "adam_step",
    "augment_image",
    "clip_grad_norm",
    "finetune_config",
    "finetune_loop",
    "init_optim_state",
    "load_checkpoint",
    "lr_at",
    "predict_gaze",
    "pretrain_config",
    "pretrain_loop",
    "save_checkpoint",
    "write_trace",
]

"""Learning-rate schedules: one-cycle, step decay, constant."""

import math
from dataclasses import dataclass

from gazekit.errors import NumericError

SCHEDULE_KINDS = ("one_cycle", "step_decay", "constant")


@dataclass(frozen=True)
class ScheduleSpec:
    """One-cycle rises linearly from max_lr/div_factor to max_lr over the
    first pct_start fraction of total_steps, then cosine-anneals to
    max_lr/final_div. Step decay multiplies by gamma every step_epochs
    epochs (epoch = step // steps_per_epoch).

    total_steps = 0 means "fill in at run start" (loops replace it)."""

    kind: str = "one_cycle"
    total_steps: int = 0
    max_lr: float = 1e-4
    pct_start: float = 0.3
    div_factor: float = 25.0
    final_div: float = 1e4
    gamma: float = 0.1
    step_epochs: int = 5
    steps_per_epoch: int = 1

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise NumericError(f"ScheduleSpec: unknown kind {self.kind!r}")
        if not 0.0 < self.pct_start < 1.0:
            raise NumericError(f"ScheduleSpec: pct_start must be in (0, 1), got {self.pct_start}")
        if self.max_lr <= 0 or self.div_factor <= 0 or self.final_div <= 0:
            raise NumericError("ScheduleSpec: learning rates and divisors must be positive")


def lr_at(spec: ScheduleSpec, step: int) -> float:
    """Learning rate at an integer step; steps past total_steps clamp to the
    final value."""
    if spec.kind == "constant":
        return spec.max_lr
    if spec.kind == "step_decay":
        epoch = step // max(spec.steps_per_epoch, 1)
        return spec.max_lr * spec.gamma ** (epoch // spec.step_epochs)
    total = spec.total_steps
    if total <= 0:
        raise NumericError("lr_at: one_cycle schedule needs total_steps > 0")
    step = min(max(step, 0), total)
    warm = spec.pct_start * total
    start_lr = spec.max_lr / spec.div_factor
    final_lr = spec.max_lr / spec.final_div
    if step <= warm:
        return start_lr + (spec.max_lr - start_lr) * (step / warm)
    progress = (step - warm) / (total - warm)
    return final_lr + (spec.max_lr - final_lr) * 0.5 * (1.0 + math.cos(math.pi * progress))

"""Training configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigurationError

MODES = ("pretrain", "finetune", "linear_eval", "scratch")
TASKS = ("tdoa", "drr", "t60", "c50", "abs")


@dataclass
class TrainConfig:
    mode: str = "pretrain"
    lr_init: float = 1e-3
    batch_size: int = 16
    max_epochs: int = 30
    lr_schedule: str = "cosine"          # "cosine" (pretrain) | "plateau" (finetune)
    smoothing_beta: float = 0.9
    patience: int = 10
    ensemble_window: int = 5
    seed: int = 0
    mask_rate: float = 0.5
    mask_kind: str = "frame"
    mask_resample: str = "per_epoch"     # "per_epoch" | "fixed"
    task: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.lr_init <= 0:
            raise ConfigurationError("lr_init must be positive")
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ConfigurationError("batch_size and max_epochs must be >= 1")
        if self.lr_schedule not in ("cosine", "plateau"):
            raise ConfigurationError(f"unknown lr schedule {self.lr_schedule!r}")
        if not 0.0 <= self.smoothing_beta < 1.0:
            raise ConfigurationError("smoothing coefficient must lie in [0, 1)")
        if self.patience < 1:
            raise ConfigurationError("patience must be >= 1")
        if self.ensemble_window < 1:
            raise ConfigurationError("ensemble window must be >= 1")
        if self.mask_resample not in ("per_epoch", "fixed"):
            raise ConfigurationError("mask_resample must be 'per_epoch' or 'fixed'")
        if self.task is not None and self.task not in TASKS:
            raise ConfigurationError(f"task must be one of {TASKS}, got {self.task!r}")

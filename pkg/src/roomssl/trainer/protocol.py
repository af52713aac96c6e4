"""Schedule and model-selection protocol pieces, kept separate for testability."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..model.checkpoint import Checkpoint


def cosine_lr(step: int, total_steps: int, lr_init: float) -> float:
    """Cosine decay from lr_init to 0: lr_init * cos^2(pi/2 * step/total)."""
    if total_steps <= 0:
        return lr_init
    frac = min(max(step / total_steps, 0.0), 1.0)
    return lr_init * 0.5 * (1.0 + np.cos(np.pi * frac))


class PlateauDecimation:
    """Smoothed-validation-loss schedule used for fine-tuning.

    The validation loss is recursively smoothed, v_hat_e = beta * v_hat_{e-1}
    + (1 - beta) * v_e.  When the smoothed loss has not decreased for
    ``patience`` epochs the learning rate is divided by 10 (once); after
    another ``patience`` epochs without decrease, training stops.
    """

    def __init__(self, beta: float = 0.9, patience: int = 10):
        self.beta = beta
        self.patience = patience
        self.smoothed: float | None = None
        self.best: float = np.inf
        self.best_epoch: int = 0
        self.since_improve: int = 0
        self.decimations: int = 0
        self.stopped: bool = False
        self.epoch: int = 0

    @property
    def lr_scale(self) -> float:
        return 0.1**self.decimations

    def update(self, val_loss: float) -> float:
        """Feed one epoch's validation loss; returns the smoothed value."""
        self.epoch += 1
        if self.smoothed is None:
            self.smoothed = float(val_loss)
        else:
            self.smoothed = self.beta * self.smoothed + (1.0 - self.beta) * float(val_loss)
        if self.smoothed < self.best:
            self.best = self.smoothed
            self.best_epoch = self.epoch
            self.since_improve = 0
        else:
            self.since_improve += 1
            if self.since_improve >= self.patience:
                if self.decimations == 0:
                    self.decimations = 1
                    self.since_improve = 0
                else:
                    self.stopped = True
        return self.smoothed


def ensemble_checkpoints(checkpoints: list[Checkpoint]) -> Checkpoint:
    """Element-wise arithmetic mean of the named tensors of several checkpoints."""
    if not checkpoints:
        raise InputError("cannot ensemble an empty checkpoint list")
    names = set(checkpoints[0].tensors)
    for ckpt in checkpoints[1:]:
        if set(ckpt.tensors) != names:
            raise InputError("checkpoints disagree on tensor names")
    averaged = {}
    for name in names:
        first = checkpoints[0].tensors[name]
        for ckpt in checkpoints[1:]:
            if ckpt.tensors[name].shape != first.shape:
                raise InputError(f"shape mismatch for tensor {name!r}")
        stacked = np.stack([c.tensors[name].astype(np.float64) for c in checkpoints])
        averaged[name] = stacked.mean(axis=0).astype(np.float32)
    return Checkpoint(
        tensors=averaged,
        config_fingerprint=checkpoints[0].config_fingerprint,
        step=max(c.step for c in checkpoints),
        rng_state=checkpoints[-1].rng_state,
    )

from .config import TrainConfig
from .protocol import PlateauDecimation, cosine_lr, ensemble_checkpoints
from .data import (
    InMemoryLabeledData,
    InMemoryPretextData,
    build_downstream_batch,
    build_pretext_batch,
    mask_rng,
    packed_input,
)
from .loops import finetune, pretrain

__all__ = [
    "InMemoryLabeledData",
    "InMemoryPretextData",
    "PlateauDecimation",
    "TrainConfig",
    "build_downstream_batch",
    "build_pretext_batch",
    "cosine_lr",
    "ensemble_checkpoints",
    "finetune",
    "mask_rng",
    "packed_input",
    "pretrain",
]

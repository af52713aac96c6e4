from .config import (
    EncoderConfig,
    PretextModelConfig,
    DownstreamModelConfig,
    config_fingerprint,
    paper_pretext_config,
    paper_downstream_config,
    toy_pretext_config,
    toy_downstream_config,
)
from .networks import (
    ConformerBlock,
    ConvStem,
    Decoder,
    DownstreamModel,
    MCConformerEncoder,
    PretextModel,
    build_downstream_model,
    build_pretext_model,
    count_parameters,
    masked_reconstruction_loss,
)
from .checkpoint import (
    Checkpoint,
    ParamTensor,
    checkpoint_from_module,
    load_checkpoint,
    load_into_module,
    save_checkpoint,
)

__all__ = [
    "Checkpoint",
    "ConformerBlock",
    "ConvStem",
    "Decoder",
    "DownstreamModel",
    "DownstreamModelConfig",
    "EncoderConfig",
    "MCConformerEncoder",
    "ParamTensor",
    "PretextModel",
    "PretextModelConfig",
    "build_downstream_model",
    "build_pretext_model",
    "checkpoint_from_module",
    "config_fingerprint",
    "count_parameters",
    "load_checkpoint",
    "load_into_module",
    "masked_reconstruction_loss",
    "paper_downstream_config",
    "paper_pretext_config",
    "save_checkpoint",
    "toy_downstream_config",
    "toy_pretext_config",
]

"""Model configuration dataclasses, presets, and fingerprinting."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from ..errors import ConfigurationError

# conv stem layers as (out_channels, kernel, frequency_stride) triples
FULL_STEM = ((16, 3, 2), (32, 3, 2), (64, 3, 2), (64, 3, 2))
TOY_STEM = ((8, 3, 2), (16, 3, 2), (32, 3, 2), (32, 3, 2))


@dataclass(frozen=True)
class EncoderConfig:
    embed_dim: int = 256
    n_blocks: int = 3
    n_heads: int = 4
    conv_kernel: int = 31
    ff_expansion: int = 4
    dropout: float = 0.1
    conv_stem_spec: tuple = FULL_STEM

    def __post_init__(self):
        if self.embed_dim % self.n_heads != 0:
            raise ConfigurationError(
                f"embed_dim {self.embed_dim} not divisible by n_heads {self.n_heads}")
        if self.n_blocks < 1:
            raise ConfigurationError("need at least one block")
        for layer in self.conv_stem_spec:
            if len(layer) != 3:
                raise ConfigurationError("stem layers are (channels, kernel, freq_stride)")


@dataclass(frozen=True)
class PretextModelConfig:
    n_freq: int = 256
    n_mics: int = 2
    spatial: EncoderConfig = field(default_factory=EncoderConfig)
    spectral: EncoderConfig = field(
        default_factory=lambda: EncoderConfig(embed_dim=512, n_blocks=1))
    decoder_hidden: int = 3072


@dataclass(frozen=True)
class DownstreamModelConfig:
    n_freq: int = 256
    n_mics: int = 2
    encoder: EncoderConfig = field(default_factory=EncoderConfig)


def paper_pretext_config() -> PretextModelConfig:
    """Full-scale configuration: spatial 3x256, spectral 1x512, decoder 3072."""
    return PretextModelConfig()


def paper_downstream_config() -> DownstreamModelConfig:
    return DownstreamModelConfig()


def toy_pretext_config(n_freq: int = 256) -> PretextModelConfig:
    """Desk-scale preset: small stems and embeddings, same topology."""
    return PretextModelConfig(
        n_freq=n_freq,
        spatial=EncoderConfig(embed_dim=64, n_blocks=2, conv_stem_spec=TOY_STEM),
        spectral=EncoderConfig(embed_dim=128, n_blocks=1, conv_stem_spec=TOY_STEM),
        decoder_hidden=512,
    )


def toy_downstream_config(n_freq: int = 256) -> DownstreamModelConfig:
    return DownstreamModelConfig(
        n_freq=n_freq,
        encoder=EncoderConfig(embed_dim=64, n_blocks=2, conv_stem_spec=TOY_STEM),
    )


def config_fingerprint(cfg) -> str:
    """Stable short hash of a config dataclass, stored in checkpoints."""
    blob = json.dumps(asdict(cfg), sort_keys=True, default=list)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]

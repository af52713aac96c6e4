"""MC-Conformer encoders, frame-wise decoder, and the downstream head.

Network input layout is channels-first: (batch, 2M, F, N) with real parts in
channel slots 0..M-1 and imaginary parts in M..2M-1.  The conv stem applies
2D convolutions with stride 2 along frequency only, then maps each frame's
flattened channel x frequency extent to the embedding dimension, producing a
(batch, N, D) sequence for the Conformer blocks.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from ..errors import InputError, NumericError
from .config import DownstreamModelConfig, EncoderConfig, PretextModelConfig


class ConvStem(nn.Module):
    """Local time-frequency processing: conv layers + per-frame linear."""

    def __init__(self, in_channels: int, n_freq: int, cfg: EncoderConfig):
        super().__init__()
        layers = []
        ch = in_channels
        freq = n_freq
        for out_ch, kernel, stride in cfg.conv_stem_spec:
            layers += [
                nn.Conv2d(ch, out_ch, kernel_size=kernel, stride=(stride, 1),
                          padding=kernel // 2),
                nn.BatchNorm2d(out_ch),
                nn.ReLU(),
            ]
            ch = out_ch
            freq = (freq + 2 * (kernel // 2) - kernel) // stride + 1
        self.conv = nn.Sequential(*layers)
        self.out_freq = freq
        self.proj = nn.Linear(ch * freq, cfg.embed_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (B, C, F, N) -> (B, N, D)
        h = self.conv(x)
        h = h.permute(0, 3, 1, 2).flatten(2)
        return self.proj(h)


class _FeedForward(nn.Module):
    def __init__(self, dim, expansion, dropout):
        super().__init__()
        self.net = nn.Sequential(
            nn.LayerNorm(dim),
            nn.Linear(dim, expansion * dim),
            nn.SiLU(),
            nn.Dropout(dropout),
            nn.Linear(expansion * dim, dim),
            nn.Dropout(dropout),
        )

    def forward(self, x):
        return self.net(x)


class _ConvModule(nn.Module):
    """Pointwise-GLU, depthwise conv, batchnorm, SiLU, pointwise."""

    def __init__(self, dim, kernel, dropout):
        super().__init__()
        self.norm = nn.LayerNorm(dim)
        self.pointwise_in = nn.Conv1d(dim, 2 * dim, kernel_size=1)
        self.depthwise = nn.Conv1d(dim, dim, kernel_size=kernel,
                                   padding=kernel // 2, groups=dim)
        self.bn = nn.BatchNorm1d(dim)
        self.act = nn.SiLU()
        self.pointwise_out = nn.Conv1d(dim, dim, kernel_size=1)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        h = self.norm(x).transpose(1, 2)           # (B, D, N)
        h = nn.functional.glu(self.pointwise_in(h), dim=1)
        h = self.act(self.bn(self.depthwise(h)))
        h = self.pointwise_out(h).transpose(1, 2)
        return self.dropout(h)


class _SelfAttention(nn.Module):
    def __init__(self, dim, n_heads, dropout):
        super().__init__()
        self.norm = nn.LayerNorm(dim)
        self.mhsa = nn.MultiheadAttention(dim, n_heads, dropout=dropout, batch_first=True)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        h = self.norm(x)
        h, _ = self.mhsa(h, h, h, need_weights=False)
        return self.dropout(h)


class ConformerBlock(nn.Module):
    """Sandwich block: half-step FF, MHSA, 1D conv, half-step FF, layernorm."""

    def __init__(self, cfg: EncoderConfig):
        super().__init__()
        self.ff1 = _FeedForward(cfg.embed_dim, cfg.ff_expansion, cfg.dropout)
        self.attn = _SelfAttention(cfg.embed_dim, cfg.n_heads, cfg.dropout)
        self.conv = _ConvModule(cfg.embed_dim, cfg.conv_kernel, cfg.dropout)
        self.ff2 = _FeedForward(cfg.embed_dim, cfg.ff_expansion, cfg.dropout)
        self.final_norm = nn.LayerNorm(cfg.embed_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + 0.5 * self.ff1(x)
        x = x + self.attn(x)
        x = x + self.conv(x)
        x = x + 0.5 * self.ff2(x)
        x = self.final_norm(x)
        if not torch.isfinite(x).all():
            raise NumericError("non-finite activations in Conformer block")
        return x


class MCConformerEncoder(nn.Module):
    """Conv stem followed by Conformer blocks: (B, 2M, F, N) -> (B, N, D)."""

    def __init__(self, in_channels: int, n_freq: int, cfg: EncoderConfig):
        super().__init__()
        self.stem = ConvStem(in_channels, n_freq, cfg)
        self.blocks = nn.ModuleList(ConformerBlock(cfg) for _ in range(cfg.n_blocks))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.stem(x)
        for block in self.blocks:
            h = block(h)
        return h


class Decoder(nn.Module):
    """Two FC layers applied to each frame independently."""

    def __init__(self, in_dim: int, hidden: int, n_freq: int, n_mics: int):
        super().__init__()
        self.n_freq = n_freq
        self.n_mics = n_mics
        self.fc1 = nn.Linear(in_dim, hidden)
        self.act = nn.ReLU()
        self.fc2 = nn.Linear(hidden, 2 * n_freq * n_mics)

    def forward(self, spatial_emb: torch.Tensor, spectral_emb: torch.Tensor) -> torch.Tensor:
        if spatial_emb.shape[1] != spectral_emb.shape[1]:
            raise InputError("spatial and spectral embeddings disagree in frame count")
        h = torch.cat([spatial_emb, spectral_emb], dim=2)   # (B, N, D_spat + D_spec)
        out = self.fc2(self.act(self.fc1(h)))               # (B, N, 2FM)
        b, n, _ = out.shape
        return out.view(b, n, 2 * self.n_mics, self.n_freq).permute(0, 2, 3, 1)


class PretextModel(nn.Module):
    """Spatial + spectral encoders feeding the frame-wise reconstruction decoder."""

    def __init__(self, cfg: PretextModelConfig):
        super().__init__()
        self.cfg = cfg
        in_ch = 2 * cfg.n_mics
        self.spatial_encoder = MCConformerEncoder(in_ch, cfg.n_freq, cfg.spatial)
        self.spectral_encoder = MCConformerEncoder(in_ch, cfg.n_freq, cfg.spectral)
        self.decoder = Decoder(cfg.spatial.embed_dim + cfg.spectral.embed_dim,
                               cfg.decoder_hidden, cfg.n_freq, cfg.n_mics)

    def forward(self, x_spatial: torch.Tensor, x_spectral: torch.Tensor) -> torch.Tensor:
        spat = self.spatial_encoder(x_spatial)
        spec = self.spectral_encoder(x_spectral)
        return self.decoder(spat, spec)


class DownstreamModel(nn.Module):
    """Spatial encoder, mean pooling over frames, linear scalar head."""

    def __init__(self, cfg: DownstreamModelConfig):
        super().__init__()
        self.cfg = cfg
        self.encoder = MCConformerEncoder(2 * cfg.n_mics, cfg.n_freq, cfg.encoder)
        self.head = nn.Linear(cfg.encoder.embed_dim, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        emb = self.encoder(x)           # (B, N, D)
        pooled = emb.mean(dim=1)
        return self.head(pooled).squeeze(-1)


def build_pretext_model(cfg: PretextModelConfig, seed: int = 0) -> PretextModel:
    torch.manual_seed(seed)
    return PretextModel(cfg)


def build_downstream_model(cfg: DownstreamModelConfig, seed: int = 0) -> DownstreamModel:
    torch.manual_seed(seed)
    return DownstreamModel(cfg)


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def masked_reconstruction_loss(
    prediction: torch.Tensor,
    target: torch.Tensor,
    keep_mask: torch.Tensor,
    masked_channel: torch.Tensor,
    n_mics: int,
) -> torch.Tensor:
    """Differentiable mirror of ccsr.reconstruction_loss on packed tensors.

    Parameters
    ----------
    prediction, target : (B, 2M, F, N) packed real tensors.
    keep_mask : (B, F, N) float tensor, 1 = kept, 0 = masked.
    masked_channel : (B,) long tensor of 1-based masked-channel indices.
    """
    if prediction.shape != target.shape:
        raise InputError("prediction and target shapes differ")
    b = prediction.shape[0]
    ch = masked_channel.long() - 1
    idx = torch.arange(b, device=prediction.device)
    diff_re = prediction[idx, ch] - target[idx, ch]
    diff_im = prediction[idx, n_mics + ch] - target[idx, n_mics + ch]
    sq = (diff_re**2 + diff_im**2) * (1.0 - keep_mask)
    counts = (1.0 - keep_mask).sum(dim=(1, 2))
    if torch.any(counts == 0):
        raise InputError("empty mask in batch: loss undefined")
    return (sq.sum(dim=(1, 2)) / counts).mean()

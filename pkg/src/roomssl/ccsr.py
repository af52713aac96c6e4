"""Cross-channel signal reconstruction pretext task: masks and loss.

One channel of a two-channel spectrogram is chosen as the reconstruction
target.  Three masked views are derived from a single binary time-frequency
mask W (0 = masked, 1 = kept):

* target view: W applied to the masked channel only;
* spatial view: W applied to both channels, so no channel of a masked
  frame is visible;
* spectral view: W on the masked channel, (1 - W) on the other, so no
  frame is ever visible in both channels at once.

The reconstruction loss is the mean squared complex error over the masked
TF units of the masked channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError
from .tf_frontend import Spectrogram

PATCH_FREQ = 16
PATCH_TIME = 16

FRAME_WISE = "frame"
PATCH_WISE = "patch"


@dataclass
class MaskPlan:
    """Which units are masked, and which channel is the masked channel."""

    kind: str                 # FRAME_WISE or PATCH_WISE
    masked_channel: int       # 1-based channel index
    mask: np.ndarray          # (N,) for frame-wise, (F_p, N_p) for patch-wise; 1 = keep
    rate: float

    @property
    def n_masked_units(self) -> int:
        return int(np.sum(self.mask == 0))

    def tf_mask(self, n_freq: int, n_frames: int) -> np.ndarray:
        """Expand to a full (F, N) float mask, 1 = keep, 0 = masked."""
        if self.kind == FRAME_WISE:
            if self.mask.shape != (n_frames,):
                raise InputError("frame mask length does not match spectrogram")
            return np.broadcast_to(self.mask[None, :], (n_freq, n_frames)).astype(np.float64)
        fp, npc = self.mask.shape
        if fp * PATCH_FREQ != n_freq or npc * PATCH_TIME != n_frames:
            raise InputError("patch grid does not match spectrogram shape")
        return np.kron(self.mask, np.ones((PATCH_FREQ, PATCH_TIME)))


def sample_mask(
    n_frames: int,
    n_freq: int,
    rate: float,
    kind: str = FRAME_WISE,
    rng: np.random.Generator | None = None,
) -> MaskPlan:
    """Draw a random mask plan.

    Frame-wise plans mask round(rate * N) whole frames chosen uniformly
    without replacement; patch-wise plans do the same over a grid of
    16x16 patches.  The masked channel is uniform over {1, 2}.
    """
    if rng is None:
        rng = np.random.default_rng()
    if not 0.0 < rate < 1.0:
        raise ConfigurationError("masking rate must lie strictly in (0, 1)")

    if kind == FRAME_WISE:
        total = n_frames
        n_masked = int(round(rate * total))
        if n_masked == 0 or n_masked == total:
            raise ConfigurationError(
                f"rate {rate} masks {n_masked} of {total} frames; nothing to learn")
        masked = rng.choice(total, size=n_masked, replace=False)
        mask = np.ones(total, dtype=np.int8)
        mask[masked] = 0
    elif kind == PATCH_WISE:
        if n_freq % PATCH_FREQ or n_frames % PATCH_TIME:
            raise ConfigurationError(
                f"patch-wise masking needs F, N divisible by {PATCH_FREQ}x{PATCH_TIME}")
        grid = (n_freq // PATCH_FREQ, n_frames // PATCH_TIME)
        total = grid[0] * grid[1]
        n_masked = int(round(rate * total))
        if n_masked == 0 or n_masked == total:
            raise ConfigurationError(
                f"rate {rate} masks {n_masked} of {total} patches; nothing to learn")
        masked = rng.choice(total, size=n_masked, replace=False)
        mask = np.ones(total, dtype=np.int8)
        mask[masked] = 0
        mask = mask.reshape(grid)
    else:
        raise ConfigurationError(f"unknown mask kind: {kind!r}")

    masked_channel = int(rng.integers(1, 3))
    return MaskPlan(kind=kind, masked_channel=masked_channel, mask=mask, rate=rate)


def _check_two_channels(spec: Spectrogram, plan: MaskPlan) -> np.ndarray:
    if spec.n_channels != 2:
        raise InputError("masking operates on two-channel spectrograms")
    if plan.masked_channel not in (1, 2):
        raise InputError("masked_channel must be 1 or 2")
    return plan.tf_mask(spec.n_freq, spec.n_frames)


def apply_target_mask(spec: Spectrogram, plan: MaskPlan) -> Spectrogram:
    """Zero the masked units of the masked channel; leave the other untouched."""
    w = _check_two_channels(spec, plan)
    data = spec.data.copy()
    ch = plan.masked_channel - 1
    data[:, :, ch] = data[:, :, ch] * w
    return Spectrogram(data=data, fs=spec.fs, hop_samples=spec.hop_samples,
                       win_samples=spec.win_samples)


def apply_spatial_mask(spec: Spectrogram, plan: MaskPlan) -> Spectrogram:
    """Apply the mask to both channels (input of the spatial encoder)."""
    w = _check_two_channels(spec, plan)
    return Spectrogram(data=spec.data * w[:, :, None], fs=spec.fs,
                       hop_samples=spec.hop_samples, win_samples=spec.win_samples)


def apply_spectral_mask(spec: Spectrogram, plan: MaskPlan) -> Spectrogram:
    """Mask the masked channel with W and the other with 1-W (spectral encoder).

    The result never exposes the same frame in both channels.
    """
    w = _check_two_channels(spec, plan)
    data = spec.data.copy()
    ch = plan.masked_channel - 1
    other = 1 - ch
    data[:, :, ch] = data[:, :, ch] * w
    data[:, :, other] = data[:, :, other] * (1.0 - w)
    return Spectrogram(data=data, fs=spec.fs, hop_samples=spec.hop_samples,
                       win_samples=spec.win_samples)


def reconstruction_loss(target: Spectrogram, prediction: Spectrogram, plan: MaskPlan) -> float:
    """Mean squared complex error over the masked units of the masked channel.

    |x - x_hat|^2 sums squared real and imaginary errors; the denominator is
    the number of masked TF units.
    """
    if target.data.shape != prediction.data.shape:
        raise InputError("target and prediction shapes differ")
    w = _check_two_channels(target, plan)
    masked = w == 0.0
    count = int(np.sum(masked))
    if count == 0:
        raise InputError("empty mask: reconstruction loss undefined")
    ch = plan.masked_channel - 1
    diff = target.data[:, :, ch][masked] - prediction.data[:, :, ch][masked]
    return float(np.sum(diff.real**2 + diff.imag**2) / count)

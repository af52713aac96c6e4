"""STFT analysis/synthesis and packing into the network input layout.

Conventions
-----------
* 32 ms Hann window (512 samples at 16 kHz), 16 ms hop (256 samples),
  512-point transform.
* Of the 257 one-sided bins, the DC bin is dropped and bins 1..256
  (including Nyquist) are kept, so F = 256.  DC carries no inter-channel
  phase information; round trips are exact only for signals without
  per-frame DC content.
* Frames start at multiples of the hop; the number of frames is
  ceil(T / hop) and the tail is zero-padded.  The canonical pretext
  segment is ``PRETEXT_SAMPLES`` = 65536 samples (the nominal "4 s"
  input), which yields an exact 256 x 256 time-frequency grid.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InputError

DEFAULT_FS = 16000
WIN_SAMPLES = 512
HOP_SAMPLES = 256
N_FREQ = 256

#: Canonical segment lengths, chosen so the frame grid comes out exact:
#: 65536 / 256 = 256 frames ("4 s" pretext input),
#: 16384 / 256 = 64 frames ("1 s" input used for TDOA).
PRETEXT_SAMPLES = 65536
SHORT_SAMPLES = 16384

_MAGIC = b"RSSPEC01"


@dataclass
class Spectrogram:
    """Complex STFT tensor of shape (F, N, M) plus its framing parameters."""

    data: np.ndarray  # complex, (F frequencies, N frames, M channels)
    fs: int
    hop_samples: int = HOP_SAMPLES
    win_samples: int = WIN_SAMPLES

    @property
    def n_freq(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[2]


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


def stft(signal: np.ndarray, fs: int = DEFAULT_FS) -> Spectrogram:
    """Analyze a (T,) or (T, M) real signal into a Spectrogram.

    Parameters
    ----------
    signal : np.ndarray
        Real time series, one column per channel.
    fs : int
        Sampling rate in Hz.

    Returns
    -------
    Spectrogram
        Complex tensor of shape (256, ceil(T/hop), M).
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise InputError("stft expects a non-empty (T,) or (T, M) signal")
    if x.shape[0] < WIN_SAMPLES:
        raise InputError(
            f"signal must be at least one window long ({WIN_SAMPLES} samples), got {x.shape[0]}"
        )

    n_samples, n_ch = x.shape
    n_frames = -(-n_samples // HOP_SAMPLES)  # ceil division
    padded_len = (n_frames - 1) * HOP_SAMPLES + WIN_SAMPLES
    xp = np.zeros((padded_len, n_ch))
    xp[:n_samples] = x

    window = _hann_periodic(WIN_SAMPLES)
    data = np.empty((N_FREQ, n_frames, n_ch), dtype=np.complex128)
    for ch in range(n_ch):
        frames = sliding_window_view(xp[:, ch], WIN_SAMPLES)[::HOP_SAMPLES]
        spec = np.fft.rfft(frames * window, n=WIN_SAMPLES, axis=1)
        data[:, :, ch] = spec[:, 1:].T  # drop DC, keep bins 1..256

    return Spectrogram(data=data, fs=fs)


def istft(spec: Spectrogram) -> np.ndarray:
    """Overlap-add synthesis; inverse of :func:`stft` up to the dropped DC bin.

    The DC bin is reinserted as zero, so reconstruction is exact (interior
    samples, relative L2 <= 1e-6) only for signals whose per-frame windowed
    DC vanishes.  Returns an array of shape (n_frames * hop, M).
    """
    if spec.win_samples != WIN_SAMPLES or spec.hop_samples != HOP_SAMPLES:
        raise InputError("istft supports only the canonical 512/256 framing")
    f, n_frames, n_ch = spec.data.shape
    if f != N_FREQ:
        raise InputError(f"expected F={N_FREQ} rows, got {f}")

    window = _hann_periodic(WIN_SAMPLES)
    out_len = (n_frames - 1) * HOP_SAMPLES + WIN_SAMPLES
    out = np.zeros((out_len, n_ch))
    norm = np.zeros(out_len)

    full = np.zeros((n_frames, N_FREQ + 1), dtype=np.complex128)
    for ch in range(n_ch):
        full[:, 1:] = spec.data[:, :, ch].T
        frames = np.fft.irfft(full, n=WIN_SAMPLES, axis=1) * window
        for i in range(n_frames):
            start = i * HOP_SAMPLES
            out[start : start + WIN_SAMPLES, ch] += frames[i]
    for i in range(n_frames):
        start = i * HOP_SAMPLES
        norm[start : start + WIN_SAMPLES] += window**2

    good = norm > 1e-12
    out[good] /= norm[good, None]
    return out[: n_frames * HOP_SAMPLES]


def normalize(spec: Spectrogram) -> Spectrogram:
    """Scale all channels by the mean magnitude of channel 1.

    After the call the mean of ``abs(data[:, :, 0])`` is exactly 1.
    """
    scale = float(np.mean(np.abs(spec.data[:, :, 0])))
    if not np.isfinite(scale) or scale <= 0.0:
        raise InputError("cannot normalize: channel 1 is zero or non-finite")
    return Spectrogram(
        data=spec.data / scale,
        fs=spec.fs,
        hop_samples=spec.hop_samples,
        win_samples=spec.win_samples,
    )


def pack_real(spec: Spectrogram) -> np.ndarray:
    """Pack a complex (F, N, M) spectrogram into a real (F, N, 2M) tensor.

    Channel slots 1..M hold real parts, M+1..2M the imaginary parts.
    """
    return np.concatenate([spec.data.real, spec.data.imag], axis=2)


def unpack_real(
    packed: np.ndarray,
    fs: int = DEFAULT_FS,
    hop_samples: int = HOP_SAMPLES,
    win_samples: int = WIN_SAMPLES,
) -> Spectrogram:
    """Inverse of :func:`pack_real`."""
    packed = np.asarray(packed)
    if packed.ndim != 3 or packed.shape[2] % 2 != 0:
        raise InputError("packed tensor must have shape (F, N, 2M)")
    m = packed.shape[2] // 2
    data = packed[:, :, :m] + 1j * packed[:, :, m:]
    return Spectrogram(data=data.astype(np.complex128), fs=fs,
                       hop_samples=hop_samples, win_samples=win_samples)


def save_spectrogram(path, spec: Spectrogram) -> None:
    """Dump a spectrogram for debugging: header + interleaved re/im float32."""
    f, n, m = spec.data.shape
    header = _MAGIC + struct.pack(
        "<6I", f, n, m, int(spec.fs), int(spec.hop_samples), int(spec.win_samples)
    )
    interleaved = np.empty((f, n, m, 2), dtype="<f4")
    interleaved[..., 0] = spec.data.real
    interleaved[..., 1] = spec.data.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def load_spectrogram(path) -> Spectrogram:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise InputError(f"not a spectrogram dump: {path}")
        f, n, m, fs, hop, win = struct.unpack("<6I", fh.read(24))
        raw = np.frombuffer(fh.read(f * n * m * 2 * 4), dtype="<f4")
    interleaved = raw.reshape(f, n, m, 2)
    data = interleaved[..., 0].astype(np.complex128) + 1j * interleaved[..., 1]
    return Spectrogram(data=data, fs=fs, hop_samples=hop, win_samples=win)

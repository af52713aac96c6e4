"""Dry source signals and microphone mixture synthesis."""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve, lfilter

from ..errors import InputError
from .rir import Rir


def synth_source(n_samples: int, fs: int, rng: np.random.Generator) -> np.ndarray:
    """Speech-like synthetic source: alternating voiced / fricative segments.

    Voiced segments are harmonic stacks with a drifting fundamental and a
    -6 dB/octave tilt; unvoiced segments are high-passed noise bursts; both
    ride on a syllable-rate amplitude envelope with occasional pauses.
    The output is broadband with strong temporal structure, standing in for
    speech recordings in desk-scale runs.  RMS is normalized to 1.
    """
    if n_samples <= 0:
        raise InputError("n_samples must be positive")
    t = np.arange(n_samples) / fs
    x = np.zeros(n_samples)

    pos = 0
    while pos < n_samples:
        seg_len = int(rng.uniform(0.08, 0.35) * fs)
        seg_len = min(seg_len, n_samples - pos)
        kind = rng.choice(["voiced", "unvoiced", "pause"], p=[0.55, 0.3, 0.15])
        if kind == "voiced":
            f0 = rng.uniform(90.0, 280.0)
            drift = rng.uniform(-30.0, 30.0)
            inst_f0 = f0 + drift * np.linspace(0.0, 1.0, seg_len)
            phase = 2.0 * np.pi * np.cumsum(inst_f0) / fs
            seg = np.zeros(seg_len)
            n_harm = max(2, int(4000.0 / f0))
            for k in range(1, n_harm + 1):
                seg += np.sin(k * phase + rng.uniform(0, 2 * np.pi)) / k
            seg += 0.05 * rng.standard_normal(seg_len)
        elif kind == "unvoiced":
            noise = rng.standard_normal(seg_len)
            seg = np.diff(noise, prepend=noise[0])  # first-difference high-pass
        else:
            seg = np.zeros(seg_len)
        # raised-cosine fade to avoid clicks at segment joins
        fade = min(seg_len // 4, int(0.01 * fs))
        if fade > 0 and kind != "pause":
            ramp = 0.5 * (1 - np.cos(np.pi * np.arange(fade) / fade))
            seg[:fade] *= ramp
            seg[-fade:] *= ramp[::-1]
        x[pos:pos + seg_len] = seg * rng.uniform(0.4, 1.0)
        pos += seg_len

    x *= 1.0 + 0.4 * np.sin(2.0 * np.pi * rng.uniform(2.5, 8.0) * t + rng.uniform(0, 2 * np.pi))
    # mild smoothing keeps the spectrum speech-shaped rather than flat
    x = lfilter([1.0], [1.0, -0.4], x)
    rms = np.sqrt(np.mean(x**2))
    if rms < 1e-12:
        # all-pause draw; fall back to modulated noise
        x = rng.standard_normal(n_samples)
        rms = np.sqrt(np.mean(x**2))
    return x / rms


def synthesize_mixture(
    rir: Rir,
    source: np.ndarray,
    noise: np.ndarray | None = None,
    snr_db: float | None = None,
    n_samples: int | None = None,
) -> np.ndarray:
    """Convolve a dry source with each RIR channel and add scaled noise.

    The noise gain is chosen so that the ratio of reverberant-speech power
    to noise power (pooled over channels and samples) equals ``snr_db``
    exactly.  With ``snr_db`` None or +inf the noise term is omitted.

    Returns an array of shape (T, M), T defaulting to len(source).
    """
    source = np.asarray(source, dtype=np.float64)
    if source.ndim != 1 or source.size == 0:
        raise InputError("source must be a non-empty 1-D array")
    t_out = int(n_samples) if n_samples is not None else source.shape[0]
    if source.shape[0] + rir.n_taps - 1 < t_out:
        raise InputError("source too short for the requested output length")

    reverberant = np.zeros((t_out, rir.n_channels))
    for m in range(rir.n_channels):
        conv = fftconvolve(source, rir.taps[:, m])
        reverberant[:, m] = conv[:t_out]

    no_noise = snr_db is None or np.isinf(snr_db)
    if no_noise:
        return reverberant
    if noise is None:
        raise InputError("finite snr_db requires a noise signal")
    noise = np.asarray(noise, dtype=np.float64)
    if noise.ndim == 1:
        noise = noise[:, None]
    if noise.shape[0] < t_out or noise.shape[1] != rir.n_channels:
        raise InputError("noise must be at least (T, M)")
    noise = noise[:t_out]

    p_sig = float(np.mean(reverberant**2))
    p_noise = float(np.mean(noise**2))
    if p_sig <= 0.0:
        raise InputError("silent source: SNR scaling undefined")
    if p_noise <= 0.0:
        raise InputError("silent noise: SNR scaling undefined")
    gain = np.sqrt(p_sig / (p_noise * 10.0 ** (snr_db / 10.0)))
    return reverberant + gain * noise

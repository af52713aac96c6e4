"""Spatially diffuse (spherically isotropic) white noise.

Frequency-domain mixing construction: independent white spectra are mixed
per frequency bin with a Cholesky factor of the target coherence matrix,
whose entries for an isotropic field are sinc(2*pi*f*d_ij/c).
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError


def generate_diffuse_noise(
    mic_pos: np.ndarray,
    fs: int,
    n_samples: int,
    rng: np.random.Generator,
    c: float = 343.0,
) -> np.ndarray:
    """Generate (n_samples, M) noise that is marginally white and spatially diffuse.

    Each channel is zero-mean, unit-variance white noise; the magnitude-squared
    coherence between channels i and j approaches sinc^2(2*pi*f*d_ij/c)
    as ``n_samples`` grows.
    """
    mic_pos = np.atleast_2d(np.asarray(mic_pos, dtype=np.float64))
    n_mics = mic_pos.shape[0]
    if n_mics < 1:
        raise InputError("need at least one microphone")
    if n_samples < 2:
        raise InputError("n_samples must be >= 2")

    white = rng.standard_normal((n_samples, n_mics))
    if n_mics == 1:
        return white

    spectra = np.fft.rfft(white, axis=0)          # (bins, M)
    freqs = np.fft.rfftfreq(n_samples, d=1.0 / fs)

    dist = np.linalg.norm(mic_pos[:, None, :] - mic_pos[None, :, :], axis=2)
    arg = 2.0 * freqs[:, None, None] * dist[None, :, :] / c
    coherence = np.sinc(arg)                       # (bins, M, M), np.sinc(x)=sin(pi x)/(pi x)
    coherence = coherence + 1e-9 * np.eye(n_mics)[None, :, :]
    factors = np.linalg.cholesky(coherence)        # real lower factors, unit row norms

    mixed = np.einsum("fij,fj->fi", factors, spectra)
    return np.fft.irfft(mixed, n=n_samples, axis=0)

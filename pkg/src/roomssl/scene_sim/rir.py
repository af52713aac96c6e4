"""Shoebox room impulse responses via the image-source method.

Image amplitudes follow the classic rectangular-room construction: along
each axis the image at ``2*n*L + (1-2*q)*s`` has picked up ``|n-q|``
reflections off the lower wall and ``|n|`` off the upper wall.  Pulses are
band-limited: each arrival is an 8-tap Hann-windowed sinc at its fractional
sample delay, which avoids quantizing inter-channel delay differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, sosfilt

from ..errors import GeometryError, NumericError
from .scene import RoomScene, ism_t60_estimate

_SINC_HALF = 4       # windowed-sinc half width in samples
_PAD = 2 * _SINC_HALF
_CHUNK = 2_000_000   # max images processed per block (memory bound)


@dataclass
class Rir:
    """Multi-channel discrete impulse response."""

    taps: np.ndarray          # (L, M) float
    fs: int
    direct_index: np.ndarray  # (M,) int, rounded direct-arrival sample

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.float64)
        if self.taps.ndim == 1:
            self.taps = self.taps[:, None]
        if self.taps.ndim != 2:
            raise GeometryError("taps must be (L,) or (L, M)")
        self.direct_index = np.atleast_1d(np.asarray(self.direct_index, dtype=np.int64))
        if self.direct_index.shape[0] != self.taps.shape[1]:
            raise GeometryError("need one direct_index per channel")
        if np.any(self.direct_index < 0) or np.any(self.direct_index >= self.taps.shape[0]):
            raise GeometryError("direct_index out of range")
        if not np.all(np.isfinite(self.taps)):
            raise NumericError("RIR taps must be finite")

    @property
    def n_taps(self) -> int:
        return self.taps.shape[0]

    @property
    def n_channels(self) -> int:
        return self.taps.shape[1]


def _axis_images(length: float, src: float, n_max: int, beta_lo: float, beta_hi: float):
    """Image coordinates and reflection gains along one axis."""
    n = np.arange(-n_max, n_max + 1)
    coords = np.concatenate([2 * n * length + src, 2 * n * length - src])
    exp_lo = np.concatenate([np.abs(n), np.abs(n - 1)])
    exp_hi = np.concatenate([np.abs(n), np.abs(n)])
    gains = np.power(beta_lo, exp_lo) * np.power(beta_hi, exp_hi)
    keep = gains > 0
    return coords[keep], gains[keep]


def _windowed_sinc_scatter(out, delays, amps, offset):
    """Add band-limited pulses amp*sinc(t - delay) into ``out`` (padded by offset)."""
    base = np.floor(delays).astype(np.int64)
    for k in range(-_SINC_HALF + 1, _SINC_HALF + 1):
        idx = base + k
        x = idx - delays
        taper = 0.5 * (1.0 + np.cos(np.pi * x / _SINC_HALF))
        vals = amps * np.sinc(x) * taper
        out += np.bincount(idx + offset, weights=vals, minlength=out.shape[0])


def simulate_rir(scene: RoomScene, max_t60_tail: float = 2.0,
                 highpass_hz: float | None = 100.0) -> Rir:
    """Simulate the room impulse response of every microphone in ``scene``.

    The image lattice is sized adaptively so the tail covers 1.25x the
    decay-model-predicted T60 (capped at ``max_t60_tail`` seconds); images
    beyond that horizon carry energy below -60 dB and are dropped.

    All image amplitudes are positive, so the dense tail would accumulate a
    nonphysical coherent low-frequency component; as in the classic
    formulation, the result is high-pass filtered (second-order Butterworth
    at ``highpass_hz``, pass None to disable).

    Returns
    -------
    Rir
        Taps of shape (L, M); ``direct_index[m]`` is round(fs*dist_m/c).
    """
    fs, c = scene.fs, scene.c
    dists = np.linalg.norm(scene.mic_pos - scene.source_pos[None, :], axis=1)
    if np.any(dists < 1e-6):
        raise GeometryError("source coincides with a microphone")

    tail_s = min(1.25 * ism_t60_estimate(scene.dims, scene.surface_absorption), max_t60_tail)
    duration = float(np.max(dists)) / c + max(tail_s, 2.0 * _SINC_HALF / fs)
    n_taps = int(np.ceil(fs * duration)) + _PAD
    radius = c * n_taps / fs

    betas = np.sqrt(1.0 - scene.surface_absorption)
    axes = []
    for ax in range(3):
        n_max = int(np.ceil((radius + scene.dims[ax]) / (2.0 * scene.dims[ax])))
        axes.append(_axis_images(scene.dims[ax], scene.source_pos[ax],
                                 n_max, betas[2 * ax], betas[2 * ax + 1]))
    (cx, gx), (cy, gy), (cz, gz) = axes

    taps = np.zeros((n_taps + 2 * _PAD, scene.n_mics))
    # chunk along the x-axis image list to bound peak memory
    n_yz = len(cy) * len(cz)
    step = max(1, _CHUNK // max(n_yz, 1))
    for start in range(0, len(cx), step):
        sl = slice(start, start + step)
        gain = (gx[sl, None, None] * gy[None, :, None] * gz[None, None, :]).ravel()
        px = np.broadcast_to(cx[sl, None, None], (len(cx[sl]), len(cy), len(cz))).ravel()
        py = np.broadcast_to(cy[None, :, None], (len(cx[sl]), len(cy), len(cz))).ravel()
        pz = np.broadcast_to(cz[None, None, :], (len(cx[sl]), len(cy), len(cz))).ravel()
        for m in range(scene.n_mics):
            dx = px - scene.mic_pos[m, 0]
            dy = py - scene.mic_pos[m, 1]
            dz = pz - scene.mic_pos[m, 2]
            dist = np.sqrt(dx * dx + dy * dy + dz * dz)
            delays = dist * fs / c
            keep = delays < n_taps - _SINC_HALF
            if not np.any(keep):
                continue
            amps = gain[keep] / (4.0 * np.pi * np.maximum(dist[keep], 1e-9))
            _windowed_sinc_scatter(taps[:, m], delays[keep], amps, _PAD)

    taps = taps[_PAD:_PAD + n_taps]
    if highpass_hz is not None and highpass_hz > 0:
        sos = butter(2, highpass_hz / (fs / 2.0), "highpass", output="sos")
        taps = sosfilt(sos, taps, axis=0)
    direct_index = np.rint(dists * fs / c).astype(np.int64)
    if not np.all(np.isfinite(taps)):
        raise NumericError("image method produced non-finite taps")
    return Rir(taps=taps, fs=fs, direct_index=direct_index)

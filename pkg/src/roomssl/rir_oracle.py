"""Ground-truth spatial acoustic parameters from RIRs and scene geometry.

These are the training labels and the independent oracles used by the test
suite, plus the classical GCC-PHAT baseline for time difference of arrival.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import EstimationError, InputError
from .scene_sim.rir import Rir
from .scene_sim.scene import RoomScene, wall_areas

DB_CLAMP = 40.0  # DRR / C50 are clamped to +-40 dB to keep labels finite
DIRECT_SPREAD_S = 2.5e-3
EARLY_LATE_SPLIT_S = 50e-3


@dataclass
class AcousticLabels:
    """Per-signal regression targets for the five downstream tasks."""

    tdoa_samples: float
    drr_db: float
    t60_s: float
    c50_db: float
    mean_abs: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    @staticmethod
    def from_dict(d: dict) -> "AcousticLabels":
        return AcousticLabels(**{k: float(d[k]) for k in
                                 ("tdoa_samples", "drr_db", "t60_s", "c50_db", "mean_abs")})


def tdoa_from_geometry(scene: RoomScene) -> float:
    """Direct-path TDOA in samples, channel 1 minus channel 2, un-rounded."""
    if scene.n_mics != 2:
        raise InputError("TDOA is defined for two-microphone scenes")
    d = np.linalg.norm(scene.mic_pos - scene.source_pos[None, :], axis=1)
    return float(scene.fs * (d[0] - d[1]) / scene.c)


def _energy_ratio_db(num: float, den: float) -> float:
    if den <= 0.0:
        return DB_CLAMP
    if num <= 0.0:
        return -DB_CLAMP
    return float(np.clip(10.0 * np.log10(num / den), -DB_CLAMP, DB_CLAMP))


def drr(rir: Rir, channel: int = 0, spread_ms: float = 2.5) -> float:
    """Direct-to-reverberant ratio in dB for one channel.

    Direct energy is integrated over ``direct_index +- round(fs*spread_ms)``
    (window inclusive); everything outside counts as reverberant.
    """
    h = rir.taps[:, channel]
    if not np.any(h):
        raise InputError("all-zero RIR")
    t_d = int(rir.direct_index[channel])
    half = int(round(rir.fs * spread_ms * 1e-3))
    lo = max(t_d - half, 0)
    hi = min(t_d + half, len(h) - 1)
    e = h**2
    direct = float(np.sum(e[lo:hi + 1]))
    rest = float(np.sum(e)) - direct
    return _energy_ratio_db(direct, rest)


def c50(rir: Rir, channel: int = 0) -> float:
    """Clarity index in dB: energy up to 50 ms past the direct arrival vs after.

    The boundary sample at ``direct_index + round(0.05*fs)`` belongs to the
    early part.
    """
    h = rir.taps[:, channel]
    if not np.any(h):
        raise InputError("all-zero RIR")
    split = int(rir.direct_index[channel]) + int(round(rir.fs * EARLY_LATE_SPLIT_S))
    e = h**2
    early = float(np.sum(e[:split + 1]))
    late = float(np.sum(e[split + 1:]))
    return _energy_ratio_db(early, late)


def t60_schroeder(rir: Rir, channel: int = 0) -> float:
    """Reverberation time via Schroeder backward integration and T20 fit.

    A line is fitted to the energy decay curve over its [-5, -25] dB span
    and extrapolated: T60 = -60 / slope (equivalently 3 x T20).

    Raises
    ------
    EstimationError
        If the decay curve offers less than the 20 dB span needed for the fit.
    """
    h = rir.taps[:, channel]
    energy = np.cumsum(h[::-1] ** 2)[::-1]
    total = energy[0]
    if total <= 0.0:
        raise InputError("all-zero RIR")
    with np.errstate(divide="ignore"):
        edc_db = 10.0 * np.log10(energy / total)

    above5 = np.where(edc_db > -5.0)[0]
    above25 = np.where(edc_db > -25.0)[0]
    i5 = above5[-1] + 1 if len(above5) else 0
    i25 = above25[-1] + 1 if len(above25) else 0
    if i25 >= len(edc_db) or i25 - i5 < 4:
        span = -float(edc_db[np.isfinite(edc_db)].min(initial=0.0))
        raise EstimationError(
            f"decay range insufficient for a T20 fit (usable span ~{span:.1f} dB)")

    t = np.arange(i5, i25) / rir.fs
    y = edc_db[i5:i25]
    slope, _ = np.polyfit(t, y, 1)
    if slope >= 0.0:
        raise EstimationError("energy decay curve is not decreasing")
    return float(-60.0 / slope)


def mean_absorption(scene: RoomScene) -> float:
    """Surface-area-weighted mean wall absorption coefficient."""
    areas = wall_areas(scene.dims)
    return float(np.sum(areas * scene.surface_absorption) / np.sum(areas))


def labels_for(scene: RoomScene, rir: Rir, channel: int = 0) -> AcousticLabels:
    """Bundle all five ground-truth parameters for one scene/RIR pair."""
    return AcousticLabels(
        tdoa_samples=tdoa_from_geometry(scene),
        drr_db=drr(rir, channel),
        t60_s=t60_schroeder(rir, channel),
        c50_db=c50(rir, channel),
        mean_abs=mean_absorption(scene),
    )


def gcc_phat_tdoa(signals: np.ndarray, fs: int, max_lag_samples: int) -> float:
    """TDOA estimate in samples from the PHAT-weighted cross-correlation.

    Returns the delay of channel 1 relative to channel 2 (positive when
    channel 1 arrives later), matching the sign convention of
    :func:`tdoa_from_geometry`.  The integer-lag peak within
    ``[-max_lag, max_lag]`` is refined by parabolic interpolation.
    """
    signals = np.asarray(signals, dtype=np.float64)
    if signals.ndim != 2 or signals.shape[1] != 2:
        raise InputError("expected a (T, 2) signal matrix")
    if not np.any(signals[:, 0]) or not np.any(signals[:, 1]):
        raise InputError("silent channel")

    n = 2 * signals.shape[0]
    spec1 = np.fft.rfft(signals[:, 0], n=n)
    spec2 = np.fft.rfft(signals[:, 1], n=n)
    cross = spec1 * np.conj(spec2)
    mag = np.abs(cross)
    cross /= np.maximum(mag, 1e-12 * mag.max() + 1e-30)
    cc = np.fft.irfft(cross, n=n)

    max_lag = int(min(max_lag_samples, n // 2 - 1))
    lags = np.arange(-max_lag, max_lag + 1)
    cc = np.concatenate([cc[-max_lag:], cc[:max_lag + 1]])

    peak = int(np.argmax(cc))
    # parabolic sub-sample refinement around the integer peak
    if 0 < peak < len(cc) - 1:
        y0, y1, y2 = cc[peak - 1], cc[peak], cc[peak + 1]
        denom = y0 - 2.0 * y1 + y2
        if abs(denom) > 1e-12:
            peak_frac = 0.5 * (y0 - y2) / denom
            peak_frac = float(np.clip(peak_frac, -0.5, 0.5))
        else:
            peak_frac = 0.0
    else:
        peak_frac = 0.0
    return float(lags[peak] + peak_frac)

"""Room descriptions and the random scene sampler.

Wall ordering convention used everywhere in this package:
``(x=0, x=Lx, y=0, y=Ly, z=0 floor, z=Lz ceiling)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigurationError, GeometryError

SPEED_OF_SOUND = 343.0

# Eyring constant 24*ln(10)/c for c = 343 m/s, i.e. T60 = K*V / (-S*ln(1-a)).
_EYRING_K = 24.0 * np.log(10.0) / SPEED_OF_SOUND


@dataclass
class RoomScene:
    """Cuboid room with one source and M microphones: the physical ground truth."""

    dims: np.ndarray            # (3,) room size in meters
    surface_absorption: np.ndarray  # (6,) absorption per wall, in [0, 1]
    source_pos: np.ndarray      # (3,) meters
    mic_pos: np.ndarray         # (M, 3) meters
    fs: int = 16000
    c: float = SPEED_OF_SOUND

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=np.float64)
        self.surface_absorption = np.asarray(self.surface_absorption, dtype=np.float64)
        self.source_pos = np.asarray(self.source_pos, dtype=np.float64)
        self.mic_pos = np.atleast_2d(np.asarray(self.mic_pos, dtype=np.float64))
        self.validate()

    @property
    def n_mics(self) -> int:
        return self.mic_pos.shape[0]

    def validate(self) -> None:
        if self.dims.shape != (3,) or np.any(self.dims <= 0):
            raise GeometryError(f"room dims must be 3 positive lengths, got {self.dims}")
        if self.surface_absorption.shape != (6,):
            raise GeometryError("expected 6 wall absorption coefficients")
        if np.any(self.surface_absorption < 0) or np.any(self.surface_absorption > 1):
            raise GeometryError("absorption coefficients must lie in [0, 1]")
        for name, pos in [("source", self.source_pos[None, :]), ("mic", self.mic_pos)]:
            if np.any(pos <= 0) or np.any(pos >= self.dims[None, :]):
                raise GeometryError(f"{name} position(s) not strictly inside the room")


def wall_areas(dims: np.ndarray) -> np.ndarray:
    """Areas of the six walls in the package wall order."""
    lx, ly, lz = dims
    return np.array([ly * lz, ly * lz, lx * lz, lx * lz, lx * ly, lx * ly])


def eyring_mean_absorption(dims: np.ndarray, t60: float) -> float:
    """Mean absorption that realizes a target T60 in a cuboid, via Eyring.

    More accurate than Sabine when absorption is high; the two agree as
    absorption tends to zero.
    """
    dims = np.asarray(dims, dtype=np.float64)
    if t60 <= 0:
        raise ConfigurationError("target T60 must be positive")
    volume = float(np.prod(dims))
    surface = float(np.sum(wall_areas(dims)))
    return float(1.0 - np.exp(-_EYRING_K * volume / (surface * t60)))


def eyring_t60(dims: np.ndarray, surface_absorption: np.ndarray) -> float:
    """Eyring-predicted T60 from per-wall absorptions (area-weighted mean)."""
    dims = np.asarray(dims, dtype=np.float64)
    areas = wall_areas(dims)
    mean_abs = float(np.sum(areas * surface_absorption) / np.sum(areas))
    if mean_abs >= 1.0:
        return 0.0
    if mean_abs <= 0.0:
        return np.inf
    volume = float(np.prod(dims))
    return _EYRING_K * volume / (-np.sum(areas).item() * np.log(1.0 - mean_abs))


# ---------------------------------------------------------------------------
# Image-method decay model.
#
# With angle-independent reflection coefficients, the image at distance r in
# direction u has picked up about r*|u_i|/L_i reflections per axis, so the
# shell energy decays as <exp(-r * sum_i g_i |u_i| / L_i)> averaged over the
# sphere, with g_i = -(ln(1-a_lo) + ln(1-a_hi))/2 per axis.  Averaging the
# exponential (rather than exponentiating the average, which is Eyring's
# diffuse-field assumption) makes the late decay distinctly slower, so a
# plain Eyring conversion misses measured T60 by ~50%.  The conversion below
# instead matches the exact measurement protocol of the T60 oracle: a line
# fit to the modeled energy decay curve over its [-5, -25] dB span.
# ---------------------------------------------------------------------------

_QUAD_NODES = 24


@lru_cache(maxsize=4096)
def _octant_quadrature(n: int):
    """Gauss-Legendre nodes over one direction octant (|u_i| symmetric)."""
    x, wx = np.polynomial.legendre.leggauss(n)
    cos_t = 0.5 * (x + 1.0)          # cos(theta) in (0, 1)
    w_cos = 0.5 * wx
    phi = 0.25 * np.pi * (x + 1.0)   # phi in (0, pi/2)
    w_phi = 0.25 * np.pi * wx
    sin_t = np.sqrt(1.0 - cos_t**2)
    ux = np.outer(sin_t, np.cos(phi)).ravel()
    uy = np.outer(sin_t, np.sin(phi)).ravel()
    uz = np.repeat(cos_t, n)
    w = np.outer(w_cos, w_phi).ravel()
    return ux, uy, uz, w


def _t20_t60_of_decay(dims: tuple, g_axes: tuple, c: float = SPEED_OF_SOUND) -> float:
    """T60 that the T20-fit oracle would report for the modeled ISM decay."""
    ux, uy, uz, w = _octant_quadrature(_QUAD_NODES)
    kappa = c * (g_axes[0] * ux / dims[0] + g_axes[1] * uy / dims[1]
                 + g_axes[2] * uz / dims[2])
    # energy decay curve: integral over time of the shell power
    t_max = 2.0 / np.min(kappa)
    for _ in range(60):
        t = np.linspace(0.0, t_max, 1200)
        edc = np.sum((w / kappa)[None, :] * np.exp(-np.outer(t, kappa)), axis=1)
        edc_db = 10.0 * np.log10(edc / edc[0])
        if edc_db[-1] < -28.0:
            break
        t_max *= 2.0
    # fit exactly the way the T60 oracle does: least squares on the
    # uniformly sampled decay curve over its [-5, -25] dB span
    sel = (edc_db <= -5.0) & (edc_db > -25.0)
    slope, _ = np.polyfit(t[sel], edc_db[sel], 1)
    return float(-60.0 / slope)


@lru_cache(maxsize=4096)
def _unit_t20_t60(dims_key: tuple) -> float:
    return _t20_t60_of_decay(dims_key, (1.0, 1.0, 1.0))


def absorption_for_t60(dims, t60: float) -> float:
    """Mean wall absorption for which simulated RIRs measure ``t60``.

    Calibrated against the image-method decay model and the T20-fit
    measurement protocol; for a uniform coefficient the crossing times scale
    exactly as 1/g with g = -ln(1-a), so one curve evaluation per room
    geometry suffices.
    """
    if t60 <= 0:
        raise ConfigurationError("target T60 must be positive")
    dims = np.asarray(dims, dtype=np.float64)
    key = tuple(round(float(d), 9) for d in dims)
    g = _unit_t20_t60(key) / t60
    return float(1.0 - np.exp(-min(g, 7.0)))


def ism_t60_estimate(dims, surface_absorption) -> float:
    """Forward decay model: the T60 a simulated RIR of this room measures as."""
    dims = np.asarray(dims, dtype=np.float64)
    a = np.clip(np.asarray(surface_absorption, dtype=np.float64), 0.0, 0.999999)
    if np.all(a >= 0.999999):
        return 0.0
    g_axes = tuple(
        -0.5 * (np.log(1.0 - a[2 * i]) + np.log(1.0 - a[2 * i + 1])) for i in range(3)
    )
    if min(g_axes) <= 0.0 and max(g_axes) <= 0.0:
        return np.inf
    key = tuple(round(float(d), 9) for d in dims)
    return _t20_t60_of_decay(key, g_axes)


@dataclass
class SceneSamplerConfig:
    """Ranges for the random scene generator."""

    room_size_min: tuple = (3.0, 3.0, 2.5)
    room_size_max: tuple = (15.0, 10.0, 6.0)
    t60_range: tuple = (0.2, 1.3)
    snr_db_range: tuple = (15.0, 30.0)
    aperture_range: tuple = (0.03, 0.20)
    array_center_margin_lo: tuple = (0.2, 0.2, 0.1)
    array_center_margin_hi: tuple = (0.8, 0.8, 0.5)
    min_source_dist: float = 0.3
    wall_ratio_spread: float = 0.8  # per-wall absorption ratios ~ U(1-s, 1+s)
    fs: int = 16000
    c: float = SPEED_OF_SOUND
    seed: int = 0

    def __post_init__(self):
        lo = np.asarray(self.room_size_min, dtype=np.float64)
        hi = np.asarray(self.room_size_max, dtype=np.float64)
        if lo.shape != (3,) or hi.shape != (3,) or np.any(hi < lo) or np.any(lo <= 0):
            raise ConfigurationError("invalid room size range")
        for name, rng_ in [("t60_range", self.t60_range),
                           ("snr_db_range", self.snr_db_range),
                           ("aperture_range", self.aperture_range)]:
            if len(rng_) != 2 or rng_[1] < rng_[0]:
                raise ConfigurationError(f"invalid {name}: {rng_}")
        if self.t60_range[0] <= 0:
            raise ConfigurationError("T60 range must be positive")
        mlo = np.asarray(self.array_center_margin_lo)
        mhi = np.asarray(self.array_center_margin_hi)
        if np.any(mlo <= 0) or np.any(mhi >= 1) or np.any(mhi <= mlo):
            raise ConfigurationError("margins must satisfy 0 < lo < hi < 1 per axis")
        if not 0.0 < self.wall_ratio_spread < 1.0:
            raise ConfigurationError("wall_ratio_spread must be in (0, 1)")
        if self.min_source_dist < 0:
            raise ConfigurationError("min_source_dist must be non-negative")


def _per_wall_absorption(dims, mean_abs, spread, rng):
    """Per-wall coefficients with random ratios, renormalized so the
    area-weighted mean hits ``mean_abs`` (up to clipping at the ends)."""
    areas = wall_areas(dims)
    ratios = rng.uniform(1.0 - spread, 1.0 + spread, size=6)
    alphas = mean_abs * ratios
    for _ in range(30):
        scale = mean_abs * np.sum(areas) / np.sum(areas * alphas)
        alphas = np.clip(alphas * scale, 1e-4, 0.999)
        if abs(np.sum(areas * alphas) / np.sum(areas) - mean_abs) < 1e-10:
            break
    return alphas


def sample_scene(cfg: SceneSamplerConfig, rng: np.random.Generator | None = None) -> RoomScene:
    """Draw a random two-microphone scene satisfying the placement constraints.

    Draw order is fixed, so a given (config, rng state) always produces the
    same scene.  Raises ConfigurationError if the constraints cannot be
    satisfied after many attempts.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    dims = rng.uniform(cfg.room_size_min, cfg.room_size_max)
    t60 = rng.uniform(*cfg.t60_range)
    mean_abs = absorption_for_t60(dims, t60)
    absorption = _per_wall_absorption(dims, mean_abs, cfg.wall_ratio_spread, rng)

    aperture = rng.uniform(*cfg.aperture_range)
    lo = np.asarray(cfg.array_center_margin_lo) * dims
    hi = np.asarray(cfg.array_center_margin_hi) * dims
    center = rng.uniform(lo, hi)
    azimuth = rng.uniform(0.0, 2.0 * np.pi)
    offset = 0.5 * aperture * np.array([np.cos(azimuth), np.sin(azimuth), 0.0])
    mic_pos = np.stack([center + offset, center - offset])
    if np.any(mic_pos <= 0) or np.any(mic_pos >= dims):
        raise ConfigurationError("array margins leave no room for the aperture")

    margin = cfg.min_source_dist
    if np.any(dims <= 2 * margin):
        raise ConfigurationError("room too small for the source wall margin")
    source = None
    for _ in range(1000):
        cand = rng.uniform(margin, dims - margin)
        if np.linalg.norm(cand - center) >= cfg.min_source_dist:
            source = cand
            break
    if source is None:
        raise ConfigurationError("could not place source within constraints")

    return RoomScene(
        dims=dims,
        surface_absorption=absorption,
        source_pos=source,
        mic_pos=mic_pos,
        fs=cfg.fs,
        c=cfg.c,
    )

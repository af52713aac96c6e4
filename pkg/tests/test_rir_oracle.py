import numpy as np
import pytest

from roomssl.errors import EstimationError, InputError
from roomssl.rir_oracle import (
    c50,
    drr,
    gcc_phat_tdoa,
    labels_for,
    mean_absorption,
    t60_schroeder,
    tdoa_from_geometry,
)
from roomssl.scene_sim import RoomScene, Rir, absorption_for_t60, simulate_rir

FS = 16000


def make_scene(mic_pos, source=(5.0, 5.0, 1.5), dims=(10.0, 10.0, 3.0), absorption=0.3):
    return RoomScene(dims=dims, surface_absorption=[absorption] * 6,
                     source_pos=source, mic_pos=mic_pos, fs=FS)


def pulse_rir(positions_amps, length=4000, direct=None, channels=1):
    taps = np.zeros((length, channels))
    for pos, amp in positions_amps:
        taps[pos, 0] = amp
    d = direct if direct is not None else positions_amps[0][0]
    return Rir(taps=taps, fs=FS, direct_index=[d] * channels)


# --- TDOA from geometry ----------------------------------------------------

def test_tdoa_equidistant_is_zero():
    scene = make_scene([(5.0, 4.0, 1.5), (5.0, 6.0, 1.5)])
    assert tdoa_from_geometry(scene) == 0.0


def test_tdoa_hand_value():
    # d1 = 1.343 m, d2 = 1.0 m -> 16000 * 0.343 / 343 = 16 samples
    scene = make_scene([(5.0 + 1.343, 5.0, 1.5), (5.0 - 1.0, 5.0, 1.5)])
    assert tdoa_from_geometry(scene) == pytest.approx(16.0, abs=1e-9)


def test_tdoa_antisymmetry():
    scene = make_scene([(5.9, 5.2, 1.5), (4.6, 4.8, 1.4)])
    swapped = make_scene([(4.6, 4.8, 1.4), (5.9, 5.2, 1.5)])
    assert tdoa_from_geometry(swapped) == pytest.approx(-tdoa_from_geometry(scene), abs=1e-12)


# --- DRR ---------------------------------------------------------------------

def test_drr_single_pulse_clamps():
    assert drr(pulse_rir([(100, 1.0)])) == 40.0


def test_drr_equal_energy_outside_window():
    half = round(FS * 2.5e-3)  # 40 samples
    rir = pulse_rir([(100, 1.0), (100 + half + 1, 1.0)])
    assert drr(rir) == pytest.approx(0.0, abs=1e-12)


def test_drr_hand_value():
    rir = pulse_rir([(100, 1.0), (600, 0.5)])
    assert drr(rir) == pytest.approx(10 * np.log10(1.0 / 0.25), abs=1e-9)


def test_drr_scale_invariance_and_zero_error():
    rir = pulse_rir([(100, 1.0), (600, 0.5)])
    scaled = Rir(taps=7.3 * rir.taps, fs=FS, direct_index=rir.direct_index)
    assert drr(scaled) == pytest.approx(drr(rir), abs=1e-12)
    with pytest.raises(InputError):
        drr(pulse_rir([(100, 0.0)]))


# --- C50 ---------------------------------------------------------------------

def test_c50_all_early_clamps():
    rir = pulse_rir([(100, 1.0), (400, 0.5)])  # 50 ms = 800 samples
    assert c50(rir) == 40.0


def test_c50_hand_value():
    split = 100 + round(FS * 0.05)
    rir = pulse_rir([(100, np.sqrt(0.8)), (split + 200, np.sqrt(0.2))], length=4000)
    assert c50(rir) == pytest.approx(10 * np.log10(4.0), abs=1e-9)


def test_c50_translation_invariance():
    rir = pulse_rir([(100, 1.0), (1000, 0.4), (2000, 0.2)], length=4000)
    shifted_taps = np.zeros((4300, 1))
    shifted_taps[300:4300] = rir.taps
    shifted = Rir(taps=shifted_taps, fs=FS, direct_index=[400])
    assert c50(shifted) == pytest.approx(c50(rir), abs=1e-12)


# --- T60 ---------------------------------------------------------------------

def test_t60_synthetic_exponential():
    rng = np.random.default_rng(7)
    t = np.arange(int(1.2 * FS)) / FS
    h = np.exp(-6.91 * t / 0.4) * rng.standard_normal(len(t))
    rir = Rir(taps=h, fs=FS, direct_index=[0])
    assert t60_schroeder(rir) == pytest.approx(0.4, rel=0.05)


def test_t60_scale_invariance():
    rng = np.random.default_rng(8)
    t = np.arange(FS) / FS
    h = np.exp(-6.91 * t / 0.3) * rng.standard_normal(len(t))
    rir = Rir(taps=h, fs=FS, direct_index=[0])
    scaled = Rir(taps=-2.5 * h, fs=FS, direct_index=[0])
    assert t60_schroeder(scaled) == pytest.approx(t60_schroeder(rir), rel=1e-9)


def test_t60_single_pulse_raises():
    with pytest.raises(EstimationError):
        t60_schroeder(pulse_rir([(100, 1.0)]))


def test_t60_cross_module_simulated_rir():
    target = 0.8
    a = absorption_for_t60((6.0, 5.0, 3.0), target)
    scene = RoomScene(dims=(6.0, 5.0, 3.0), surface_absorption=[a] * 6,
                      source_pos=(1.5, 1.2, 1.4), mic_pos=[(4.0, 3.5, 1.6), (4.1, 3.5, 1.6)],
                      fs=FS)
    rir = simulate_rir(scene)
    assert t60_schroeder(rir) == pytest.approx(target, rel=0.20)


# --- mean absorption ---------------------------------------------------------

def test_mean_absorption_uniform():
    scene = make_scene([(5.0, 4.0, 1.5), (5.0, 6.0, 1.5)], absorption=0.3)
    assert mean_absorption(scene) == pytest.approx(0.3, abs=1e-12)


def test_mean_absorption_cube_hand_value():
    scene = RoomScene(dims=(2.0, 2.0, 2.0),
                      surface_absorption=[0.1, 0.1, 0.2, 0.2, 0.3, 0.3],
                      source_pos=(1.0, 1.0, 0.8), mic_pos=[(0.5, 0.5, 1.0)], fs=FS)
    assert mean_absorption(scene) == pytest.approx(0.2, abs=1e-12)


def test_mean_absorption_cube_permutation_invariance():
    base = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35]
    vals = set()
    for perm in ([0, 1, 2, 3, 4, 5], [5, 4, 3, 2, 1, 0], [2, 0, 4, 1, 5, 3]):
        scene = RoomScene(dims=(2.0, 2.0, 2.0),
                          surface_absorption=[base[i] for i in perm],
                          source_pos=(1.0, 1.0, 0.8), mic_pos=[(0.5, 0.5, 1.0)], fs=FS)
        vals.add(round(mean_absorption(scene), 14))
    assert len(vals) == 1


# --- GCC-PHAT ----------------------------------------------------------------

def test_gcc_phat_pure_delay():
    rng = np.random.default_rng(11)
    x = rng.standard_normal(8000)
    sig = np.zeros((8000, 2))
    sig[:, 0] = x
    sig[5:, 1] = x[:-5]  # channel 2 lags channel 1 by 5 samples
    # channel 1 arrives first, so the channel-1-minus-channel-2 delay is -5
    assert gcc_phat_tdoa(sig, FS, max_lag_samples=32) == pytest.approx(-5.0, abs=0.1)


def test_gcc_phat_identical_channels():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(4000)
    sig = np.stack([x, x], axis=1)
    assert gcc_phat_tdoa(sig, FS, max_lag_samples=16) == pytest.approx(0.0, abs=1e-6)


def test_gcc_phat_silent_channel_raises():
    sig = np.zeros((1000, 2))
    sig[:, 0] = 1.0
    with pytest.raises(InputError):
        gcc_phat_tdoa(sig, FS, max_lag_samples=8)


def test_gcc_phat_matches_geometry_on_anechoic_scenes():
    rng = np.random.default_rng(13)
    from roomssl.scene_sim import synthesize_mixture
    errors = []
    for _ in range(10):
        mic_c = np.array([5.0, 5.0, 1.5]) + rng.uniform(-1, 1, 3) * [1.0, 1.0, 0.2]
        ap = rng.uniform(0.05, 0.2)
        th = rng.uniform(0, 2 * np.pi)
        off = 0.5 * ap * np.array([np.cos(th), np.sin(th), 0.0])
        src = mic_c + rng.uniform(-1, 1, 3) * [2.5, 2.5, 0.5]
        scene = RoomScene(dims=(10, 10, 3), surface_absorption=[1.0] * 6,
                          source_pos=src, mic_pos=[mic_c + off, mic_c - off], fs=FS)
        rir = simulate_rir(scene)
        mix = synthesize_mixture(rir, rng.standard_normal(FS // 2))
        max_lag = int(np.ceil(FS * ap / 343.0)) + 2
        est = gcc_phat_tdoa(mix, FS, max_lag_samples=max_lag)
        errors.append(abs(est - tdoa_from_geometry(scene)))
    assert np.mean(errors) <= 1.0
    assert max(errors) <= 1.0


def test_labels_bundle_finite():
    a = absorption_for_t60((5.0, 4.0, 3.0), 0.4)
    scene = RoomScene(dims=(5.0, 4.0, 3.0), surface_absorption=[a] * 6,
                      source_pos=(1.5, 1.2, 1.4), mic_pos=[(3.5, 2.8, 1.6), (3.6, 2.8, 1.6)],
                      fs=FS)
    rir = simulate_rir(scene)
    labels = labels_for(scene, rir)
    d = labels.to_dict()
    assert all(np.isfinite(v) for v in d.values())
    assert 0.0 < labels.mean_abs < 1.0
    assert labels.t60_s > 0.0

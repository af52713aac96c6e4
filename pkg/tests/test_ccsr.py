import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roomssl.ccsr import (
    FRAME_WISE,
    PATCH_WISE,
    MaskPlan,
    apply_spatial_mask,
    apply_spectral_mask,
    apply_target_mask,
    reconstruction_loss,
    sample_mask,
)
from roomssl.errors import ConfigurationError, InputError
from roomssl.tf_frontend import Spectrogram

RNG = np.random.default_rng(202)


def random_spec(n_freq=32, n_frames=16, seed=0):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n_freq, n_frames, 2)) + 1j * rng.standard_normal(
        (n_freq, n_frames, 2))
    return Spectrogram(data=data, fs=16000)


def test_masked_frame_counts_at_table_rates():
    for rate, expected in [(0.25, 64), (0.5, 128), (0.75, 192)]:
        plan = sample_mask(256, 256, rate, FRAME_WISE, np.random.default_rng(1))
        assert plan.n_masked_units == expected


@settings(max_examples=60, deadline=None)
@given(rate=st.floats(min_value=0.01, max_value=0.99))
def test_masked_count_is_rounded_rate(rate):
    n = 256
    expected = int(round(rate * n))
    if expected in (0, n):
        with pytest.raises(ConfigurationError):
            sample_mask(n, 256, rate, FRAME_WISE, np.random.default_rng(0))
    else:
        plan = sample_mask(n, 256, rate, FRAME_WISE, np.random.default_rng(0))
        assert plan.n_masked_units == expected
        # frame-wise masks are frequency-uniform by construction
        tf = plan.tf_mask(64, n)
        assert np.all(tf == tf[0:1, :])


def test_patch_mask_grid_counts():
    plan = sample_mask(256, 256, 0.5, PATCH_WISE, np.random.default_rng(2))
    assert plan.mask.shape == (16, 16)
    assert plan.n_masked_units == 128
    tf = plan.tf_mask(256, 256)
    assert tf.shape == (256, 256)
    assert np.sum(tf == 0) == 128 * 16 * 16


def test_masked_channel_takes_both_values():
    rng = np.random.default_rng(3)
    seen = {sample_mask(64, 32, 0.5, FRAME_WISE, rng).masked_channel for _ in range(40)}
    assert seen == {1, 2}


def test_invalid_rates_and_kind():
    with pytest.raises(ConfigurationError):
        sample_mask(256, 256, 0.0, FRAME_WISE, np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        sample_mask(256, 256, 1.0, FRAME_WISE, np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        sample_mask(256, 256, 0.5, "checker", np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        sample_mask(250, 255, 0.5, PATCH_WISE, np.random.default_rng(0))


def test_target_mask_zeroes_only_masked_channel():
    spec = random_spec(seed=4)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.5, FRAME_WISE, np.random.default_rng(4))
    out = apply_target_mask(spec, plan)
    ch = plan.masked_channel - 1
    other = 1 - ch
    masked_frames = plan.mask == 0
    assert np.all(out.data[:, masked_frames, ch] == 0)
    assert np.array_equal(out.data[:, ~masked_frames, ch], spec.data[:, ~masked_frames, ch])
    assert np.array_equal(out.data[:, :, other], spec.data[:, :, other])


def test_spatial_mask_hides_masked_frames_in_both_channels():
    spec = random_spec(seed=5)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.5, FRAME_WISE, np.random.default_rng(5))
    out = apply_spatial_mask(spec, plan)
    masked_frames = plan.mask == 0
    assert np.all(out.data[:, masked_frames, :] == 0)
    assert np.array_equal(out.data[:, ~masked_frames, :], spec.data[:, ~masked_frames, :])
    # composing with the target mask changes nothing further
    composed = apply_spatial_mask(apply_target_mask(spec, plan), plan)
    assert np.array_equal(composed.data, out.data)


def test_spectral_mask_has_disjoint_supports():
    spec = random_spec(seed=6)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.5, FRAME_WISE, np.random.default_rng(6))
    out = apply_spectral_mask(spec, plan)
    nz = out.data != 0
    assert not np.any(nz[:, :, 0] & nz[:, :, 1])
    # every frame is visible in exactly one channel (input is dense)
    assert np.all(nz[:, :, 0] | nz[:, :, 1])


def test_spectral_mask_patch_wise_supports():
    spec = random_spec(n_freq=32, n_frames=32, seed=7)
    plan = sample_mask(32, 32, 0.5, PATCH_WISE, np.random.default_rng(7))
    out = apply_spectral_mask(spec, plan)
    nz = out.data != 0
    assert not np.any(nz[:, :, 0] & nz[:, :, 1])
    assert np.all(nz[:, :, 0] | nz[:, :, 1])


def test_loss_zero_for_perfect_prediction():
    spec = random_spec(seed=8)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.5, FRAME_WISE, np.random.default_rng(8))
    assert reconstruction_loss(spec, spec, plan) == 0.0


def test_loss_hand_value():
    # one masked frame, F = 2: errors (1 + 0i) and (0 + 2i) -> (1 + 4) / 2 = 2.5
    target = Spectrogram(data=np.zeros((2, 3, 2), dtype=complex), fs=16000)
    pred = Spectrogram(data=np.zeros((2, 3, 2), dtype=complex), fs=16000)
    pred.data[0, 1, 0] = -1.0
    pred.data[1, 1, 0] = 2.0j
    plan = MaskPlan(kind=FRAME_WISE, masked_channel=1,
                    mask=np.array([1, 0, 1], dtype=np.int8), rate=1 / 3)
    assert reconstruction_loss(target, pred, plan) == 2.5


def test_loss_ignores_errors_outside_masked_support():
    spec = random_spec(seed=9)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.25, FRAME_WISE, np.random.default_rng(9))
    pred = Spectrogram(data=spec.data.copy(), fs=16000)
    kept = plan.mask == 1
    pred.data[:, kept, :] += 7.0 - 3.0j          # corrupt only unmasked frames
    pred.data[:, :, 2 - plan.masked_channel] += 1.0j  # corrupt the other channel everywhere
    assert reconstruction_loss(spec, pred, plan) == 0.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_loss_invariant_to_out_of_support_perturbations(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(seed=seed)
    plan = sample_mask(spec.n_frames, spec.n_freq, 0.5, FRAME_WISE, rng)
    pred = Spectrogram(data=spec.data + (0.1 + 0.2j), fs=16000)
    base = reconstruction_loss(spec, pred, plan)
    pred2 = Spectrogram(data=pred.data.copy(), fs=16000)
    pred2.data[:, plan.mask == 1, :] += rng.standard_normal((spec.n_freq, 1, 2))
    assert reconstruction_loss(spec, pred2, plan) == base


def test_empty_mask_raises():
    spec = random_spec(seed=10)
    plan = MaskPlan(kind=FRAME_WISE, masked_channel=1,
                    mask=np.ones(spec.n_frames, dtype=np.int8), rate=0.5)
    with pytest.raises(InputError):
        reconstruction_loss(spec, spec, plan)


def test_shape_mismatch_raises():
    spec = random_spec(seed=11)
    plan = MaskPlan(kind=FRAME_WISE, masked_channel=1,
                    mask=np.zeros(99, dtype=np.int8), rate=0.5)
    with pytest.raises(InputError):
        apply_target_mask(spec, plan)

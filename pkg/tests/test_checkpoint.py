import numpy as np
import pytest
import torch

from roomssl.errors import InputError
from roomssl.model import (
    Checkpoint,
    DownstreamModelConfig,
    ParamTensor,
    build_downstream_model,
    checkpoint_from_module,
    config_fingerprint,
    load_checkpoint,
    load_into_module,
    save_checkpoint,
)
from tests.test_model import tiny_encoder_cfg


def tiny_model(seed=0):
    cfg = DownstreamModelConfig(n_freq=16, n_mics=2, encoder=tiny_encoder_cfg())
    return cfg, build_downstream_model(cfg, seed=seed)


def test_checkpoint_file_round_trip_is_byte_identical(tmp_path):
    cfg, model = tiny_model(seed=1)
    ckpt = checkpoint_from_module(model, config_fingerprint(cfg), step=17,
                                  rng_state=b"rng-blob")
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(p1, ckpt)
    back = load_checkpoint(p1)
    save_checkpoint(p2, back)
    assert p1.read_bytes() == p2.read_bytes()
    assert back.step == 17
    assert back.rng_state == b"rng-blob"
    assert back.config_fingerprint == config_fingerprint(cfg)
    for name, arr in ckpt.tensors.items():
        assert np.array_equal(back.tensors[name], arr)


def test_checkpoint_restores_bit_identical_forward(tmp_path):
    cfg, model = tiny_model(seed=2)
    model.eval()
    x = torch.randn(2, 4, 16, 6)
    with torch.no_grad():
        before = model(x)
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, checkpoint_from_module(model, config_fingerprint(cfg)))

    _, fresh = tiny_model(seed=99)  # different random init
    fresh.eval()
    load_into_module(fresh, load_checkpoint(path))
    with torch.no_grad():
        after = fresh(x)
    assert torch.equal(before, after)


def test_fingerprint_mismatch_raises(tmp_path):
    cfg, model = tiny_model(seed=3)
    ckpt = checkpoint_from_module(model, config_fingerprint(cfg))
    with pytest.raises(InputError):
        load_into_module(model, ckpt, expected_fingerprint="deadbeef00000000")


def test_missing_tensor_and_shape_mismatch_raise():
    cfg, model = tiny_model(seed=4)
    ckpt = checkpoint_from_module(model, "")
    some_key = sorted(ckpt.tensors)[0]
    broken = Checkpoint(tensors={k: v for k, v in ckpt.tensors.items() if k != some_key})
    with pytest.raises(InputError):
        load_into_module(model, broken)
    wrong = Checkpoint(tensors={**ckpt.tensors, some_key: np.zeros((1, 1), np.float32)})
    with pytest.raises(InputError):
        load_into_module(model, wrong)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.ckpt"
    path.write_bytes(b"NOTACKPT" + b"\x00" * 32)
    with pytest.raises(InputError):
        load_checkpoint(path)


def test_param_tensor_grad_shape_checked():
    with pytest.raises(InputError):
        ParamTensor(name="w", values=np.zeros((2, 2)), grad=np.zeros(3))
    pt = ParamTensor(name="w", values=np.zeros((2, 2)), grad=np.ones((2, 2)))
    assert pt.values.dtype == np.float32


def test_extra_tensors_survive_round_trip(tmp_path):
    cfg, model = tiny_model(seed=5)
    ckpt = checkpoint_from_module(model, config_fingerprint(cfg),
                                  extra_tensors={"optim/step": np.array([3.0])})
    path = tmp_path / "o.ckpt"
    save_checkpoint(path, ckpt)
    back = load_checkpoint(path)
    assert back.tensors["optim/step"][0] == 3.0

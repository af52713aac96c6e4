"""Versioned binary checkpoints: named float-32 tensors, little-endian.

Layout::

    magic "RSCKPT01" | u32 version | u32 len + fingerprint utf-8
    | u64 step | u32 len + rng-state blob | u32 tensor count
    | per tensor: u32 len + name | u8 dtype (0 = f32) | u8 ndim
                  | ndim x u32 shape | u64 payload bytes | payload

Integer buffers that do not affect the forward pass (BatchNorm's
``num_batches_tracked``) are not stored.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import InputError

_MAGIC = b"RSCKPT01"
_VERSION = 1
_DTYPE_F32 = 0

_SKIP_SUFFIX = "num_batches_tracked"


@dataclass
class ParamTensor:
    """A named, shaped parameter with an optional gradient of the same shape."""

    name: str
    values: np.ndarray
    grad: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.grad is not None:
            self.grad = np.asarray(self.grad, dtype=np.float32)
            if self.grad.shape != self.values.shape:
                raise InputError(f"grad shape mismatch for {self.name}")


@dataclass
class Checkpoint:
    """Named tensor map with config fingerprint, step, and RNG state."""

    tensors: dict[str, np.ndarray]
    config_fingerprint: str = ""
    step: int = 0
    rng_state: bytes = b""
    meta: dict = field(default_factory=dict)  # in-memory only, not serialized

    def named_params(self) -> list[ParamTensor]:
        return [ParamTensor(name=k, values=v) for k, v in self.tensors.items()]


def save_checkpoint(path, ckpt: Checkpoint) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fp = ckpt.config_fingerprint.encode()
        fh.write(struct.pack("<I", len(fp)))
        fh.write(fp)
        fh.write(struct.pack("<Q", int(ckpt.step)))
        fh.write(struct.pack("<I", len(ckpt.rng_state)))
        fh.write(ckpt.rng_state)
        fh.write(struct.pack("<I", len(ckpt.tensors)))
        for name in sorted(ckpt.tensors):
            arr = np.ascontiguousarray(ckpt.tensors[name], dtype="<f4")
            nm = name.encode()
            fh.write(struct.pack("<I", len(nm)))
            fh.write(nm)
            fh.write(struct.pack("<BB", _DTYPE_F32, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(struct.pack("<Q", arr.nbytes))
            fh.write(arr.tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise InputError(f"not a checkpoint file: {path}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise InputError(f"unsupported checkpoint version {version}")
        (fp_len,) = struct.unpack("<I", fh.read(4))
        fingerprint = fh.read(fp_len).decode()
        (step,) = struct.unpack("<Q", fh.read(8))
        (rng_len,) = struct.unpack("<I", fh.read(4))
        rng_state = fh.read(rng_len)
        (count,) = struct.unpack("<I", fh.read(4))
        tensors = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<I", fh.read(4))
            name = fh.read(name_len).decode()
            dtype, ndim = struct.unpack("<BB", fh.read(2))
            if dtype != _DTYPE_F32:
                raise InputError(f"unknown dtype code {dtype} for tensor {name}")
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            (nbytes,) = struct.unpack("<Q", fh.read(8))
            arr = np.frombuffer(fh.read(nbytes), dtype="<f4").reshape(shape)
            tensors[name] = arr.copy()
    return Checkpoint(tensors=tensors, config_fingerprint=fingerprint,
                      step=step, rng_state=rng_state)


def checkpoint_from_module(
    module: torch.nn.Module,
    config_fingerprint: str = "",
    step: int = 0,
    rng_state: bytes = b"",
    extra_tensors: dict[str, np.ndarray] | None = None,
) -> Checkpoint:
    """Snapshot parameters and float buffers of a module."""
    tensors = {}
    for name, tensor in module.state_dict().items():
        if name.endswith(_SKIP_SUFFIX):
            continue
        tensors[name] = tensor.detach().cpu().numpy().astype(np.float32)
    if extra_tensors:
        for name, arr in extra_tensors.items():
            tensors[name] = np.asarray(arr, dtype=np.float32)
    return Checkpoint(tensors=tensors, config_fingerprint=config_fingerprint,
                      step=step, rng_state=rng_state)


def load_into_module(module: torch.nn.Module, ckpt: Checkpoint,
                     expected_fingerprint: str | None = None,
                     prefix: str = "") -> None:
    """Restore module tensors from a checkpoint (extra names are ignored)."""
    if expected_fingerprint is not None and ckpt.config_fingerprint != expected_fingerprint:
        raise InputError(
            f"checkpoint fingerprint {ckpt.config_fingerprint!r} does not match "
            f"expected {expected_fingerprint!r}")
    state = module.state_dict()
    missing = []
    for name, tensor in state.items():
        if name.endswith(_SKIP_SUFFIX):
            continue
        key = prefix + name
        if key not in ckpt.tensors:
            missing.append(key)
            continue
        src = ckpt.tensors[key]
        if tuple(src.shape) != tuple(tensor.shape):
            raise InputError(f"shape mismatch for {key}: {src.shape} vs {tuple(tensor.shape)}")
        state[name] = torch.from_numpy(src.copy()).to(tensor.dtype)
    if missing:
        raise InputError(f"checkpoint missing tensors: {missing[:5]}"
                         + ("..." if len(missing) > 5 else ""))
    module.load_state_dict(state)

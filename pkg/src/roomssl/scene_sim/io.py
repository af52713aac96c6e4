"""Persistence: float-32 WAV files, JSON sidecar metadata, sampler configs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import yaml
from scipy.io import wavfile

from ..errors import ConfigurationError
from .scene import RoomScene, SceneSamplerConfig


def write_wav(path, fs: int, data: np.ndarray) -> None:
    """Write a (T,) or (T, M) array as linear-PCM float-32 WAV."""
    wavfile.write(str(path), int(fs), np.asarray(data, dtype=np.float32))


def read_wav(path) -> tuple[int, np.ndarray]:
    fs, data = wavfile.read(str(path))
    return int(fs), np.asarray(data, dtype=np.float64)


def scene_to_dict(scene: RoomScene) -> dict:
    return {
        "dims": scene.dims.tolist(),
        "surface_absorption": scene.surface_absorption.tolist(),
        "source_pos": scene.source_pos.tolist(),
        "mic_pos": scene.mic_pos.tolist(),
        "fs": int(scene.fs),
        "c": float(scene.c),
    }


def scene_from_dict(d: dict) -> RoomScene:
    return RoomScene(
        dims=d["dims"],
        surface_absorption=d["surface_absorption"],
        source_pos=d["source_pos"],
        mic_pos=d["mic_pos"],
        fs=d.get("fs", 16000),
        c=d.get("c", 343.0),
    )


def write_sidecar(path, scene: RoomScene, direct_index, realized_snr_db, seed,
                  labels: dict | None = None, extra: dict | None = None) -> None:
    """JSON metadata record stored next to each WAV."""
    record = {
        "scene": scene_to_dict(scene),
        "direct_index": [int(i) for i in np.atleast_1d(direct_index)],
        "realized_snr_db": None if realized_snr_db is None else float(realized_snr_db),
        "seed": int(seed),
    }
    if labels is not None:
        record["labels"] = labels
    if extra:
        record.update(extra)
    Path(path).write_text(json.dumps(record, indent=1, sort_keys=True))


def read_sidecar(path) -> dict:
    return json.loads(Path(path).read_text())


def load_sampler_config(path) -> SceneSamplerConfig:
    """Read a SceneSamplerConfig from a YAML or JSON file (keys = field names)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        raw = json.loads(text)
    else:
        raw = yaml.safe_load(text)
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config file {path} did not parse to a mapping")
    known = set(SceneSamplerConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown sampler config keys: {sorted(unknown)}")
    coerced = {
        k: tuple(v) if isinstance(v, list) else v
        for k, v in raw.items()
    }
    return SceneSamplerConfig(**coerced)

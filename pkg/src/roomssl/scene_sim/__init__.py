from .scene import (
    RoomScene,
    SceneSamplerConfig,
    absorption_for_t60,
    eyring_mean_absorption,
    eyring_t60,
    ism_t60_estimate,
    sample_scene,
    wall_areas,
)
from .rir import Rir, simulate_rir
from .noise import generate_diffuse_noise
from .signals import synth_source, synthesize_mixture
from .io import (
    load_sampler_config,
    read_sidecar,
    read_wav,
    scene_from_dict,
    scene_to_dict,
    write_sidecar,
    write_wav,
)

__all__ = [
    "RoomScene",
    "SceneSamplerConfig",
    "Rir",
    "absorption_for_t60",
    "ism_t60_estimate",
    "eyring_mean_absorption",
    "eyring_t60",
    "generate_diffuse_noise",
    "load_sampler_config",
    "read_sidecar",
    "read_wav",
    "sample_scene",
    "scene_from_dict",
    "scene_to_dict",
    "simulate_rir",
    "synth_source",
    "synthesize_mixture",
    "wall_areas",
    "write_sidecar",
    "write_wav",
]

"""Synthetic inputs: device sets, student catalogs, activation matrices."""

from __future__ import annotations

import numpy as np

from .core import DeviceProfile, StudentArch, ValidationError
from .graph import ActivationMatrix

BYTES_PER_PARAM = 4  # float32 weights
DEFAULT_OUTPUT_BITS = 1024.0  # 32 float32 channel summaries per student

# (id, parameters, FLOPs). The CIFAR-100 rows and the two WideResNet CIFAR-10
# rows are published figures; the MobileNet-v2 row is an assumed small model
# (only its rank, lightest of the catalog, is known).
CATALOGS = {
    "paper-cifar": [
        ("wrn-22-1", 0.28e6, 48.58e6),
        ("wrn-16-1", 0.18e6, 34.25e6),
        ("mobilenet-v2", 0.10e6, 20.0e6),
    ],
    "paper-cifar100": [
        ("wrn-16-3", 1.56e6, 575.3e6),
        ("wrn-16-2", 0.71e6, 260.1e6),
        ("wrn-22-1", 0.28e6, 48.58e6),
    ],
}

# Memory budgets suited to each catalog (bytes): the largest student fits
# on part of the devices only.
DEVICE_MEM = {
    "paper-cifar": (0.5e6, 1.5e6),
    "paper-cifar100": (1.5e6, 8.0e6),
}


def preset_students(preset: str = "paper-cifar", output_bits: float = DEFAULT_OUTPUT_BITS) -> list[StudentArch]:
    if preset not in CATALOGS:
        raise ValidationError(f"unknown preset {preset!r}; choose from {sorted(CATALOGS)}")
    return [
        StudentArch(sid, flops, params * BYTES_PER_PARAM, output_bits)
        for sid, params, flops in CATALOGS[preset]
    ]


def outage_draws(n: int, success: float, rng: np.random.Generator, spread: float = 0.1) -> np.ndarray:
    """Per-device outage probabilities, uniform around ``1 - success``.

    The half-width is ``spread`` clipped so every draw stays inside [0, 1].
    """
    if not 0 <= success <= 1:
        raise ValidationError(f"success probability must lie in [0, 1], got {success}")
    mean = 1.0 - success
    half = min(spread, mean, 1.0 - mean)
    return mean + half * (2.0 * rng.random(n) - 1.0)


def preset_devices(
    n: int = 8,
    seed: int = 0,
    success: float = 0.7,
    preset: str = "paper-cifar",
    flops_range: tuple[float, float] = (5e6, 30e6),
    rate_range: tuple[float, float] = (500.0, 1000.0),
    mem_range: tuple[float, float] | None = None,
) -> list[DeviceProfile]:
    """Device set for the default evaluation setting: 8 devices, 5-30 MFLOP/s,
    0.5-1 kbit/s links, mean success probability ``success``."""
    if n < 1:
        raise ValidationError("need at least one device")
    lo_m, hi_m = mem_range or DEVICE_MEM.get(preset, DEVICE_MEM["paper-cifar"])
    rng = np.random.default_rng(seed)
    core = rng.uniform(*flops_range, size=n)
    rate = rng.uniform(*rate_range, size=n)
    mem = rng.uniform(lo_m, hi_m, size=n)
    p_out = outage_draws(n, success, rng)
    return [
        DeviceProfile(f"d{i}", float(core[i]), float(mem[i]), float(rate[i]), float(p_out[i]))
        for i in range(n)
    ]


def synth_activations(
    M: int,
    classes: int = 10,
    samples_per_class: int = 10,
    sharpness: float = 4.0,
    seed: int = 0,
    noise: float = 0.1,
) -> ActivationMatrix:
    """Activations where each class lights up its own block of filters.

    Filters of the sample's class sit at ``1 + sharpness``, the rest at 1;
    absolute Gaussian jitter of scale ``noise / (1 + sharpness)`` is added,
    so larger ``sharpness`` also tightens each block.
    """
    if classes < 1 or M < classes:
        raise ValidationError(f"need M >= classes >= 1, got M={M}, classes={classes}")
    if samples_per_class < 1:
        raise ValidationError("samples_per_class must be >= 1")
    if sharpness < 0:
        raise ValidationError("sharpness must be >= 0")
    rng = np.random.default_rng(seed)
    blocks = np.array_split(np.arange(M), classes)
    rows, labels = [], []
    jitter = noise / (1.0 + sharpness)
    for c, block in enumerate(blocks):
        base = np.ones((samples_per_class, M))
        base[:, block] += sharpness
        rows.append(np.abs(base + jitter * rng.standard_normal(base.shape)))
        labels += [f"c{c}_s{i}" for i in range(samples_per_class)]
    return ActivationMatrix(np.vstack(rows), tuple(labels))

"""Training-emission estimates from GPU count, wall-clock time and grid carbon intensity.

    co2_kg = gpus * hours * power_kw * pue * intensity_kg_per_kwh
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, InvalidInputError

# kg CO2-eq per kWh, 12-month French grid average from September 2022.
DEFAULT_INTENSITY = 0.034

# Average draw per device in kW.  Obtained by inverting published estimates
# at 0.034 kg/kWh: 26.11 kg / (2560 GPU-h * 0.034) and 8.16 kg / (960 GPU-h * 0.034).
DEVICE_POWER_KW = {
    "V100": 0.300,
    "A100": 0.250,
}


@dataclass(frozen=True)
class TrainingRun:
    gpu_count: int
    hours: float
    gpu_power: float
    intensity: float = DEFAULT_INTENSITY
    pue: float = 1.0

    def __post_init__(self):
        for name in ("gpu_count", "hours", "gpu_power", "intensity", "pue"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise InvalidInputError(f"{name} must be a positive number, got {value!r}")

    @property
    def gpu_hours(self):
        return self.gpu_count * self.hours


@dataclass(frozen=True)
class EmissionEstimate:
    gpu_hours: float
    energy_kwh: float
    co2_kg: float


def default_power(device: str) -> float:
    try:
        return DEVICE_POWER_KW[device.upper()]
    except KeyError:
        known = ", ".join(sorted(DEVICE_POWER_KW))
        raise ConfigurationError(
            f"no default power for device {device!r} (known: {known}); pass an explicit power"
        ) from None


def estimate_emissions(run: TrainingRun) -> EmissionEstimate:
    energy = run.gpu_hours * run.gpu_power * run.pue
    return EmissionEstimate(run.gpu_hours, energy, energy * run.intensity)

# tests/conftest.py
from __future__ import annotations

import pytest
from click.testing import CliRunner

from su11sim.config import load_preset
from su11sim.models import InterferometerConfig, NoGap


@pytest.fixture
def angular_config() -> InterferometerConfig:
    return load_preset("paper-angular")


@pytest.fixture
def spectral_config() -> InterferometerConfig:
    return load_preset("paper-spectral")


@pytest.fixture
def small_temporal_config() -> InterferometerConfig:
    """Temporal arm with a four-to-one kernel that a 512-point SVD resolves."""
    return InterferometerConfig(
        arm="temporal",
        pump_size=6000.0,
        crystal_length_mm=3.0,
        crystal_material="BBO",
        pump_wavelength_um=0.3547,
        pdc_wavelength_um=0.7093,
        gap=NoGap(),
        gain=0.0,
        kernel_widths=(0.01, 0.04),
        name="small-temporal",
    )


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()

# su11sim/errors.py
from __future__ import annotations


class Su11Error(Exception):
    """Base class for every failure raised by the simulator."""

    exit_code = 2


class InputError(Su11Error):
    """Bad argument values: empty lists, non-finite data, negative gain."""


class UnitError(InputError):
    """A physical quantity without a unit, or with a unit of the wrong kind."""


class ConfigurationError(Su11Error):
    """Inconsistent or physically invalid configuration."""


class RangeError(ConfigurationError):
    """Wavelength outside a material's Sellmeier validity window."""

    def __init__(self, material: str, wavelength_um: float, bounds: tuple[float, float]):
        self.material = material
        self.wavelength_um = wavelength_um
        self.bounds = bounds
        super().__init__(
            f"wavelength {wavelength_um:g} um outside the validity range of "
            f"{material} ({bounds[0]:g}-{bounds[1]:g} um)"
        )


class NumericalError(Su11Error):
    """Non-finite intermediate results or a failed factorization."""

    exit_code = 3

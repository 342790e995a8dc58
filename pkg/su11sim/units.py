# su11sim/units.py
"""
Unit-suffixed quantities and Gaussian width conventions.

Every dimensional value entering the simulator is a string such as
``"709.3nm"``, ``"6ps"`` or ``"19.4cm"``. Values are converted to the
internal base unit of their kind:

    length      -> um
    time        -> fs
    wavenumber  -> rad/um
    frequency   -> rad/fs

Width conventions used across the package:

    w      1/e amplitude radius (1/e^2 intensity) of a beam
    hw     1/e half-width of an intensity profile
    fwhm   full width at half maximum of an intensity profile
"""
from __future__ import annotations

import math
import re

import pint
from scipy import constants

from .errors import UnitError

_UREG = pint.UnitRegistry()
Q_ = _UREG.Quantity

# nm/fs and um/fs
SPEED_OF_LIGHT_NM_FS = constants.c * 1e9 / 1e15
SPEED_OF_LIGHT_UM_FS = constants.c * 1e6 / 1e15

# FWHM of exp(-x^2/hw^2) is 2*sqrt(ln 2)*hw
FWHM_PER_HW = 2.0 * math.sqrt(math.log(2.0))
# FWHM of |exp(-x^2/w^2)|^2 is sqrt(2 ln 2)*w
FWHM_PER_WAIST = math.sqrt(2.0 * math.log(2.0))

# kind -> internal base unit
BASE_UNITS: dict[str, str] = {
    "length": "um",
    "time": "fs",
    "wavenumber": "rad/um",
    "frequency": "rad/fs",
}

# Listed in error messages; pint accepts any unit of the right dimension.
_SUGGESTED: dict[str, tuple[str, ...]] = {
    "length": ("nm", "um", "mm", "cm", "m"),
    "time": ("fs", "ps", "ns"),
    "wavenumber": ("rad/nm", "rad/um", "rad/mm"),
    "frequency": ("rad/fs", "rad/ps"),
}

# pint reads a bare unit name as one of that unit; a value must lead.
_LEADING_NUMBER = re.compile(r"^\s*[-+]?(?:\d|\.\d)")


def known_units(kind: str) -> list[str]:
    return sorted(_SUGGESTED[kind])


def _quantity(text: str, kind: str) -> pint.Quantity:
    try:
        return Q_(text)
    except Exception as e:  # pint raises tokenizer, syntax and undefined-unit errors alike
        raise UnitError(
            f"Cannot parse {text!r}; expected a number followed by one of "
            f"{', '.join(known_units(kind))}"
        ) from e


def parse_quantity(text: str | float | int, kind: str) -> float:
    """
    Parse ``"<number><unit>"`` into the base unit of ``kind``.

    Bare numbers are refused: a dimensional input without a unit is
    exactly the kind of drift this module exists to stop.
    """
    if kind not in BASE_UNITS:
        raise UnitError(f"Unknown quantity kind: {kind!r}")

    if isinstance(text, (int, float)) or not isinstance(text, str):
        raise UnitError(
            f"{text!r} has no unit; expected one of {', '.join(known_units(kind))}"
        )
    if not _LEADING_NUMBER.match(text):
        raise UnitError(f"{text!r} has no numeric value")

    q = _quantity(text, kind)
    base = BASE_UNITS[kind]
    if q.dimensionless or q.dimensionality != Q_(1, base).dimensionality:
        raise UnitError(
            f"Unit of {text!r} is not a {kind} unit; expected one of "
            f"{', '.join(known_units(kind))}"
        )
    return float(q.to(base).magnitude)


def format_quantity(value: float, unit: str) -> str:
    """Inverse of parse_quantity for a base-unit value, used in config snapshots."""
    try:
        target = Q_(1, unit)
    except Exception as e:
        raise UnitError(f"Unknown unit: {unit!r}") from e
    for base in BASE_UNITS.values():
        if Q_(1, base).dimensionality == target.dimensionality:
            magnitude = Q_(value, base).to(unit).magnitude
            return f"{magnitude:.12g}{unit}"
    raise UnitError(f"Unit {unit!r} is not a length, time or inverse-length/time unit")


# =========================================================
# Gaussian width conversions
# =========================================================
def fwhm_to_hw(fwhm: float) -> float:
    return fwhm / FWHM_PER_HW


def hw_to_fwhm(hw: float) -> float:
    return hw * FWHM_PER_HW


def fwhm_to_waist(fwhm: float) -> float:
    return fwhm / FWHM_PER_WAIST


def waist_to_fwhm(waist: float) -> float:
    return waist * FWHM_PER_WAIST


# =========================================================
# Frequency <-> wavelength widths
# =========================================================
def wavelength_to_omega_fwhm(delta_lambda_nm: float, wavelength_nm: float) -> float:
    """Linearized conversion of a wavelength width (nm) into rad/fs."""
    return 2.0 * math.pi * SPEED_OF_LIGHT_NM_FS * delta_lambda_nm / wavelength_nm**2


def omega_to_wavelength_fwhm(delta_omega: float, wavelength_nm: float) -> float:
    return delta_omega * wavelength_nm**2 / (2.0 * math.pi * SPEED_OF_LIGHT_NM_FS)


def carrier_omega(wavelength_um: float) -> float:
    """Angular frequency (rad/fs) of a vacuum wavelength in um."""
    return 2.0 * math.pi * SPEED_OF_LIGHT_UM_FS / wavelength_um


def omega_to_wavelength_um(omega: float) -> float:
    return 2.0 * math.pi * SPEED_OF_LIGHT_UM_FS / omega

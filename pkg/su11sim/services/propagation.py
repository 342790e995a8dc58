# su11sim/services/propagation.py
from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from ..errors import ConfigurationError, InputError
from ..models import SpatialPropagation, TemporalPropagation

log = logging.getLogger("su11sim.propagation")


def _spread(scale: float, term: float) -> float:
    """sqrt(scale^2 + (term/scale)^2), shared by diffraction and dispersion."""
    return math.sqrt(scale * scale + (term / scale) ** 2)


def mode_extent(scale: float, m: int) -> float:
    if m < 0:
        raise InputError(f"mode order must be >= 0 (got {m})")
    return math.sqrt(2 * m + 1) * scale


# =========================================================
# Spatial
# =========================================================
def rayleigh_range(w0: float, wavelength_um: float) -> float:
    """pi w0^2 / lambda, in mm."""
    return math.pi * w0 * w0 / wavelength_um * 1e-3


def divergence(w0: float, wavelength_um: float) -> float:
    return wavelength_um / (math.pi * w0)


def beam_waist_at(prop: SpatialPropagation, m: int) -> float:
    """Radius (um) of Hermite-Gaussian order m after prop.length of free space."""
    diffraction = prop.wavelength * prop.length * 1e3 / math.pi
    return mode_extent(_spread(prop.w0, diffraction), m)


# =========================================================
# Temporal
# =========================================================
def dispersion_length(tau0: float) -> float:
    """k''d (fs^2) at which the fundamental mode has stretched by sqrt(2)."""
    return tau0 * tau0


def pulse_duration_at(prop: TemporalPropagation, n: int) -> float:
    return mode_extent(_spread(prop.tau0, prop.k2d), n)


def anchor_mode_duration(pump_duration: float, k2d: float) -> float:
    """
    Smaller tau0 for which the fundamental mode reaches pump_duration after k''d.

    Solves tau^4 - T^2 tau^2 + (k''d)^2 = 0.
    """
    if pump_duration <= 0 or k2d <= 0:
        raise ConfigurationError("pump duration and k''d must both be > 0")
    t2 = pump_duration * pump_duration
    disc = t2 * t2 - 4.0 * k2d * k2d
    if disc < 0:
        raise ConfigurationError(
            f"no mode reaches {pump_duration:g} fs after k''d={k2d:g} fs^2 "
            f"(minimum reachable duration is {math.sqrt(2.0 * k2d):g} fs)"
        )
    return math.sqrt(2.0 * k2d * k2d / (t2 + math.sqrt(disc)))


# =========================================================
# Profile resampling
# =========================================================
def rescale_mode_profile(
    mode: Sequence[complex] | np.ndarray,
    stretch: float,
    axis: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """
    psi(x / stretch) / sqrt(stretch) on the same axis, zero outside the
    sampled window. The result is renormalized to the input's discrete L2 norm.
    """
    if not (math.isfinite(stretch) and stretch >= 1.0):
        raise InputError(f"stretch must be a finite value >= 1 (got {stretch!r})")

    psi = np.asarray(mode)
    x = np.asarray(axis, dtype=float)
    if psi.ndim != 1 or psi.shape != x.shape:
        raise InputError("mode and axis must be 1-D arrays of equal length")
    if x.size < 2 or np.any(np.diff(x) <= 0):
        raise InputError("axis must be strictly increasing")

    if stretch == 1.0:
        return psi.copy()

    src = x / stretch
    if np.iscomplexobj(psi):
        out = np.interp(src, x, psi.real, left=0.0, right=0.0) + 1j * np.interp(
            src, x, psi.imag, left=0.0, right=0.0
        )
    else:
        out = np.interp(src, x, psi, left=0.0, right=0.0)
    out = out / math.sqrt(stretch)

    dx = np.gradient(x)
    norm_in = float(np.sum(np.abs(psi) ** 2 * dx))
    norm_out = float(np.sum(np.abs(out) ** 2 * dx))
    if norm_out <= 0:
        raise InputError("rescaled profile is identically zero")

    correction = math.sqrt(norm_in / norm_out)
    if abs(correction - 1.0) > 1e-3:
        log.warning(
            "Rescaled profile lost %.3g of its norm (stretch=%g); the axis may be too narrow",
            1.0 - 1.0 / correction**2,
            stretch,
        )
    return out * correction

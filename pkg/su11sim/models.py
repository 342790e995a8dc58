# su11sim/models.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from .errors import ConfigurationError, InputError
from .units import format_quantity

# =========================================================
# Helpers
# =========================================================


def _frozen_array(values: Any, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ConfigurationError(f"{name} must be a finite value > 0 (got {value!r})")


# =========================================================
# Materials
# =========================================================


@dataclass(frozen=True)
class Material:
    """
    Optical medium described by a three-term Sellmeier formula.

    sellmeier_c holds resonance terms in um^2; valid_range is (min, max) in um.
    """

    name: str
    sellmeier_b: tuple[float, float, float]
    sellmeier_c: tuple[float, float, float]
    valid_range: tuple[float, float]
    source: str = ""

    def __post_init__(self) -> None:
        if len(self.sellmeier_b) != 3 or len(self.sellmeier_c) != 3:
            raise ConfigurationError(f"{self.name}: Sellmeier data needs exactly three B and C terms")
        lo, hi = self.valid_range
        if not (0 < lo < hi):
            raise ConfigurationError(f"{self.name}: invalid validity range {self.valid_range}")

    @property
    def is_dispersionless(self) -> bool:
        return all(b == 0.0 for b in self.sellmeier_b)


# =========================================================
# Schmidt-mode types
# =========================================================


@dataclass(frozen=True)
class KernelGrid:
    """Symmetric uniform grid shared by signal and idler."""

    half_span: float
    points: int

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_span, self.half_span, self.points)

    @property
    def step(self) -> float:
        return 2.0 * self.half_span / (self.points - 1)


@dataclass(frozen=True, eq=False)
class TpaKernel:
    """Two-photon amplitude F(x_s, x_i) sampled on one uniform grid (Frobenius norm 1)."""

    axis: np.ndarray
    amplitude: np.ndarray
    pump_width: float
    phase_matching_width: float
    variable: str = "x"

    def __post_init__(self) -> None:
        object.__setattr__(self, "axis", _frozen_array(self.axis))
        object.__setattr__(self, "amplitude", _frozen_array(self.amplitude, dtype=complex))

    @property
    def grid_step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    @property
    def size(self) -> int:
        return int(self.axis.size)


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """
    Ordered Schmidt eigenvalues with mode functions on ``axis``.

    modes_s[k] and modes_i[k] are u_k and v_k; sum(|u_k|^2) * grid_step == 1.
    """

    eigenvalues: np.ndarray
    modes_s: np.ndarray
    modes_i: np.ndarray
    axis: np.ndarray
    grid_step: float
    method: str = "svd"

    def __post_init__(self) -> None:
        for name in ("eigenvalues", "axis"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        modes_s = np.asarray(self.modes_s)
        modes_i = np.asarray(self.modes_i)
        modes_s.setflags(write=False)
        modes_i.setflags(write=False)
        object.__setattr__(self, "modes_s", modes_s)
        object.__setattr__(self, "modes_i", modes_i)

    @property
    def schmidt_number(self) -> float:
        return float(1.0 / np.sum(self.eigenvalues**2))

    def __len__(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True, eq=False)
class GainedSpectrum:
    gain: float
    weights: np.ndarray
    photon_numbers: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        object.__setattr__(self, "photon_numbers", _frozen_array(self.photon_numbers))

    @property
    def total_photons(self) -> float:
        return float(np.sum(self.photon_numbers))


@dataclass(frozen=True)
class ModeFamily:
    """
    Hermite mode set.

    spatial: scale is w0 in um, carrier a wavelength in um.
    temporal: scale is tau0 in fs, carrier a frequency in rad/fs.
    A family may also live in a conjugate variable (rad/um, rad/fs); the
    recurrence does not care which.
    """

    kind: str
    scale: float
    carrier: float = 0.0
    max_order: int = 100

    def __post_init__(self) -> None:
        if self.kind not in {"spatial", "temporal"}:
            raise ConfigurationError(f"Mode family kind must be 'spatial' or 'temporal' (got {self.kind!r})")
        _require_positive("mode scale", self.scale)
        if self.max_order < 0:
            raise ConfigurationError("max_order must be >= 0")


# =========================================================
# Propagation
# =========================================================


@dataclass(frozen=True)
class SpatialPropagation:
    w0: float          # um, 1/e amplitude radius
    wavelength: float  # um
    length: float      # mm

    def __post_init__(self) -> None:
        _require_positive("w0", self.w0)
        _require_positive("wavelength", self.wavelength)
        if not (math.isfinite(self.length) and self.length >= 0):
            raise ConfigurationError(f"propagation length must be >= 0 (got {self.length!r})")

    @property
    def theta0(self) -> float:
        """Half-angle divergence of the fundamental Gaussian beam (rad)."""
        return self.wavelength / (math.pi * self.w0)


@dataclass(frozen=True)
class TemporalPropagation:
    tau0: float  # fs
    k2d: float   # fs^2

    def __post_init__(self) -> None:
        _require_positive("tau0", self.tau0)
        if not (math.isfinite(self.k2d) and self.k2d >= 0):
            raise ConfigurationError(f"k''d must be >= 0 (got {self.k2d!r})")


# =========================================================
# Interferometer
# =========================================================


@dataclass(frozen=True)
class NoGap:
    kind: str = field(default="none", init=False)

    def snapshot(self) -> dict[str, Any]:
        return {"kind": "none"}


@dataclass(frozen=True)
class FreeSpace:
    length_mm: float
    kind: str = field(default="free_space", init=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length_mm) and self.length_mm >= 0):
            raise ConfigurationError(f"free-space gap length must be >= 0 (got {self.length_mm!r})")

    def snapshot(self) -> dict[str, Any]:
        return {"kind": self.kind, "length": format_quantity(self.length_mm * 1e3, "mm")}


@dataclass(frozen=True)
class Dispersive:
    material: str
    length_mm: float
    kind: str = field(default="dispersive", init=False)

    def __post_init__(self) -> None:
        if not self.material:
            raise ConfigurationError("dispersive gap needs a material name")
        if not (math.isfinite(self.length_mm) and self.length_mm >= 0):
            raise ConfigurationError(f"dispersive gap length must be >= 0 (got {self.length_mm!r})")

    @property
    def label(self) -> str:
        return f"{self.material}@{self.length_mm / 10:g}cm"

    def snapshot(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "material": self.material,
            "length": format_quantity(self.length_mm * 1e3, "mm"),
        }


Gap = Union[NoGap, FreeSpace, Dispersive]


@dataclass(frozen=True)
class InterferometerConfig:
    """
    Geometry and timing of the two-crystal interferometer.

    pump_size: FWHM diameter in um (spatial arm) or pump coherence time in fs
    (temporal arm). mode_scale optionally pins the fundamental Schmidt mode
    (w0 in um or tau0 in fs); kernel_widths optionally pins (sigma_p, sigma_pm).
    """

    arm: str
    pump_size: float
    crystal_length_mm: float
    crystal_material: str
    pump_wavelength_um: float
    pdc_wavelength_um: float
    gap: Gap = field(default_factory=NoGap)
    gain: float = 0.0
    baseline_fwhm_nm: Optional[float] = None
    mode_scale: Optional[float] = None
    kernel_widths: Optional[tuple[float, float]] = None
    media: tuple[Dispersive, ...] = ()
    grid_points: int = 512
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.arm not in {"spatial", "temporal"}:
            raise ConfigurationError(f"arm must be 'spatial' or 'temporal' (got {self.arm!r})")
        _require_positive("pump_size", self.pump_size)
        _require_positive("crystal_length", self.crystal_length_mm)
        _require_positive("pump_wavelength", self.pump_wavelength_um)
        _require_positive("pdc_wavelength", self.pdc_wavelength_um)
        if not (math.isfinite(self.gain) and self.gain >= 0):
            raise ConfigurationError(f"gain must be >= 0 (got {self.gain!r})")
        if not isinstance(self.gap, (NoGap, FreeSpace, Dispersive)):
            raise ConfigurationError(f"Unsupported gap descriptor: {self.gap!r}")
        if self.baseline_fwhm_nm is not None:
            _require_positive("baseline_fwhm", self.baseline_fwhm_nm)
        if self.mode_scale is not None:
            _require_positive("mode scale", self.mode_scale)
        if self.kernel_widths is not None:
            for w in self.kernel_widths:
                _require_positive("kernel width", w)
        if self.grid_points < 64:
            raise ConfigurationError("grid_points must be >= 64")

    @property
    def is_spatial(self) -> bool:
        return self.arm == "spatial"

    @property
    def is_temporal(self) -> bool:
        return self.arm == "temporal"

    def snapshot(self) -> dict[str, Any]:
        """JSON-compatible copy with unit-suffixed strings, loadable again."""
        pump_unit = "um" if self.is_spatial else "ps"
        pump_base = self.pump_size
        data: dict[str, Any] = {
            "name": self.name,
            "arm": self.arm,
            "pump_size": format_quantity(pump_base, pump_unit),
            "crystal_length": format_quantity(self.crystal_length_mm * 1e3, "mm"),
            "crystal_material": self.crystal_material,
            "pump_wavelength": format_quantity(self.pump_wavelength_um, "nm"),
            "pdc_wavelength": format_quantity(self.pdc_wavelength_um, "nm"),
            "gap": self.gap.snapshot(),
            "gain": self.gain,
            "grid_points": self.grid_points,
        }
        if self.baseline_fwhm_nm is not None:
            data["baseline_fwhm"] = format_quantity(self.baseline_fwhm_nm * 1e-3, "nm")
        if self.mode_scale is not None:
            key, unit = ("mode_waist", "um") if self.is_spatial else ("mode_duration", "fs")
            data[key] = format_quantity(self.mode_scale, unit)
        if self.kernel_widths is not None:
            unit = "rad/um" if self.is_spatial else "rad/fs"
            data["kernel"] = {
                "pump_width": format_quantity(self.kernel_widths[0], unit),
                "phase_matching_width": format_quantity(self.kernel_widths[1], unit),
            }
        if self.media:
            data["media"] = [m.snapshot() for m in self.media]
        return data


@dataclass(frozen=True, eq=False)
class WidthCurve:
    abscissa: np.ndarray
    ordinate: np.ndarray
    unit_abscissa: str
    unit_width: str
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "abscissa", _frozen_array(self.abscissa))
        object.__setattr__(self, "ordinate", _frozen_array(self.ordinate))
        if self.abscissa.shape != self.ordinate.shape:
            raise InputError("WidthCurve abscissa and ordinate differ in length")
        if np.any(self.ordinate <= 0):
            raise InputError("WidthCurve widths must be strictly positive")

    def __len__(self) -> int:
        return int(self.abscissa.size)


@dataclass(frozen=True)
class SpectralWidth:
    omega_hw: float    # rad/fs, 1/e half-width of the intensity spectrum
    omega_fwhm: float  # rad/fs
    fwhm_nm: float


@dataclass(frozen=True, eq=False)
class OutputSpectrum:
    axis: np.ndarray          # detuning (rad/fs) or transverse wavevector (rad/um)
    abscissa: np.ndarray      # wavelength in nm, or angle in rad
    intensity: np.ndarray
    gains: np.ndarray         # g_k
    weights: np.ndarray       # gain-renormalized lambda~_k
    fwhm: float               # on the abscissa's unit
    total_weight: float       # sum g_k * lambda~_k
    unit: str

    def __post_init__(self) -> None:
        for name in ("axis", "abscissa", "intensity", "gains", "weights"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))


@dataclass(frozen=True, eq=False)
class ModeDump:
    """Mode profiles before/after the gap on a shared time or space axis."""

    axis: np.ndarray
    unit: str
    columns: dict[str, np.ndarray]
    extents_before: dict[int, float]
    extents_after: dict[int, float]
    pump_scale: float


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: dict[str, Any]
    inputs: list[str]
    outputs: list[str]
    version: str
    timestamp: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "version": self.version,
            "timestamp": self.timestamp,
        }

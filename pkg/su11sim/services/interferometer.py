# su11sim/services/interferometer.py
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy.signal import peak_widths

from ..config import Config
from ..errors import ConfigurationError, InputError, NumericalError
from ..models import (
    Dispersive,
    Gap,
    InterferometerConfig,
    ModeDump,
    ModeFamily,
    NoGap,
    OutputSpectrum,
    SchmidtSpectrum,
    SpatialPropagation,
    SpectralWidth,
    TemporalPropagation,
    WidthCurve,
)
from ..units import (
    SPEED_OF_LIGHT_NM_FS,
    carrier_omega,
    fwhm_to_hw,
    fwhm_to_waist,
    hw_to_fwhm,
    omega_to_wavelength_fwhm,
    wavelength_to_omega_fwhm,
)
from .materials import gvd, refractive_index
from .modes import hermite_modes
from .propagation import _spread, beam_waist_at, mode_extent, pulse_duration_at
from .schmidt import renormalize_weights, resolve_spectrum

log = logging.getLogger("su11sim.interferometer")

# sinc(x) = 1/2 at x = SINC_HALF_MAX; the Gaussian stand-in for the
# phase-matching sinc shares its half-maximum point.
SINC_HALF_MAX = 1.895494267

GAIN_MODELS = ("soft", "hard")

# Mode dumps span this multiple of the largest extent on either side.
DUMP_SPAN = 2.05
DUMP_POINTS = 4001


def _require_arm(config: InterferometerConfig, arm: str, operation: str) -> None:
    if config.arm != arm:
        raise ConfigurationError(f"{operation} needs a {arm} configuration (got arm={config.arm!r})")


def _require_length(value: float, what: str) -> float:
    value = float(value)
    if not (math.isfinite(value) and value >= 0):
        raise InputError(f"{what} must be a finite value >= 0 (got {value!r})")
    return value


# =========================================================
# Kernel widths and mode scales
# =========================================================
def kernel_widths(config: InterferometerConfig) -> tuple[float, float]:
    """
    (sigma_p, sigma_pm) of the double-Gaussian kernel on the arm's axis:
    rad/um for the spatial arm, rad/fs for the temporal one.
    """
    if config.kernel_widths is not None:
        return config.kernel_widths

    if config.is_spatial:
        pump_waist = fwhm_to_waist(config.pump_size)
        sigma_p = 1.0 / pump_waist
        n_p = refractive_index(config.crystal_material, config.pump_wavelength_um)
        k_p = 2.0 * math.pi * n_p / config.pump_wavelength_um
        beta = config.crystal_length_mm * 1e3 / (4.0 * k_p)
    else:
        sigma_p = 1.0 / (math.sqrt(2.0) * config.pump_size)
        k2 = gvd(config.crystal_material, config.pdc_wavelength_um)
        beta = k2 * config.crystal_length_mm / 8.0

    if beta <= 0:
        raise ConfigurationError(f"{config.crystal_material} gives no phase-matching curvature (beta={beta:g})")
    sigma_pm = math.sqrt(SINC_HALF_MAX / (4.0 * math.log(2.0) * beta))
    log.debug("Kernel widths (%s): sigma_p=%g sigma_pm=%g", config.arm, sigma_p, sigma_pm)
    return sigma_p, sigma_pm


def fundamental_scale(config: InterferometerConfig) -> float:
    """w0 (um) for the spatial arm or tau0 (fs) for the temporal arm."""
    if config.mode_scale is not None:
        return config.mode_scale
    sigma_p, sigma_pm = kernel_widths(config)
    s = math.sqrt(sigma_p * sigma_pm)
    return math.sqrt(2.0) / s if config.is_spatial else 1.0 / s


def mode_scales(config: InterferometerConfig) -> dict[str, Any]:
    """
    The fundamental scale in use next to the one the kernel alone gives.

    A pinned mode_duration/mode_waist (the spectral preset anchors tau0 to the
    60 cm single-mode point) can sit an order of magnitude below the kernel's
    value. source says which of the two drove the propagation.
    """
    kernel = fundamental_scale(dataclasses.replace(config, mode_scale=None))
    used = config.mode_scale if config.mode_scale is not None else kernel
    return {
        "used": used,
        "kernel": kernel,
        "source": "override" if config.mode_scale is not None else "kernel",
        "unit": "um" if config.is_spatial else "fs",
    }


def pump_half_size(config: InterferometerConfig) -> float:
    """a/2 (um) for the spatial arm, T_p (fs) for the temporal arm."""
    return config.pump_size / 2.0 if config.is_spatial else config.pump_size


# =========================================================
# Gap accounting
# =========================================================
def gap_length(config: InterferometerConfig, gap: Optional[Gap] = None) -> float:
    gap = config.gap if gap is None else gap
    if isinstance(gap, NoGap):
        return 0.0
    return gap.length_mm


def gap_k2d(config: InterferometerConfig, gap: Optional[Gap] = None) -> float:
    """Accumulated k''d (fs^2) at the PDC wavelength; free space counts as vacuum."""
    gap = config.gap if gap is None else gap
    if isinstance(gap, Dispersive):
        return gvd(gap.material, config.pdc_wavelength_um) * gap.length_mm
    return 0.0


def media_k2d(config: InterferometerConfig, media: Iterable[Dispersive]) -> list[tuple[str, float]]:
    """(label, k''d) rows for a spectral sweep, led by the k''d = 0 baseline."""
    rows = [("baseline", 0.0)]
    for medium in media:
        rows.append((medium.label, gap_k2d(config, medium)))
    return rows


# =========================================================
# Spatial arm
# =========================================================
def amplified_mode_scale(config: InterferometerConfig, length_mm: float) -> float:
    """M = (a/2) / sqrt(w0^2 + (lambda L / (pi w0))^2)."""
    _require_arm(config, "spatial", "amplified_mode_scale")
    length_um = _require_length(length_mm, "distance") * 1e3
    w0 = fundamental_scale(config)
    diffraction = config.pdc_wavelength_um * length_um / math.pi
    return pump_half_size(config) / _spread(w0, diffraction)


def max_amplified_order(m_scale: float) -> int:
    """
    Largest m with sqrt(2m + 1) <= M; -1 when even the fundamental
    overfills the pump.
    """
    if not (math.isfinite(m_scale) and m_scale > 0):
        raise InputError(f"M must be a finite value > 0 (got {m_scale!r})")
    return int(math.floor((m_scale * m_scale - 1.0) / 2.0 + 1e-9))


def initial_angular_width(config: InterferometerConfig) -> float:
    _require_arm(config, "spatial", "angular_width")
    w0 = fundamental_scale(config)
    return config.pump_size * config.pdc_wavelength_um / (math.pi * w0 * w0)


def angular_width(config: InterferometerConfig, length_mm: float, saturate: bool = False) -> float:
    """
    Delta theta = [1/Delta theta_0^2 + (L/a)^2]^(-1/2), rad.

    With saturate=True the width does not drop below the full divergence of
    the fundamental mode, the single-mode limit.
    """
    _require_arm(config, "spatial", "angular_width")
    length_um = _require_length(length_mm, "distance") * 1e3
    theta0 = initial_angular_width(config)
    a = config.pump_size
    width = 1.0 / math.sqrt(1.0 / theta0**2 + (length_um / a) ** 2)
    if saturate:
        w0 = fundamental_scale(config)
        width = max(width, 2.0 * config.pdc_wavelength_um / (math.pi * w0))
    return width


# =========================================================
# Temporal arm
# =========================================================
def initial_spectral_width(config: InterferometerConfig) -> float:
    """1/e half-width (rad/fs) of the PDC intensity spectrum with no gap."""
    _require_arm(config, "temporal", "spectral_width")
    if config.baseline_fwhm_nm is not None:
        fwhm = wavelength_to_omega_fwhm(config.baseline_fwhm_nm, config.pdc_wavelength_um * 1e3)
        return fwhm_to_hw(fwhm)
    sigma_p, sigma_pm = kernel_widths(config)
    return math.sqrt((sigma_p**2 + sigma_pm**2) / 2.0)


def spectral_width(config: InterferometerConfig, k2d: float) -> SpectralWidth:
    """Delta omega = [1/Delta omega_0^2 + (k''d/T_p)^2]^(-1/2)."""
    _require_arm(config, "temporal", "spectral_width")
    k2d = _require_length(k2d, "k''d")
    hw0 = initial_spectral_width(config)
    hw = 1.0 / math.sqrt(1.0 / hw0**2 + (k2d / config.pump_size) ** 2)
    fwhm = hw_to_fwhm(hw)
    return SpectralWidth(
        omega_hw=hw,
        omega_fwhm=fwhm,
        fwhm_nm=omega_to_wavelength_fwhm(fwhm, config.pdc_wavelength_um * 1e3),
    )


# =========================================================
# Sweeps
# =========================================================
def sweep_width(
    config: InterferometerConfig,
    abscissa: Sequence[float],
    saturate: bool = False,
    labels: Optional[Sequence[str]] = None,
) -> WidthCurve:
    """
    Width at each abscissa value: L in mm (spatial arm, Delta theta in rad)
    or k''d in fs^2 (temporal arm, FWHM in nm). Rows come back sorted by abscissa.
    """
    values = np.asarray(list(abscissa), dtype=float)
    if values.size == 0:
        raise InputError("sweep needs at least one abscissa value")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise InputError("sweep abscissa values must be finite and >= 0")
    if labels is not None and len(labels) != values.size:
        raise InputError("labels must match the abscissa length")

    order = np.argsort(values, kind="stable")
    values = values[order]

    if config.is_spatial:
        widths = [angular_width(config, L, saturate=saturate) for L in values]
        units = ("mm", "rad")
        extra = {
            "initial_width_rad": initial_angular_width(config),
            "fundamental_waist_um": fundamental_scale(config),
            "saturate": bool(saturate),
        }
    else:
        widths = [spectral_width(config, k2d).fwhm_nm for k2d in values]
        units = ("fs^2", "nm")
        extra = {
            "initial_fwhm_nm": spectral_width(config, 0.0).fwhm_nm,
            "pump_coherence_fs": config.pump_size,
        }

    ordinate = np.asarray(widths)
    if np.any(np.diff(ordinate) > 1e-12 * ordinate[:-1]):
        raise NumericalError("width curve is not non-increasing along the abscissa")

    metadata = {"config": config.snapshot(), "arm": config.arm, **extra}
    if labels is not None:
        metadata["labels"] = [labels[i] for i in order]

    log.info("Width sweep (%s): %d points", config.arm, values.size)
    return WidthCurve(
        abscissa=values,
        ordinate=ordinate,
        unit_abscissa=units[0],
        unit_width=units[1],
        metadata=metadata,
    )


# =========================================================
# Output spectrum envelope
# =========================================================
def spectrum_for(config: InterferometerConfig, n_modes: Optional[int] = None) -> SchmidtSpectrum:
    """Schmidt spectrum of the configured kernel, numeric where resolvable."""
    sigma_p, sigma_pm = kernel_widths(config)
    return resolve_spectrum(
        sigma_p,
        sigma_pm,
        points=config.grid_points,
        n_modes=n_modes or Config.MAX_MODES,
        kind=config.arm,
        analytic_points=Config.SPECTRUM_POINTS,
    )


def _hermite_scale(spectrum: SchmidtSpectrum) -> float:
    """s such that |u_0|^2 ~ exp(-x^2/s^2), from the second moment of u_0."""
    density = np.abs(spectrum.modes_s[0]) ** 2
    second = float(np.sum(density * spectrum.axis**2) * spectrum.grid_step)
    if not (math.isfinite(second) and second > 0):
        raise NumericalError("fundamental mode has no finite width")
    return math.sqrt(2.0 * second)


def overlap_gains(sizes: np.ndarray, half_size: float, model: str = "soft") -> np.ndarray:
    """
    g_k from mode size vs pump half-size.

    hard: 1 inside, 0 outside. soft: 1 inside, (H/size)^2 outside.
    """
    if model not in GAIN_MODELS:
        raise ConfigurationError(f"gain model must be one of {', '.join(GAIN_MODELS)} (got {model!r})")
    sizes = np.asarray(sizes, dtype=float)
    inside = sizes <= half_size
    if model == "hard":
        return np.where(inside, 1.0, 0.0)
    return np.where(inside, 1.0, (half_size / sizes) ** 2)


def _fwhm(axis: np.ndarray, values: np.ndarray) -> float:
    peak = int(np.argmax(values))
    if values[peak] <= 0:
        raise NumericalError("output spectrum is identically zero")
    widths, _, _, _ = peak_widths(values, [peak], rel_height=0.5)
    return float(widths[0]) * float(axis[1] - axis[0])


def synthesize_output_spectrum(
    config: InterferometerConfig,
    spectrum: SchmidtSpectrum,
    gap: Optional[Gap] = None,
    gain_model: Optional[str] = None,
) -> OutputSpectrum:
    """
    S = sum_k g_k lambda~_k |u_k|^2 on the spectrum's own axis.

    Mode sizes after the gap come from the spectrum's fundamental width;
    g_k compares them against the pump half-size.
    """
    gap = config.gap if gap is None else gap
    model = (gain_model or Config.GAIN_MODEL).strip().lower()

    modes = np.asarray(spectrum.modes_s)
    axis = np.asarray(spectrum.axis)
    if modes.ndim != 2 or modes.shape[1] != axis.size or modes.shape[0] != len(spectrum):
        raise InputError("spectrum modes do not match its axis and eigenvalues")
    if axis.size < 3 or not np.allclose(np.diff(axis), spectrum.grid_step, rtol=1e-6, atol=0.0):
        raise InputError("spectrum axis is not uniform with its grid_step")

    s = _hermite_scale(spectrum)
    orders = range(len(spectrum))
    if config.is_spatial:
        if isinstance(gap, Dispersive):
            raise ConfigurationError("the spatial arm takes a free-space gap, not a dispersive one")
        prop = SpatialPropagation(w0=math.sqrt(2.0) / s, wavelength=config.pdc_wavelength_um, length=gap_length(config, gap))
        sizes = np.array([beam_waist_at(prop, k) for k in orders])
        k_vac = 2.0 * math.pi / config.pdc_wavelength_um
        abscissa = axis / k_vac
        to_unit = 1.0 / k_vac
        unit = "rad"
    else:
        prop_t = TemporalPropagation(tau0=1.0 / s, k2d=gap_k2d(config, gap))
        sizes = np.array([pulse_duration_at(prop_t, k) for k in orders])
        lam_nm = config.pdc_wavelength_um * 1e3
        abscissa = 2.0 * math.pi * SPEED_OF_LIGHT_NM_FS / (carrier_omega(config.pdc_wavelength_um) + axis)
        to_unit = omega_to_wavelength_fwhm(1.0, lam_nm)
        unit = "nm"

    gains = overlap_gains(sizes, pump_half_size(config), model)
    weights = renormalize_weights(spectrum.eigenvalues, config.gain)
    coefficients = gains * weights

    intensity = coefficients @ (np.abs(modes) ** 2)
    if not np.all(np.isfinite(intensity)):
        raise NumericalError("output spectrum contains non-finite values")

    fwhm = _fwhm(axis, intensity) * to_unit
    total = float(np.sum(coefficients))
    log.info(
        "Output spectrum (%s, gap=%s, model=%s): FWHM=%.6g %s, total weight=%.6g, amplified modes=%d/%d",
        config.arm,
        gap.kind,
        model,
        fwhm,
        unit,
        total,
        int(np.count_nonzero(gains >= 1.0)),
        len(spectrum),
    )
    return OutputSpectrum(
        axis=axis,
        abscissa=abscissa,
        intensity=intensity,
        gains=gains,
        weights=weights,
        fwhm=fwhm,
        total_weight=total,
        unit=unit,
    )


# =========================================================
# Mode profiles before/after the gap
# =========================================================
def mode_dump(
    config: InterferometerConfig,
    orders: Sequence[int],
    gap: Optional[Gap] = None,
    points: int = DUMP_POINTS,
) -> ModeDump:
    """
    Profiles of the requested orders before and after the gap, with the pump
    amplitude envelope, on one shared axis (fs or um).

    Dispersion or diffraction rescales the whole family: after the gap each
    mode is the Hermite function at the stretched fundamental scale.
    """
    wanted = sorted({int(m) for m in orders})
    if not wanted:
        raise InputError("mode dump needs at least one order")
    if wanted[0] < 0:
        raise InputError("mode orders must be >= 0")

    gap = config.gap if gap is None else gap
    scale0 = fundamental_scale(config)
    half = pump_half_size(config)

    if config.is_spatial:
        if isinstance(gap, Dispersive):
            raise ConfigurationError("the spatial arm takes a free-space gap, not a dispersive one")
        length_um = gap_length(config, gap) * 1e3
        scale_after = _spread(scale0, config.pdc_wavelength_um * length_um / math.pi)
        # w is the 1/e amplitude radius; the Hermite argument scale is w/sqrt(2)
        to_hermite = 1.0 / math.sqrt(2.0)
        pump_waist = fwhm_to_waist(config.pump_size)
        unit = "um"
    else:
        scale_after = _spread(scale0, gap_k2d(config, gap))
        to_hermite = 1.0
        pump_waist = None
        unit = "fs"

    extents_before = {m: mode_extent(scale0, m) for m in wanted}
    extents_after = {m: mode_extent(scale_after, m) for m in wanted}

    span = DUMP_SPAN * max(max(extents_after.values()), half)
    axis = np.linspace(-span, span, int(points))

    top = wanted[-1]
    before = hermite_modes(
        ModeFamily(kind=config.arm, scale=scale0 * to_hermite, max_order=top), wanted, axis
    )
    after = hermite_modes(
        ModeFamily(kind=config.arm, scale=scale_after * to_hermite, max_order=top), wanted, axis
    )

    if pump_waist is not None:
        pump = np.exp(-(axis**2) / pump_waist**2)
    else:
        pump = np.exp(-(axis**2) / (2.0 * config.pump_size**2))

    columns: dict[str, np.ndarray] = {}
    for row, m in enumerate(wanted):
        columns[f"psi_{m}_before"] = before[row]
    for row, m in enumerate(wanted):
        columns[f"psi_{m}_after"] = after[row]
    columns["pump"] = pump

    log.info(
        "Mode dump (%s, gap=%s): orders=%s scale %.6g -> %.6g %s",
        config.arm,
        gap.kind,
        wanted,
        scale0,
        scale_after,
        unit,
    )
    return ModeDump(
        axis=axis,
        unit=unit,
        columns=columns,
        extents_before=extents_before,
        extents_after=extents_after,
        pump_scale=half,
    )


def modes_outside_pump(dump: ModeDump) -> list[int]:
    return sorted(m for m, extent in dump.extents_after.items() if extent > dump.pump_scale)

# su11sim/services/schmidt.py
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg, stats
from scipy.special import logsumexp

from ..errors import ConfigurationError, InputError, NumericalError
from ..models import GainedSpectrum, KernelGrid, ModeFamily, SchmidtSpectrum, TpaKernel
from .modes import hermite_modes, required_half_span

log = logging.getLogger("su11sim.schmidt")

# Largest value a Gaussian factor may keep at the grid edge, relative to its peak.
EDGE_TOLERANCE = 1e-3
# Singular values below this fraction of the largest one are dropped.
SINGULAR_CUTOFF = 1e-12
# Grid spacing, relative to the narrowest kernel width, a numeric SVD can resolve.
RESOLUTION_LIMIT = 0.7
MIN_POINTS = 64

SpectrumLike = Union[SchmidtSpectrum, Sequence[float], np.ndarray]


def _require_width(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ConfigurationError(f"{name} must be a finite value > 0 (got {value!r})")
    return value


def _eigenvalues(spectrum: SpectrumLike) -> np.ndarray:
    lam = spectrum.eigenvalues if isinstance(spectrum, SchmidtSpectrum) else np.asarray(spectrum, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise InputError("eigenvalue list must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(lam)) or np.any(lam < 0):
        raise InputError("eigenvalues must be finite and >= 0")
    return lam


def _require_gain(gain: float) -> float:
    gain = float(gain)
    if not math.isfinite(gain) or gain < 0:
        raise InputError(f"gain must be a finite value >= 0 (got {gain!r})")
    return gain


# =========================================================
# Closed forms for the double-Gaussian kernel
# =========================================================
def schmidt_number(pump_width: float, phase_matching_width: float) -> float:
    sp = _require_width("pump_width", pump_width)
    spm = _require_width("phase_matching_width", phase_matching_width)
    return 0.5 * (sp / spm + spm / sp)


def schmidt_mode_width(pump_width: float, phase_matching_width: float) -> float:
    """Hermite scale s of the Schmidt modes: s^2 = sigma_p * sigma_pm."""
    sp = _require_width("pump_width", pump_width)
    spm = _require_width("phase_matching_width", phase_matching_width)
    return math.sqrt(sp * spm)


def geometric_ratio(pump_width: float, phase_matching_width: float) -> float:
    """mu in lambda_n = (1 - mu) mu^n."""
    r = _require_width("phase_matching_width", phase_matching_width) / _require_width("pump_width", pump_width)
    return ((r - 1.0) / (r + 1.0)) ** 2


def fit_geometric_law(eigenvalues: SpectrumLike, n_max: int) -> tuple[float, float]:
    """
    Log-linear fit of lambda_n ~ mu^n over n = 0..n_max.

    Returns (mu, R^2).
    """
    lam = _eigenvalues(eigenvalues)[: int(n_max) + 1]
    keep = lam > 0
    n = np.arange(lam.size)[keep]
    if n.size < 3:
        raise InputError("need at least three positive eigenvalues to fit a geometric law")

    fit = stats.linregress(n, np.log(lam[keep]))
    return float(math.exp(fit.slope)), float(fit.rvalue**2)


# =========================================================
# Kernel
# =========================================================
def auto_grid(pump_width: float, phase_matching_width: float, points: int = 512) -> KernelGrid:
    """Symmetric grid wide enough for both Gaussian factors."""
    sp = _require_width("pump_width", pump_width)
    spm = _require_width("phase_matching_width", phase_matching_width)
    return KernelGrid(half_span=3.0 * math.hypot(sp, spm), points=int(points))


def _check_grid(grid: KernelGrid, pump_width: float, phase_matching_width: float) -> None:
    if grid.points < MIN_POINTS:
        raise ConfigurationError(f"kernel grid needs at least {MIN_POINTS} points (got {grid.points})")
    if not (math.isfinite(grid.half_span) and grid.half_span > 0):
        raise ConfigurationError(f"kernel grid half-span must be > 0 (got {grid.half_span!r})")

    # Along x_s + x_i the pump factor at the corner is exp(-X^2/sigma_p^2);
    # along x_s - x_i the phase-matching factor is exp(-X^2/sigma_pm^2).
    for name, width in (("pump", pump_width), ("phase-matching", phase_matching_width)):
        edge = math.exp(-(grid.half_span**2) / width**2)
        if edge >= EDGE_TOLERANCE:
            raise ConfigurationError(
                f"{name} factor is {edge:.3g} of its peak at the grid edge; "
                f"widen the grid beyond half-span {grid.half_span:g}"
            )


def build_tpa_kernel(
    pump_width: float,
    phase_matching_width: float,
    grid: KernelGrid,
    variable: str = "x",
) -> TpaKernel:
    sp = _require_width("pump_width", pump_width)
    spm = _require_width("phase_matching_width", phase_matching_width)
    _check_grid(grid, sp, spm)

    x = grid.axis()
    xs, xi = np.meshgrid(x, x, indexing="ij")
    amplitude = np.exp(-((xs + xi) ** 2) / (4.0 * sp**2)) * np.exp(-((xs - xi) ** 2) / (4.0 * spm**2))

    dx = grid.step
    norm = math.sqrt(float(np.sum(np.abs(amplitude) ** 2)) * dx * dx)
    if not (math.isfinite(norm) and norm > 0):
        raise NumericalError("kernel norm is zero or non-finite")

    log.debug(
        "Kernel built: N=%d half_span=%g sigma_p=%g sigma_pm=%g K~%.4g",
        grid.points,
        grid.half_span,
        sp,
        spm,
        schmidt_number(sp, spm),
    )
    return TpaKernel(
        axis=x,
        amplitude=(amplitude / norm).astype(complex),
        pump_width=sp,
        phase_matching_width=spm,
        variable=variable,
    )


# =========================================================
# Decomposition
# =========================================================
def _svd(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return linalg.svd(matrix, full_matrices=False, lapack_driver="gesdd")
    except linalg.LinAlgError:
        log.warning("gesdd did not converge; retrying with gesvd")
    try:
        return linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
    except linalg.LinAlgError as e:
        raise NumericalError(f"SVD did not converge: {e}") from e


def schmidt_decompose(kernel: TpaKernel) -> SchmidtSpectrum:
    """
    SVD of the sampled kernel.

    With F normalized under the grid measure, F = sum_k sqrt(lambda_k) u_k v_k^T
    and every u_k, v_k has sum(|.|^2) * dx == 1.
    """
    amplitude = np.asarray(kernel.amplitude)
    if amplitude.ndim != 2 or amplitude.shape[0] != amplitude.shape[1]:
        raise InputError(f"kernel must be square (got shape {amplitude.shape})")
    if amplitude.shape[0] != kernel.size:
        raise InputError("kernel amplitude does not match its axis")
    if not np.all(np.isfinite(amplitude)):
        raise InputError("kernel contains non-finite values")

    dx = kernel.grid_step
    u, s, vh = _svd(amplitude * dx)
    if s.size == 0 or s[0] <= 0:
        raise NumericalError("kernel has no non-zero singular value")

    keep = int(np.count_nonzero(s / s[0] >= SINGULAR_CUTOFF))
    u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]

    modes_s = (u / math.sqrt(dx)).T
    modes_i = vh / math.sqrt(dx)

    # Phase convention: largest-magnitude sample of each signal mode is real
    # and positive; the idler mode absorbs the conjugate phase.
    peak = np.argmax(np.abs(modes_s), axis=1)
    phase = modes_s[np.arange(keep), peak]
    phase = phase / np.abs(phase)
    modes_s = modes_s / phase[:, None]
    modes_i = modes_i * phase[:, None]

    lam = s**2
    lam = lam / lam.sum()

    log.info("Schmidt decomposition: N=%d kept=%d K=%.6g", kernel.size, keep, 1.0 / np.sum(lam**2))
    return SchmidtSpectrum(
        eigenvalues=lam,
        modes_s=modes_s,
        modes_i=modes_i,
        axis=np.asarray(kernel.axis),
        grid_step=dx,
        method="svd",
    )


def reconstruct_kernel(spectrum: SchmidtSpectrum) -> np.ndarray:
    amps = np.sqrt(spectrum.eigenvalues)
    return (spectrum.modes_s.T * amps) @ spectrum.modes_i


def analytic_spectrum(
    pump_width: float,
    phase_matching_width: float,
    n_modes: int,
    grid: Union[KernelGrid, Sequence[float], np.ndarray],
    kind: str = "spatial",
) -> SchmidtSpectrum:
    """
    Closed-form Schmidt spectrum of the double-Gaussian kernel.

    lambda_n = (1 - mu) mu^n with mu = ((r - 1)/(r + 1))^2, r = sigma_pm/sigma_p,
    renormalized over the n_modes kept. Modes are Hermite functions of scale
    sqrt(sigma_p * sigma_pm); the idler modes pick up (-1)^n when the pump is
    the narrower factor (anti-correlated kernel).
    """
    sp = _require_width("pump_width", pump_width)
    spm = _require_width("phase_matching_width", phase_matching_width)
    n_modes = int(n_modes)
    if n_modes < 1:
        raise InputError("n_modes must be >= 1")

    axis = grid.axis() if isinstance(grid, KernelGrid) else np.asarray(grid, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise InputError("analytic spectrum needs a 1-D axis")
    dx = float(axis[1] - axis[0])
    if not np.allclose(np.diff(axis), dx, rtol=1e-9, atol=0.0):
        raise InputError("analytic spectrum needs a uniform axis")

    mu = geometric_ratio(sp, spm)
    orders = np.arange(n_modes)
    if mu == 0.0:
        lam = np.zeros(n_modes)
        lam[0] = 1.0
    else:
        lam = (1.0 - mu) * mu**orders
        lam = lam / lam.sum()

    s = schmidt_mode_width(sp, spm)
    family = ModeFamily(kind=kind, scale=s, max_order=n_modes - 1)
    modes = hermite_modes(family, range(n_modes), axis)

    parity = np.where(orders % 2 == 1, -1.0, 1.0) if spm > sp else np.ones(n_modes)
    log.info(
        "Analytic Schmidt spectrum: modes=%d mu=%.6g K=%.6g scale=%g",
        n_modes,
        mu,
        schmidt_number(sp, spm),
        s,
    )
    return SchmidtSpectrum(
        eigenvalues=lam,
        modes_s=modes,
        modes_i=modes * parity[:, None],
        axis=axis,
        grid_step=dx,
        method="analytic",
    )


def resolve_spectrum(
    pump_width: float,
    phase_matching_width: float,
    points: int = 512,
    n_modes: int = 100,
    kind: str = "spatial",
    analytic_points: Optional[int] = None,
) -> SchmidtSpectrum:
    """
    Numeric SVD when an N-point grid resolves the kernel, the closed form
    (sampled on analytic_points, default N) otherwise.
    """
    grid = auto_grid(pump_width, phase_matching_width, points)
    narrow = min(pump_width, phase_matching_width)
    if grid.step <= RESOLUTION_LIMIT * narrow:
        log.info("Decomposition method: svd (dx=%g, narrowest width=%g)", grid.step, narrow)
        return schmidt_decompose(build_tpa_kernel(pump_width, phase_matching_width, grid))

    s = schmidt_mode_width(pump_width, phase_matching_width)
    half = max(grid.half_span, required_half_span(s, n_modes - 1))
    axis = np.linspace(-half, half, int(analytic_points or points))
    log.info(
        "Decomposition method: analytic (dx=%g exceeds %.2g x narrowest width %g)",
        grid.step,
        RESOLUTION_LIMIT,
        narrow,
    )
    return analytic_spectrum(pump_width, phase_matching_width, n_modes, axis, kind=kind)


# =========================================================
# Gain
# =========================================================
def mean_photon_numbers(spectrum: SpectrumLike, gain: float) -> np.ndarray:
    """<N_k> = sinh^2(sqrt(lambda_k) G)."""
    lam = _eigenvalues(spectrum)
    g = _require_gain(gain)
    with np.errstate(over="ignore"):
        n = np.sinh(np.sqrt(lam) * g) ** 2
    if not np.all(np.isfinite(n)):
        raise NumericalError(f"photon numbers overflow at gain {g:g}")
    return n


def _log_sinh2(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        small = 2.0 * np.log(np.sinh(np.minimum(x, 1.0)))
        large = 2.0 * (x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0))
    return np.where(x < 1.0, small, large)


def renormalize_weights(eigenvalues: SpectrumLike, gain: float) -> np.ndarray:
    """
    lambda~_k = sinh^2(sqrt(lambda_k) G) / sum_j sinh^2(sqrt(lambda_j) G).

    Worked in logs so large G does not overflow; G == 0 returns lambda.
    """
    lam = _eigenvalues(eigenvalues)
    g = _require_gain(gain)
    if g == 0.0:
        return lam.copy()

    logs = _log_sinh2(np.sqrt(lam) * g)
    total = logsumexp(logs)
    if not math.isfinite(total):
        raise NumericalError(f"gain renormalization failed at G={g:g}")
    return np.exp(logs - total)


def effective_mode_number(weights: SpectrumLike) -> float:
    w = _eigenvalues(weights)
    total = float(np.sum(w))
    if abs(total - 1.0) > 1e-6:
        raise InputError(f"weights must sum to 1 (got {total:.9g})")
    return float(1.0 / np.sum(w**2))


def amplify(spectrum: SpectrumLike, gain: float) -> GainedSpectrum:
    lam = _eigenvalues(spectrum)
    photons = mean_photon_numbers(lam, gain)
    weights = renormalize_weights(lam, gain)
    gained = GainedSpectrum(gain=float(gain), weights=weights, photon_numbers=photons)
    log.debug("Gain G=%g: K=%.6g total photons=%.6g", gain, effective_mode_number(weights), gained.total_photons)
    return gained


def truncate(spectrum: SchmidtSpectrum, n_modes: Optional[int]) -> SchmidtSpectrum:
    """First n_modes of a spectrum, eigenvalues renormalized."""
    if n_modes is None or n_modes >= len(spectrum):
        return spectrum
    if n_modes < 1:
        raise InputError("n_modes must be >= 1")
    lam = spectrum.eigenvalues[:n_modes]
    return SchmidtSpectrum(
        eigenvalues=lam / lam.sum(),
        modes_s=spectrum.modes_s[:n_modes],
        modes_i=spectrum.modes_i[:n_modes],
        axis=spectrum.axis,
        grid_step=spectrum.grid_step,
        method=spectrum.method,
    )

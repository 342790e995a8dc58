# su11sim/services/modes.py
"""
Hermite mode families.

Profiles are the normalized Hermite functions

    psi_m(x) = H_m(x/s) exp(-x^2 / 2 s^2) / sqrt(2^m m! sqrt(pi) s)

built with the normalized three-term recurrence instead of explicit
polynomials, so orders in the thousands stay finite. Large intermediate
values are rescaled per sample and the Gaussian factor is carried as a
log so nothing overflows before the final product.
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigurationError, InputError, NumericalError
from ..models import ModeFamily

log = logging.getLogger("su11sim.modes")

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _as_axis(points: Sequence[float] | np.ndarray) -> np.ndarray:
    axis = np.asarray(points, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise InputError("points must be a 1-D array with at least two samples")
    if not np.all(np.isfinite(axis)):
        raise InputError("points contain non-finite values")
    return axis


def required_half_span(scale: float, order: int) -> float:
    """Half-width a grid needs to hold psi_order: twice its turning point."""
    return 2.0 * scale * math.sqrt(2 * order + 1)


def _check_orders(family: ModeFamily, orders: list[int], axis: np.ndarray) -> None:
    if not orders:
        raise InputError("at least one mode order is required")
    if min(orders) < 0:
        raise InputError(f"mode orders must be >= 0 (got {min(orders)})")

    top = max(orders)
    if top > family.max_order:
        raise ConfigurationError(f"order {top} exceeds the family's max_order {family.max_order}")

    need = required_half_span(family.scale, top)
    # each side of the origin must reach the span
    have = float(min(-np.min(axis), np.max(axis)))
    if have < need:
        raise ConfigurationError(
            f"grid half-span {have:g} (narrower side) too narrow for order {top} at scale {family.scale:g} "
            f"(needs >= {need:g})"
        )


def hermite_modes(
    family: ModeFamily,
    orders: Iterable[int],
    points: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """Rows of psi_m(points) for each requested order, in the order given."""
    axis = _as_axis(points)
    wanted = [int(m) for m in orders]
    _check_orders(family, wanted, axis)

    xi = axis / family.scale
    top = max(wanted)
    rows: dict[int, np.ndarray] = {}
    targets = set(wanted)

    log_scale = -0.5 * xi * xi
    p_prev = np.zeros_like(xi)
    p = np.full_like(xi, math.pi ** -0.25)

    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        for n in range(top + 1):
            if n in targets:
                magnitude = np.exp(np.log(np.abs(p)) + log_scale)
                rows[n] = np.where(p == 0.0, 0.0, np.sign(p) * magnitude)

            p_next = math.sqrt(2.0 / (n + 1)) * xi * p - math.sqrt(n / (n + 1)) * p_prev
            p_prev, p = p, p_next

            big = np.abs(p) > _RESCALE
            if np.any(big):
                p[big] /= _RESCALE
                p_prev[big] /= _RESCALE
                log_scale[big] += _LOG_RESCALE

    out = np.vstack([rows[m] for m in wanted]) / math.sqrt(family.scale)
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"Hermite recurrence produced non-finite values up to order {top}")
    return out


def hermite_mode(
    family: ModeFamily,
    m: int,
    points: Sequence[float] | np.ndarray,
) -> np.ndarray:
    return hermite_modes(family, [m], points)[0]


def conjugate_family(family: ModeFamily) -> ModeFamily:
    """Same modes described in the Fourier-conjugate variable (scale 1/s)."""
    return ModeFamily(
        kind=family.kind,
        scale=1.0 / family.scale,
        carrier=family.carrier,
        max_order=family.max_order,
    )


def spectral_profile(
    family: ModeFamily,
    m: int,
    points: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """
    |psi~_m|^2 on ``points`` in the conjugate variable (rad/fs for a
    temporal family, rad/um for a spatial one).
    """
    psi = hermite_mode(conjugate_family(family), m, points)
    return psi * psi


def gram_matrix(modes: np.ndarray, step: float) -> np.ndarray:
    m = np.asarray(modes)
    return (m.conj() @ m.T) * step

# su11sim/services/materials.py
from __future__ import annotations

import functools
import json
import logging
import math
import threading
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional, Union

from ..config import Config
from ..errors import ConfigurationError, InputError, RangeError
from ..models import Material
from ..units import SPEED_OF_LIGHT_UM_FS, carrier_omega, omega_to_wavelength_um

log = logging.getLogger("su11sim.materials")

MaterialLike = Union[Material, str]

# lru_cache alone may parse a file twice on concurrent first calls
_LOAD_LOCK = threading.Lock()


# =========================================================
# Table access
# =========================================================
def _resolve(path: str | Path | None) -> Path:
    return Path(path or Config.MATERIALS_FILE).resolve()


@functools.lru_cache(maxsize=8)
def _read_table(resolved: Path) -> tuple[Mapping[str, Material], Mapping[str, str]]:
    """Parse one materials file into read-only (table, aliases) views."""
    try:
        raw = json.loads(resolved.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigurationError(f"Materials file not found: {resolved}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in {resolved}: {e}") from e

    records = raw.get("materials") if isinstance(raw, dict) else None
    if not isinstance(records, list) or not records:
        raise ConfigurationError(f"{resolved} has no 'materials' list")

    table: dict[str, Material] = {}
    aliases: dict[str, str] = {}
    for rec in records:
        try:
            mat = Material(
                name=str(rec["name"]),
                sellmeier_b=(float(rec["B1"]), float(rec["B2"]), float(rec["B3"])),
                sellmeier_c=(float(rec["C1"]), float(rec["C2"]), float(rec["C3"])),
                valid_range=(float(rec["lambda_min_um"]), float(rec["lambda_max_um"])),
                source=str(rec.get("source") or ""),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Malformed material record in {resolved}: {rec!r}") from e

        table[mat.name.lower()] = mat
        for alias in rec.get("aliases") or []:
            aliases[str(alias).lower()] = mat.name.lower()

    log.info("Loaded %d materials from %s", len(table), resolved)
    return MappingProxyType(table), MappingProxyType(aliases)


def _tables(path: str | Path | None) -> tuple[Mapping[str, Material], Mapping[str, str]]:
    resolved = _resolve(path)
    with _LOAD_LOCK:
        return _read_table(resolved)


def load_materials(path: str | Path | None = None) -> Mapping[str, Material]:
    """
    Read the Sellmeier table. Parsed tables are cached per resolved path
    and returned read-only.
    """
    table, _ = _tables(path)
    return table


def known_materials(path: str | Path | None = None) -> list[str]:
    return sorted(m.name for m in load_materials(path).values())


def get_material(name: str, path: str | Path | None = None) -> Material:
    table, aliases = _tables(path)
    key = (name or "").strip().lower()
    key = aliases.get(key, key)
    if key not in table:
        raise InputError(
            f"Unknown material {name!r}; known materials: {', '.join(known_materials(path))}"
        )
    return table[key]


def _as_material(material: MaterialLike) -> Material:
    return material if isinstance(material, Material) else get_material(material)


def _check_wavelength(material: Material, wavelength_um: float) -> None:
    if not math.isfinite(wavelength_um) or wavelength_um <= 0:
        raise InputError(f"wavelength must be a finite value > 0 (got {wavelength_um!r})")
    lo, hi = material.valid_range
    if not (lo <= wavelength_um <= hi):
        raise RangeError(material.name, wavelength_um, material.valid_range)


def _sellmeier(material: Material, wavelength_um: float) -> float:
    lam2 = wavelength_um * wavelength_um
    n2 = 1.0
    for b, c in zip(material.sellmeier_b, material.sellmeier_c):
        n2 += b * lam2 / (lam2 - c)
    return math.sqrt(n2)


# =========================================================
# Dispersion
# =========================================================
def refractive_index(material: MaterialLike, wavelength_um: float) -> float:
    mat = _as_material(material)
    _check_wavelength(mat, wavelength_um)
    return _sellmeier(mat, wavelength_um)


def gvd(material: MaterialLike, wavelength_um: float, rel_step: Optional[float] = None) -> float:
    """
    Group-velocity dispersion k'' in fs^2/mm.

    k(w) = n(w) w / c, so k'' = (2 n'(w) + w n''(w)) / c; n' and n'' come
    from central differences in w with step rel_step * w.
    """
    mat = _as_material(material)
    _check_wavelength(mat, wavelength_um)

    step = Config.FD_STEP if rel_step is None else rel_step
    if not (0 < step < 1e-2):
        raise InputError(f"relative FD step must be in (0, 1e-2) (got {step!r})")

    omega = carrier_omega(wavelength_um)
    h = step * omega

    lam_minus = omega_to_wavelength_um(omega + h)
    lam_plus = omega_to_wavelength_um(omega - h)
    _check_wavelength(mat, lam_minus)
    _check_wavelength(mat, lam_plus)

    n_lo = _sellmeier(mat, lam_plus)    # n(w - h)
    n_0 = _sellmeier(mat, wavelength_um)
    n_hi = _sellmeier(mat, lam_minus)   # n(w + h)

    dn = (n_hi - n_lo) / (2.0 * h)
    d2n = (n_hi - 2.0 * n_0 + n_lo) / (h * h)

    k2_fs2_per_um = (2.0 * dn + omega * d2n) / SPEED_OF_LIGHT_UM_FS
    return k2_fs2_per_um * 1e3


def group_index(material: MaterialLike, wavelength_um: float, rel_step: Optional[float] = None) -> float:
    """n_g = n - lambda dn/dlambda."""
    mat = _as_material(material)
    _check_wavelength(mat, wavelength_um)

    h = (Config.FD_STEP if rel_step is None else rel_step) * wavelength_um
    _check_wavelength(mat, wavelength_um - h)
    _check_wavelength(mat, wavelength_um + h)

    dn_dlam = (_sellmeier(mat, wavelength_um + h) - _sellmeier(mat, wavelength_um - h)) / (2.0 * h)
    return _sellmeier(mat, wavelength_um) - wavelength_um * dn_dlam

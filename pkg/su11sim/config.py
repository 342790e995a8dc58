# su11sim/config.py
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional

from .errors import ConfigurationError, InputError, UnitError
from .models import Dispersive, FreeSpace, InterferometerConfig, NoGap
from .units import parse_quantity

log = logging.getLogger("su11sim.config")

PACKAGE_DATA = Path(__file__).resolve().parent / "data"


def _env_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "y", "on"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name} must be an integer (got {raw!r})") from e


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name} must be a number (got {raw!r})") from e


class Config:
    # =========================================================
    # Logging
    # =========================================================
    LOG_LEVEL = os.getenv("SU11_LOG_LEVEL", "INFO").strip().upper()
    DEBUG = _env_bool("SU11_DEBUG", False)

    # =========================================================
    # Data locations
    # =========================================================
    MATERIALS_FILE = Path(
        os.getenv("SU11_MATERIALS_FILE", str(PACKAGE_DATA / "materials.json"))
    )
    PRESETS_DIR = Path(os.getenv("SU11_PRESETS_DIR", str(PACKAGE_DATA / "presets")))

    # =========================================================
    # Numerics
    # =========================================================
    GRID_POINTS = _env_int("SU11_GRID_POINTS", 512)
    FD_STEP = _env_float("SU11_FD_STEP", 1e-4)
    MAX_MODES = _env_int("SU11_MAX_MODES", 2000)
    SPECTRUM_POINTS = _env_int("SU11_SPECTRUM_POINTS", 2001)

    # soft | hard
    GAIN_MODEL = os.getenv("SU11_GAIN_MODEL", "soft").strip().lower()

    if GAIN_MODEL not in {"soft", "hard"}:
        raise ConfigurationError("SU11_GAIN_MODEL must be 'soft' or 'hard'")
    if GRID_POINTS < 64:
        raise ConfigurationError("SU11_GRID_POINTS must be >= 64")
    if not (0 < FD_STEP < 1e-2):
        raise ConfigurationError("SU11_FD_STEP must be in (0, 1e-2)")
    if MAX_MODES < 1:
        raise ConfigurationError("SU11_MAX_MODES must be >= 1")
    if SPECTRUM_POINTS < 101:
        raise ConfigurationError("SU11_SPECTRUM_POINTS must be >= 101")


# =========================================================
# Interferometer configuration documents
# =========================================================
_DIMENSIONLESS = {"name", "arm", "crystal_material", "gap", "gain", "media", "grid_points", "kernel"}
_KNOWN_KEYS = _DIMENSIONLESS | {
    "pump_size",
    "crystal_length",
    "pump_wavelength",
    "pdc_wavelength",
    "baseline_fwhm",
    "mode_duration",
    "mode_waist",
}


def _length_mm(text: Any, key: str) -> float:
    return _quantity(text, "length", key) * 1e-3


def _quantity(text: Any, kind: str, key: str) -> float:
    try:
        return parse_quantity(text, kind)
    except UnitError as e:
        raise UnitError(f"{key}: {e}") from e


def parse_medium(text: str) -> Dispersive:
    """``"SF6@18.3cm"`` -> Dispersive("SF6", 183.0)."""
    material, sep, length = (text or "").partition("@")
    if not sep or not material.strip():
        raise InputError(f"Medium must look like MATERIAL@LENGTH (got {text!r})")
    return Dispersive(material=material.strip(), length_mm=_length_mm(length.strip(), "medium"))


def parse_gap(raw: Any) -> NoGap | FreeSpace | Dispersive:
    """
    Gap from either a config mapping or a command-line token.

    Tokens: ``none``, ``MATERIAL@LENGTH``, ``free@LENGTH``.
    """
    if raw is None:
        return NoGap()

    if isinstance(raw, str):
        token = raw.strip()
        if token.lower() in {"none", ""}:
            return NoGap()
        head, _, tail = token.partition("@")
        if head.strip().lower() in {"free", "free_space", "air", "vacuum"} and tail:
            return FreeSpace(length_mm=_length_mm(tail.strip(), "gap"))
        return parse_medium(token)

    if not isinstance(raw, Mapping):
        raise ConfigurationError(f"gap must be an object or a string (got {type(raw).__name__})")

    kind = str(raw.get("kind", "none")).strip().lower()
    if kind == "none":
        return NoGap()
    if kind == "free_space":
        return FreeSpace(length_mm=_length_mm(raw.get("length"), "gap.length"))
    if kind == "dispersive":
        material = str(raw.get("material") or "").strip()
        return Dispersive(material=material, length_mm=_length_mm(raw.get("length"), "gap.length"))
    raise ConfigurationError(f"Unknown gap kind {kind!r}; expected none, free_space or dispersive")


def config_from_mapping(data: Mapping[str, Any], name: str = "custom") -> InterferometerConfig:
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")

    missing = [
        k
        for k in ("arm", "pump_size", "crystal_length", "crystal_material", "pump_wavelength", "pdc_wavelength")
        if k not in data
    ]
    if missing:
        raise ConfigurationError(f"Missing configuration keys: {', '.join(missing)}")

    arm = str(data["arm"]).strip().lower()
    if arm == "spatial":
        pump_size = _quantity(data["pump_size"], "length", "pump_size")
    elif arm == "temporal":
        pump_size = _quantity(data["pump_size"], "time", "pump_size")
    else:
        raise ConfigurationError(f"arm must be 'spatial' or 'temporal' (got {arm!r})")

    gain = data.get("gain", 0.0)
    if isinstance(gain, bool) or not isinstance(gain, (int, float)):
        raise ConfigurationError(f"gain must be a plain number (got {gain!r})")

    baseline = None
    if data.get("baseline_fwhm") is not None:
        baseline = _quantity(data["baseline_fwhm"], "length", "baseline_fwhm") * 1e3

    mode_scale: Optional[float] = None
    if arm == "temporal" and data.get("mode_duration") is not None:
        mode_scale = _quantity(data["mode_duration"], "time", "mode_duration")
    elif arm == "spatial" and data.get("mode_waist") is not None:
        mode_scale = _quantity(data["mode_waist"], "length", "mode_waist")
    elif data.get("mode_duration") is not None or data.get("mode_waist") is not None:
        raise ConfigurationError("mode_duration applies to the temporal arm, mode_waist to the spatial arm")

    kernel_widths = None
    if data.get("kernel") is not None:
        kernel = data["kernel"]
        kind = "wavenumber" if arm == "spatial" else "frequency"
        try:
            kernel_widths = (
                _quantity(kernel["pump_width"], kind, "kernel.pump_width"),
                _quantity(kernel["phase_matching_width"], kind, "kernel.phase_matching_width"),
            )
        except (KeyError, TypeError) as e:
            raise ConfigurationError("kernel needs pump_width and phase_matching_width") from e

    media_raw = data.get("media") or []
    if not isinstance(media_raw, list):
        raise ConfigurationError("media must be a list")
    media = []
    for item in media_raw:
        if isinstance(item, str):
            media.append(parse_medium(item))
        elif isinstance(item, Mapping):
            media.append(
                Dispersive(
                    material=str(item.get("material") or "").strip(),
                    length_mm=_length_mm(item.get("length"), "media.length"),
                )
            )
        else:
            raise ConfigurationError(f"Invalid media entry: {item!r}")

    grid_points = data.get("grid_points", Config.GRID_POINTS)
    if isinstance(grid_points, bool) or not isinstance(grid_points, int):
        raise ConfigurationError(f"grid_points must be an integer (got {grid_points!r})")

    return InterferometerConfig(
        arm=arm,
        pump_size=pump_size,
        crystal_length_mm=_length_mm(data["crystal_length"], "crystal_length"),
        crystal_material=str(data["crystal_material"]).strip(),
        pump_wavelength_um=_quantity(data["pump_wavelength"], "length", "pump_wavelength"),
        pdc_wavelength_um=_quantity(data["pdc_wavelength"], "length", "pdc_wavelength"),
        gap=parse_gap(data.get("gap")),
        gain=float(gain),
        baseline_fwhm_nm=baseline,
        mode_scale=mode_scale,
        kernel_widths=kernel_widths,
        media=tuple(media),
        grid_points=grid_points,
        name=str(data.get("name") or name),
    )


def _read_json(path: Path) -> dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigurationError(f"Configuration file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must contain a JSON object")
    return data


def load_config(path: str | Path) -> InterferometerConfig:
    path = Path(path)
    cfg = config_from_mapping(_read_json(path), name=path.stem)
    log.info("Loaded configuration %s (arm=%s)", path, cfg.arm)
    return cfg


def known_presets(presets_dir: Path | None = None) -> list[str]:
    directory = presets_dir or Config.PRESETS_DIR
    if not directory.is_dir():
        return []
    return sorted(p.stem for p in directory.glob("*.json"))


def load_preset(name: str, presets_dir: Path | None = None) -> InterferometerConfig:
    directory = presets_dir or Config.PRESETS_DIR
    path = directory / f"{name}.json"
    if not path.exists():
        raise InputError(
            f"Unknown preset {name!r}; known presets: {', '.join(known_presets(directory)) or '(none)'}"
        )
    cfg = config_from_mapping(_read_json(path), name=name)
    log.info("Loaded preset %s (arm=%s)", name, cfg.arm)
    return cfg

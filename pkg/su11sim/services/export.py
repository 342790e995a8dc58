# su11sim/services/export.py
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from ..errors import InputError
from ..models import GainedSpectrum, ModeDump, RunManifest, WidthCurve

log = logging.getLogger("su11sim.export")

FLOAT_FORMAT = "%.12g"


def fmt(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(FLOAT_FORMAT % float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def to_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, fixed float precision, trailing LF."""
    return json.dumps(_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rows_to_csv(fieldnames: Sequence[str], rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(v) for k, v in row.items()})
    return buf.getvalue()


# =========================================================
# Tables
# =========================================================
WIDTH_FIELDS = ["abscissa", "width", "unit_abscissa", "unit_width"]
SCHMIDT_FIELDS = ["k", "lambda", "weight", "photons"]


def width_curve_rows(curve: WidthCurve) -> list[dict[str, Any]]:
    return [
        {
            "abscissa": float(x),
            "width": float(w),
            "unit_abscissa": curve.unit_abscissa,
            "unit_width": curve.unit_width,
        }
        for x, w in zip(curve.abscissa, curve.ordinate)
    ]


def width_curve_document(curve: WidthCurve) -> dict[str, Any]:
    return {"rows": width_curve_rows(curve), "metadata": curve.metadata}


def schmidt_rows(eigenvalues: Sequence[float], gained: GainedSpectrum) -> list[dict[str, Any]]:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size != gained.weights.size:
        raise InputError("eigenvalues and weights differ in length")
    return [
        {"k": k, "lambda": float(lam[k]), "weight": float(gained.weights[k]), "photons": float(gained.photon_numbers[k])}
        for k in range(lam.size)
    ]


def mode_dump_fields(dump: ModeDump) -> list[str]:
    return [f"x_{dump.unit}", *dump.columns]


def mode_dump_rows(dump: ModeDump) -> list[dict[str, Any]]:
    fields = mode_dump_fields(dump)
    table = np.column_stack([dump.axis, *dump.columns.values()])
    return [dict(zip(fields, (float(v) for v in row))) for row in table]


def mode_dump_document(dump: ModeDump) -> dict[str, Any]:
    return {
        "unit": dump.unit,
        "pump_scale": dump.pump_scale,
        "extents_before": {str(m): v for m, v in dump.extents_before.items()},
        "extents_after": {str(m): v for m, v in dump.extents_after.items()},
        "outside_pump": sorted(m for m, v in dump.extents_after.items() if v > dump.pump_scale),
        "axis": dump.axis,
        "columns": dump.columns,
    }


# =========================================================
# Files
# =========================================================
def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    log.info("Wrote %s (%d bytes)", path, len(text.encode("utf-8")))
    return path


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    out_path: str | Path,
    command: str,
    config: dict[str, Any],
    inputs: Sequence[str | Path],
    outputs: Sequence[str | Path],
    version: str,
    timestamp: Optional[str] = None,
) -> Path:
    """
    ``<out>.manifest.json`` next to the primary output. Every listed output
    must already exist; checksums are recorded alongside.
    """
    missing = [str(p) for p in outputs if not Path(p).exists()]
    if missing:
        raise InputError(f"manifest lists outputs that do not exist: {', '.join(missing)}")

    manifest = RunManifest(
        command=command,
        config=config,
        inputs=[str(p) for p in inputs],
        outputs=[str(p) for p in outputs],
        version=version,
        timestamp=timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    document = manifest.to_dict()
    document["sha256"] = {str(p): sha256_file(p) for p in outputs}

    out_path = Path(out_path)
    return write_text(out_path.with_name(out_path.name + ".manifest.json"), to_json(document))

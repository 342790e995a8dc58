# su11sim/cli.py
from __future__ import annotations

import functools
import logging
import math
from typing import Any, Callable, Optional, Sequence

import click

from . import __version__, bootstrap
from .errors import InputError, Su11Error

log = logging.getLogger("su11sim.cli")


# ======================================================
# Internal helpers
# ======================================================
class CommandError(click.ClickException):
    """ClickException carrying the simulator's exit code."""

    def __init__(self, message: str, exit_code: int = 2):
        super().__init__(message)
        self.exit_code = exit_code


def _handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except Su11Error as e:
            raise CommandError(str(e), exit_code=e.exit_code) from e

    return wrapper


def _echo_result(title: str, result: dict[str, Any]) -> None:
    """Pretty-print a flat result dict."""
    click.echo(click.style(f"{title}:", fg="cyan", bold=True))
    for k, v in result.items():
        click.echo(f"  - {k}: {v}")


def _load_config(config_path: Optional[str], preset: Optional[str], default_preset: str):
    from .config import load_config, load_preset

    if config_path and preset:
        raise click.UsageError("use either --config or --preset, not both")
    if config_path:
        return load_config(config_path), [config_path]
    return load_preset(preset or default_preset), []


def _parse_range(
    start: Optional[str],
    stop: Optional[str],
    step: Optional[str],
    at: Sequence[str],
) -> list[float]:
    """Distances in mm from --start/--stop/--step (inclusive) plus any --at values."""
    from .units import parse_quantity

    values = [parse_quantity(v, "length") * 1e-3 for v in at]

    given = [v is not None for v in (start, stop, step)]
    if any(given):
        if not all(given):
            raise InputError("--start, --stop and --step must be given together")
        lo = parse_quantity(start, "length") * 1e-3
        hi = parse_quantity(stop, "length") * 1e-3
        inc = parse_quantity(step, "length") * 1e-3
        if inc <= 0:
            raise InputError("--step must be > 0")
        if hi < lo:
            raise InputError(f"empty range: --stop {stop} is below --start {start}")
        count = int(math.floor((hi - lo) / inc + 1e-9)) + 1
        values.extend(lo + i * inc for i in range(count))

    if not values:
        raise InputError("no distances given; use --start/--stop/--step or --at")
    return values


def _emit(
    *,
    command: str,
    fmt: str,
    out: Optional[str],
    fields: list[str],
    rows: list[dict[str, Any]],
    document: dict[str, Any],
    metadata: dict[str, Any],
    config_snapshot: dict[str, Any],
    inputs: Sequence[str],
) -> None:
    """
    Write rows as CSV (with a .meta.json sidecar when going to a file) or the
    full document as JSON; a manifest goes next to any --out file.
    """
    from .services.export import rows_to_csv, to_json, write_manifest, write_text

    text = rows_to_csv(fields, rows) if fmt == "csv" else to_json(document)
    if not out:
        click.echo(text, nl=False)
        return

    outputs = [write_text(out, text)]
    if fmt == "csv":
        outputs.append(write_text(f"{out}.meta.json", to_json(metadata)))

    write_manifest(
        out,
        command=command,
        config=config_snapshot,
        inputs=list(inputs),
        outputs=outputs,
        version=__version__,
    )


def _output_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    fn = click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        show_default=True,
        help="Output format.",
    )(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False), help="Write to this file instead of stdout.")(fn)
    fn = click.option("--preset", help="Named preset (see data/presets).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Config JSON file.")(fn)
    return fn


# ======================================================
# Group
# ======================================================
@click.group()
@click.option("--debug", is_flag=True, help="Verbose logging.")
@click.option("--log-level", default=None, help="Log level (default: SU11_LOG_LEVEL).")
@click.version_option(__version__, prog_name="su11sim")
def cli(debug: bool, log_level: Optional[str]) -> None:
    """SU(1,1) interferometer simulator: Schmidt modes, widths and spectra."""
    bootstrap(debug=True if debug else None, log_level=log_level)


# ======================================================
# Materials
# ======================================================
@cli.command("material")
@click.argument("name")
@click.option("--wavelength", required=True, help="Wavelength with unit, e.g. 710nm.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@_handle_errors
def material_cmd(name: str, wavelength: str, fmt: str) -> None:
    """Refractive index, GVD and group index of a material."""
    from .services.export import to_json
    from .services.materials import get_material, group_index, gvd, refractive_index
    from .units import parse_quantity

    mat = get_material(name)
    lam = parse_quantity(wavelength, "length")
    result = {
        "material": mat.name,
        "wavelength_um": lam,
        "n": refractive_index(mat, lam),
        "gvd_fs2_per_mm": gvd(mat, lam),
        "group_index": group_index(mat, lam),
    }

    if fmt == "json":
        click.echo(to_json(result), nl=False)
        return
    _echo_result(mat.name, {k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in result.items()})


# ======================================================
# Sweeps
# ======================================================
@cli.command("angular-sweep")
@_output_options
@click.option("--start", help="First distance, e.g. 10mm.")
@click.option("--stop", help="Last distance (inclusive), e.g. 130mm.")
@click.option("--step", help="Distance step, e.g. 5mm.")
@click.option("--at", multiple=True, help="Single distance; repeatable.")
@click.option("--saturate", is_flag=True, help="Hold the width at the single-mode divergence.")
@_handle_errors
def angular_sweep_cmd(
    config_path: Optional[str],
    preset: Optional[str],
    out: Optional[str],
    fmt: str,
    start: Optional[str],
    stop: Optional[str],
    step: Optional[str],
    at: tuple[str, ...],
    saturate: bool,
) -> None:
    """Angular width of the output vs crystal separation."""
    from .services.export import WIDTH_FIELDS, width_curve_document, width_curve_rows
    from .services.interferometer import amplified_mode_scale, max_amplified_order, sweep_width

    config, inputs = _load_config(config_path, preset, "paper-angular")
    distances = _parse_range(start, stop, step, at)
    curve = sweep_width(config, distances, saturate=saturate)

    metadata = dict(curve.metadata)
    metadata["max_amplified_order"] = [
        max_amplified_order(amplified_mode_scale(config, L)) for L in curve.abscissa
    ]

    _emit(
        command="angular-sweep",
        fmt=fmt,
        out=out,
        fields=WIDTH_FIELDS,
        rows=width_curve_rows(curve),
        document={**width_curve_document(curve), "metadata": metadata},
        metadata=metadata,
        config_snapshot=config.snapshot(),
        inputs=inputs,
    )


@cli.command("spectral-sweep")
@_output_options
@click.option("--medium", multiple=True, help="MATERIAL@LENGTH, e.g. SF6@18.3cm; repeatable.")
@click.option("--synthesize", is_flag=True, help="Also record the synthesized envelope FWHM per row.")
@_handle_errors
def spectral_sweep_cmd(
    config_path: Optional[str],
    preset: Optional[str],
    out: Optional[str],
    fmt: str,
    medium: tuple[str, ...],
    synthesize: bool,
) -> None:
    """Spectral FWHM of the output vs k''d of the gap medium."""
    from .config import parse_medium
    from .models import Dispersive, NoGap
    from .services.export import WIDTH_FIELDS, width_curve_document, width_curve_rows
    from .services.interferometer import (
        media_k2d,
        spectrum_for,
        sweep_width,
        synthesize_output_spectrum,
    )

    config, inputs = _load_config(config_path, preset, "paper-spectral")
    media = [parse_medium(m) for m in medium] if medium else list(config.media)

    points = media_k2d(config, media)
    labels = [label for label, _ in points]
    curve = sweep_width(config, [k2d for _, k2d in points], labels=labels)

    metadata = dict(curve.metadata)
    if synthesize:
        spectrum = spectrum_for(config)
        gaps = {m.label: m for m in media}
        envelope = {}
        for label in metadata["labels"]:
            gap = gaps.get(label, NoGap())
            envelope[label] = synthesize_output_spectrum(config, spectrum, gap=gap).fwhm
        metadata["envelope_fwhm_nm"] = [envelope[label] for label in metadata["labels"]]

    _emit(
        command="spectral-sweep",
        fmt=fmt,
        out=out,
        fields=WIDTH_FIELDS,
        rows=width_curve_rows(curve),
        document={**width_curve_document(curve), "metadata": metadata},
        metadata=metadata,
        config_snapshot=config.snapshot(),
        inputs=inputs,
    )


# ======================================================
# Modes and Schmidt tables
# ======================================================
@cli.command("modes")
@_output_options
@click.option("--orders", default="0,10,50", show_default=True, help="Comma-separated mode orders.")
@click.option("--gap", "gap_token", help="MATERIAL@LENGTH, free@LENGTH or none (default: config gap).")
@_handle_errors
def modes_cmd(
    config_path: Optional[str],
    preset: Optional[str],
    out: Optional[str],
    fmt: str,
    orders: str,
    gap_token: Optional[str],
) -> None:
    """Mode profiles before and after the gap, with the pump envelope."""
    from .config import parse_gap
    from .services.export import mode_dump_document, mode_dump_fields, mode_dump_rows
    from .services.interferometer import mode_dump, mode_scales, modes_outside_pump

    config, inputs = _load_config(config_path, preset, "paper-spectral")
    try:
        wanted = [int(tok) for tok in orders.split(",") if tok.strip()]
    except ValueError as e:
        raise InputError(f"--orders must be comma-separated integers (got {orders!r})") from e

    gap = parse_gap(gap_token) if gap_token is not None else config.gap
    dump = mode_dump(config, wanted, gap=gap)
    outside = modes_outside_pump(dump)
    log.info("Orders outside the pump after the gap: %s", outside or "none")

    document = mode_dump_document(dump)
    metadata = {
        "config": config.snapshot(),
        "gap": gap.snapshot(),
        "unit": dump.unit,
        "pump_scale": dump.pump_scale,
        "mode_scale": mode_scales(config),
        "extents_before": document["extents_before"],
        "extents_after": document["extents_after"],
        "outside_pump": outside,
    }

    _emit(
        command="modes",
        fmt=fmt,
        out=out,
        fields=mode_dump_fields(dump),
        rows=mode_dump_rows(dump),
        document={**document, "gap": gap.snapshot(), "mode_scale": metadata["mode_scale"]},
        metadata=metadata,
        config_snapshot=config.snapshot(),
        inputs=inputs,
    )


@cli.command("schmidt")
@_output_options
@click.option("--gain", type=float, default=None, help="Parametric gain G (default: config gain).")
@click.option("--modes", "n_rows", type=int, default=20, show_default=True, help="Rows to report.")
@_handle_errors
def schmidt_cmd(
    config_path: Optional[str],
    preset: Optional[str],
    out: Optional[str],
    fmt: str,
    gain: Optional[float],
    n_rows: int,
) -> None:
    """Schmidt eigenvalues, gain-renormalized weights and photon numbers."""
    from .services.export import SCHMIDT_FIELDS, schmidt_rows
    from .services.interferometer import kernel_widths, spectrum_for
    from .services.schmidt import amplify, effective_mode_number, fit_geometric_law, schmidt_number

    if n_rows < 1:
        raise InputError("--modes must be >= 1")

    config, inputs = _load_config(config_path, preset, "paper-spectral")
    g = config.gain if gain is None else gain

    spectrum = spectrum_for(config)
    gained = amplify(spectrum, g)
    rows = schmidt_rows(spectrum.eigenvalues, gained)[:n_rows]

    try:
        mu, r2 = fit_geometric_law(spectrum, n_max=10)
        fit: Optional[dict[str, float]] = {"mu": mu, "r2": r2}
    except InputError:
        fit = None

    sigma_p, sigma_pm = kernel_widths(config)
    metadata = {
        "config": config.snapshot(),
        "gain": g,
        "method": spectrum.method,
        "modes_total": len(spectrum),
        "kernel_widths": [sigma_p, sigma_pm],
        "schmidt_number_analytic": schmidt_number(sigma_p, sigma_pm),
        "schmidt_number": spectrum.schmidt_number,
        "effective_modes_at_gain": effective_mode_number(gained.weights),
        "total_photons": gained.total_photons,
        "geometric_fit": fit,
    }

    _emit(
        command="schmidt",
        fmt=fmt,
        out=out,
        fields=SCHMIDT_FIELDS,
        rows=rows,
        document={"rows": rows, "metadata": metadata},
        metadata=metadata,
        config_snapshot=config.snapshot(),
        inputs=inputs,
    )


def main() -> None:
    cli(prog_name="su11sim")

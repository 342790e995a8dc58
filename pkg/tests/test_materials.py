# tests/test_materials.py
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from su11sim.config import Config
from su11sim.errors import InputError, RangeError
from su11sim.services.materials import (
    get_material,
    group_index,
    gvd,
    known_materials,
    load_materials,
    refractive_index,
)

# sha256 of the shipped Sellmeier table; coefficient changes must be deliberate.
MATERIALS_SHA256 = "6db975bbf1be5404d7b8743a1e4c35e0ca566b2cbbde37f88e69346954e2bfe8"


def test_materials_file_is_frozen():
    digest = hashlib.sha256(Config.MATERIALS_FILE.read_bytes()).hexdigest()
    assert digest == MATERIALS_SHA256


def test_known_materials_and_alias():
    assert {"BBO", "SF57", "SF6", "vacuum"} <= set(known_materials())
    assert get_material("air") is get_material("vacuum")
    assert get_material("sf6").name == "SF6"


def test_unknown_material_lists_known_names():
    with pytest.raises(InputError, match="SF57"):
        get_material("unobtainium")


def test_vacuum_index_is_exactly_one():
    assert refractive_index("vacuum", 0.710) == 1.0


def test_sf6_index():
    assert refractive_index("SF6", 0.710) == pytest.approx(1.79, abs=0.01)


def test_bbo_ordinary_index_at_pdc_wavelength():
    assert refractive_index("BBO", 0.7093) == pytest.approx(1.6635, abs=2e-3)


def test_out_of_range_names_material_and_bounds():
    with pytest.raises(RangeError) as exc:
        refractive_index("SF6", 25.0)
    assert "SF6" in str(exc.value)
    assert "0.37-2.5" in str(exc.value)


def test_gvd_sf6_matches_published_value():
    assert gvd("SF6", 0.710) == pytest.approx(238.0, rel=0.02)


def test_gvd_sf57_golden_value():
    value = gvd("SF57", 0.710)
    assert 200.0 < value < 400.0
    assert value == pytest.approx(268.4, rel=1e-2)


def test_gvd_vacuum_is_zero():
    for lam in (0.4, 0.710, 1.55, 10.0):
        assert gvd("vacuum", lam) == 0.0


def test_gvd_step_convergence():
    coarse = gvd("SF6", 0.710, rel_step=1e-4)
    fine = gvd("SF6", 0.710, rel_step=5e-5)
    assert abs(coarse - fine) / abs(coarse) < 1e-3


def test_gvd_neighborhood_must_stay_in_range():
    with pytest.raises(RangeError):
        gvd("SF6", 0.37)


@pytest.mark.parametrize("name", ["SF6", "SF57"])
def test_normal_dispersion_over_visible_nir(name):
    lam = np.linspace(0.5, 1.0, 51)
    n = np.array([refractive_index(name, x) for x in lam])
    assert np.all(np.diff(n) < 0)


def test_group_index_exceeds_phase_index_in_glass():
    assert group_index("SF6", 0.710) > refractive_index("SF6", 0.710)
    assert group_index("vacuum", 0.710) == pytest.approx(1.0, abs=1e-12)


def test_table_is_cached_and_read_only():
    table = load_materials()
    assert load_materials(Config.MATERIALS_FILE) is table
    with pytest.raises(TypeError):
        table["sf6"] = table["bbo"]


def test_concurrent_loads_share_one_table(tmp_path):
    path = tmp_path / "glass.json"
    record = {
        "name": "flint",
        "B1": 1.7, "B2": 0.4, "B3": 1.0,
        "C1": 0.013, "C2": 0.057, "C3": 118.0,
        "lambda_min_um": 0.4, "lambda_max_um": 2.0,
    }
    path.write_text(json.dumps({"materials": [record]}), encoding="utf-8")

    with ThreadPoolExecutor(max_workers=4) as pool:
        tables = list(pool.map(lambda _: load_materials(path), range(8)))
    assert all(t is tables[-1] for t in tables[1:])
    assert get_material("FLINT", path=path).name == "flint"
    assert "flint" not in load_materials()

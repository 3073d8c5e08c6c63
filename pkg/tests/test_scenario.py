from __future__ import annotations

import json

import numpy as np
import pytest

from eosched import load_scenario, write_weather_field
from eosched.scenario import elliptical_mask, tiny_doc, tiny_mask_doc

from conftest import CONFIG_DIR, constant_weather, full_mesh_set


def test_bundled_configs_load(tiny_scenario, france_scenario):
    assert tiny_scenario.mesh_set.k == 20
    assert tiny_scenario.n_pass == 5
    assert france_scenario.mesh_set.k == 122
    assert france_scenario.n_pass == 20
    assert france_scenario.constellation.n_sats == 4


def test_digest_stable_and_sensitive():
    doc = tiny_doc(mask_ref=tiny_mask_doc())
    a = load_scenario(doc)
    b = load_scenario(doc)
    assert a.digest == b.digest
    changed = json.loads(json.dumps(doc))
    changed["weather_model"]["c_max"] = 0.3
    assert load_scenario(changed).digest != a.digest


def test_synthetic_weather_reproducible_from_config():
    doc = tiny_doc(mask_ref=tiny_mask_doc())
    a = load_scenario(doc)
    b = load_scenario(doc)
    assert (a.weather_field.frames == b.weather_field.frames).all()


def test_mask_path_resolution(tmp_path):
    doc = tiny_doc(mask_ref="mask_here.json")
    with open(tmp_path / "mask_here.json", "w") as fh:
        json.dump(tiny_mask_doc(), fh)
    with open(tmp_path / "cfg.json", "w") as fh:
        json.dump(doc, fh)
    scenario = load_scenario(tmp_path / "cfg.json")
    assert scenario.mesh_set.k == 20


def test_weather_file_source(tmp_path):
    ms = full_mesh_set(3, 3, lat0=1.0, lon0=2.0, res_deg=0.5)
    field = constant_weather(ms.grid, 0.25, n_frames=400)
    write_weather_field(field, tmp_path / "wx.json")
    doc = {
        "mask": {
            "n_lat": 3,
            "n_lon": 3,
            "lat0": 1.0,
            "lon0": 2.0,
            "res_deg": 0.5,
            "mask": np.ones((3, 3), int).tolist(),
        },
        "weather": {"file": "wx.json"},
        "weather_model": {"u": 0.1, "v": 0.2, "c_max": 0.2},
        "constellation": {
            "n_sats": 1,
            "passes_per_sat_per_day": 24.0,
            "corridor_width_cols": 3,
            "drift_cols_per_pass": 1,
        },
        "n_pass": 2,
        "gamma": 0.9,
        "t_max": 20,
    }
    scenario = load_scenario(doc, base_dir=tmp_path)
    assert scenario.weather_field.frames[0, 0, 0] == np.float32(0.25)
    assert scenario.t_max == 20
    assert scenario.gamma == 0.9


def test_missing_sections_rejected():
    with pytest.raises(ValueError, match="missing"):
        load_scenario({"mask": tiny_mask_doc()})
    doc = tiny_doc(mask_ref=tiny_mask_doc())
    doc["weather"] = {}
    with pytest.raises(ValueError, match="synthetic"):
        load_scenario(doc)


def test_elliptical_mask_validation():
    with pytest.raises(ValueError):
        elliptical_mask(3, 3, 0)
    with pytest.raises(ValueError):
        elliptical_mask(3, 3, 10)
    assert elliptical_mask(6, 6, 20).sum() == 20


def test_bundled_files_match_builders(tmp_path):
    from eosched.scenario import write_bundled_configs

    write_bundled_configs(tmp_path)
    for name in ("france122.json", "france122_mask.json", "tiny.json", "tiny_mask.json"):
        assert (tmp_path / name).read_text() == (CONFIG_DIR / name).read_text()

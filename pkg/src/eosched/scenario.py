"""Scenario configuration: one JSON document wires a whole benchmark.

A scenario bundles the AOI mask, the weather source (a ``.json``/``.f32``
file pair or synthetic-generator parameters), the constellation knobs,
the noise model and the episode knobs. Loading is deterministic: a
synthetic weather source is generated from its own seed at load time,
so the config file alone reproduces the benchmark bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .env import EnvConfig
from .grid import GridSpec, MeshSet, build_mesh_set, mesh_set_from_json, mesh_set_to_json
from .passes import ConstellationParams
from .timefmt import parse_time
from .weather import (
    SynthParams,
    WeatherField,
    WeatherModelParams,
    generate_synthetic_weather,
    read_weather_field,
)


@dataclass
class Scenario:
    mesh_set: MeshSet
    weather_field: WeatherField
    weather_params: WeatherModelParams
    constellation: ConstellationParams
    n_pass: int
    gamma: float
    t_max: int | None
    digest: str

    def env_config(self) -> EnvConfig:
        return EnvConfig(
            mesh_set=self.mesh_set,
            weather_field=self.weather_field,
            weather_params=self.weather_params,
            constellation=self.constellation,
            n_pass=self.n_pass,
            t_max=self.t_max,
            gamma=self.gamma,
        )


def scenario_digest(resolved_doc: dict) -> str:
    """Stable 16-hex digest of the canonicalized, mask-inlined document."""
    canonical = json.dumps(resolved_doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def load_scenario(source: str | Path | dict, base_dir: str | Path | None = None) -> Scenario:
    """Load a scenario from a config path or an already-parsed document.

    Relative mask/weather paths resolve against the config file's
    directory (or ``base_dir`` when the document is passed directly).
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        base = path.parent if base_dir is None else Path(base_dir)
    else:
        doc = dict(source)
        base = Path(base_dir) if base_dir is not None else Path.cwd()

    try:
        mask_spec = doc["mask"]
        weather_spec = doc["weather"]
        model_spec = doc["weather_model"]
        constellation_spec = doc["constellation"]
    except KeyError as exc:
        raise ValueError(f"scenario config is missing section {exc.args[0]!r}") from exc

    if isinstance(mask_spec, str):
        with open(base / mask_spec, encoding="utf-8") as fh:
            mask_doc = json.load(fh)
    else:
        mask_doc = mask_spec
    mesh_set = mesh_set_from_json(mask_doc)

    weather_params = WeatherModelParams(
        u=float(model_spec["u"]), v=float(model_spec["v"]), c_max=float(model_spec["c_max"])
    )
    constellation = ConstellationParams(
        n_sats=int(constellation_spec["n_sats"]),
        passes_per_sat_per_day=float(constellation_spec["passes_per_sat_per_day"]),
        corridor_width_cols=int(constellation_spec["corridor_width_cols"]),
        drift_cols_per_pass=int(constellation_spec["drift_cols_per_pass"]),
        jitter_seconds=float(constellation_spec.get("jitter_seconds", 0.0)),
    )

    if "synthetic" in weather_spec:
        syn = weather_spec["synthetic"]
        field = generate_synthetic_weather(
            mesh_set.grid,
            n_frames=int(syn["n_frames"]),
            gen=SynthParams(
                rho=float(syn.get("rho", 0.9)),
                blur_radius=int(syn.get("blur_radius", 1)),
                gain=float(syn.get("gain", 5.0)),
                offset=float(syn.get("offset", 0.2)),
            ),
            rng=np.random.default_rng(int(syn["seed"])),
            epoch=parse_time(syn.get("epoch", "2013-01-01T00:00:00Z")),
            step_seconds=int(syn.get("step_seconds", 21600)),
        )
    elif "file" in weather_spec:
        field = read_weather_field(base / weather_spec["file"])
        if field.grid.shape != mesh_set.grid.shape:
            raise ValueError(
                f"weather grid {field.grid.shape} does not match mask grid {mesh_set.grid.shape}"
            )
    else:
        raise ValueError("weather section must contain either 'synthetic' or 'file'")

    resolved = dict(doc)
    resolved["mask"] = mesh_set_to_json(mesh_set)
    return Scenario(
        mesh_set=mesh_set,
        weather_field=field,
        weather_params=weather_params,
        constellation=constellation,
        n_pass=int(doc.get("n_pass", 20)),
        gamma=float(doc.get("gamma", 0.99)),
        t_max=None if doc.get("t_max") is None else int(doc["t_max"]),
        digest=scenario_digest(resolved),
    )


def elliptical_mask(n_lat: int, n_lon: int, k: int) -> np.ndarray:
    """Deterministic convex-ish AOI: the k cells closest to the grid center.

    Distance is elliptical (normalized by the half-extents) and ties
    break row-major, so the same (shape, k) always yields the same mask.
    """
    if not 1 <= k <= n_lat * n_lon:
        raise ValueError(f"k must lie in 1..{n_lat * n_lon}, got {k}")
    ci, cj = (n_lat - 1) / 2.0, (n_lon - 1) / 2.0
    ii, jj = np.mgrid[0:n_lat, 0:n_lon]
    dist = ((ii - ci) / (n_lat / 2.0)) ** 2 + ((jj - cj) / (n_lon / 2.0)) ** 2
    order = np.argsort(dist.ravel(), kind="stable")
    mask = np.zeros(n_lat * n_lon, dtype=bool)
    mask[order[:k]] = True
    return mask.reshape(n_lat, n_lon)


def france_like_mask_doc() -> dict:
    """A 122-mesh AOI of roughly mainland-France proportions (synthetic).

    60 km meshes at a nominal 0.54 degrees; the real mask geometry of
    any operational tessellation is not public, so this stands in.
    """
    ms = build_mesh_set(
        GridSpec(n_lat=14, n_lon=13, lat0=51.5, lon0=-5.0, res_deg=0.54),
        elliptical_mask(14, 13, 122),
    )
    return mesh_set_to_json(ms)


def tiny_mask_doc() -> dict:
    """A 20-mesh AOI on a 6x6 grid for desk-scale experiments."""
    ms = build_mesh_set(
        GridSpec(n_lat=6, n_lon=6, lat0=48.0, lon0=0.0, res_deg=0.54),
        elliptical_mask(6, 6, 20),
    )
    return mesh_set_to_json(ms)


def france_like_doc(mask_ref: str | dict = "france122_mask.json") -> dict:
    """Benchmark scenario: 122 meshes, 4 satellites, 20-pass look-ahead."""
    return {
        "mask": mask_ref,
        "weather": {
            "synthetic": {
                "seed": 7,
                "n_frames": 2600,
                "step_seconds": 21600,
                "epoch": "2013-01-01T00:00:00Z",
                "rho": 0.92,
                "blur_radius": 1,
                "gain": 5.0,
                "offset": 0.2,
            }
        },
        "weather_model": {"u": 0.1, "v": 0.2, "c_max": 0.2},
        "constellation": {
            "n_sats": 4,
            "passes_per_sat_per_day": 1.0,
            "corridor_width_cols": 4,
            "drift_cols_per_pass": 1,
            "jitter_seconds": 600.0,
        },
        "n_pass": 20,
        "gamma": 0.99,
        "t_max": None,
    }


def tiny_doc(mask_ref: str | dict = "tiny_mask.json") -> dict:
    """Desk-scale scenario: 20 meshes, 2 satellites, 5-pass look-ahead.

    Skies are kept a bit clearer than in the large scenario so episodes
    stay short; the expert-vs-random gap survives (roughly 0.7x).
    """
    return {
        "mask": mask_ref,
        "weather": {
            "synthetic": {
                "seed": 11,
                "n_frames": 2200,
                "step_seconds": 21600,
                "epoch": "2013-01-01T00:00:00Z",
                "rho": 0.9,
                "blur_radius": 1,
                "gain": 4.5,
                "offset": -0.25,
            }
        },
        "weather_model": {"u": 0.1, "v": 0.2, "c_max": 0.2},
        "constellation": {
            "n_sats": 2,
            "passes_per_sat_per_day": 2.0,
            "corridor_width_cols": 3,
            "drift_cols_per_pass": 1,
            "jitter_seconds": 600.0,
        },
        "n_pass": 5,
        "gamma": 0.99,
        "t_max": None,
    }


def write_bundled_configs(out_dir: str | Path) -> list[Path]:
    """Write the two bundled scenarios (config + mask files) to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, mask_doc, doc in (
        ("france122", france_like_mask_doc(), france_like_doc("france122_mask.json")),
        ("tiny", tiny_mask_doc(), tiny_doc("tiny_mask.json")),
    ):
        mask_path = out / f"{name}_mask.json"
        cfg_path = out / f"{name}.json"
        for path, payload in ((mask_path, mask_doc), (cfg_path, doc)):
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=1)
                fh.write("\n")
            written.append(path)
    return written

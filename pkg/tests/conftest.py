from __future__ import annotations

from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest

from eosched import (
    ConstellationParams,
    EnvConfig,
    GridSpec,
    PassSchedule,
    PassWindow,
    WeatherField,
    WeatherModelParams,
    build_mesh_set,
    load_scenario,
)
from eosched.timefmt import parse_time

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = REPO_ROOT / "configs"

EPOCH = parse_time("2013-01-01T00:00:00Z")


def full_mesh_set(n_lat: int, n_lon: int, **grid_kw) -> "MeshSet":
    grid = GridSpec(n_lat=n_lat, n_lon=n_lon, **grid_kw)
    return build_mesh_set(grid, np.ones(grid.shape, dtype=bool))


def constant_weather(grid: GridSpec, value: float, n_frames: int = 64, step_seconds: int = 3600) -> WeatherField:
    frames = np.full((n_frames, grid.n_lat, grid.n_lon), value, dtype=np.float32)
    return WeatherField(grid=grid, epoch=EPOCH, step_seconds=step_seconds, frames=frames)


def fixed_schedule(accessible_sets, spacing_seconds: int = 3600, satellite_id: int = 0) -> PassSchedule:
    windows = tuple(
        PassWindow(
            index=i,
            time=EPOCH + timedelta(seconds=i * spacing_seconds),
            satellite_id=satellite_id,
            accessible=frozenset(acc),
        )
        for i, acc in enumerate(accessible_sets)
    )
    return PassSchedule(windows=windows)


def basic_env_config(
    n_lat: int = 3,
    n_lon: int = 3,
    cover: float = 0.2,
    n_pass: int = 3,
    n_windows: int = 40,
    accessible: "set | None" = None,
    params: WeatherModelParams | None = None,
    **cfg_kw,
) -> EnvConfig:
    """Full-mask grid, constant forecast, pregenerated always-same schedule."""
    ms = full_mesh_set(n_lat, n_lon)
    field = constant_weather(ms.grid, cover, n_frames=n_windows + 4)
    acc = set(range(ms.k)) if accessible is None else accessible
    schedule = fixed_schedule([acc] * n_windows)
    return EnvConfig(
        mesh_set=ms,
        weather_field=field,
        weather_params=params or WeatherModelParams(),
        schedule=schedule,
        n_pass=n_pass,
        **cfg_kw,
    )


@pytest.fixture(scope="session")
def tiny_scenario():
    return load_scenario(CONFIG_DIR / "tiny.json")


@pytest.fixture(scope="session")
def france_scenario():
    return load_scenario(CONFIG_DIR / "france122.json")


@pytest.fixture(scope="session")
def generated_constellation():
    return ConstellationParams(
        n_sats=2,
        passes_per_sat_per_day=4.0,
        corridor_width_cols=2,
        drift_cols_per_pass=1,
        jitter_seconds=120.0,
    )

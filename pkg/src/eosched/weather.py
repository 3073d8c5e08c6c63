"""Cloud-cover forecasts and the forecast-error noise model.

Acquisition of a mesh succeeds when the *actual* total cloud cover at
acquisition time is at or below the threshold ``c_max``. Only forecasts
are known ahead of time; the actual cover is modelled as a Gaussian
around the forecast whose spread grows with the forecast itself:

    sigma(x) = u * x + v
    actual ~ Normal(forecast, sigma(forecast)^2)

so the probability that an acquisition validates is the closed form

    P(actual <= c_max | forecast) = Phi((c_max - forecast) / sigma(forecast))

with Phi the standard normal CDF. Thresholding happens on the raw
(unclamped) Gaussian sample so that the sampled dynamics match the
closed form exactly; clamping to [0, 1] is applied only to covers that
are reported in traces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage
from scipy.special import expit, ndtr

from .grid import GridSpec
from .timefmt import format_time, parse_time

ArrayLike = float | NDArray


@dataclass(frozen=True)
class WeatherModelParams:
    """Noise-model parameters (u, v) and the validation threshold c_max."""

    u: float = 0.1
    v: float = 0.2
    c_max: float = 0.2

    def __post_init__(self) -> None:
        if self.u < 0:
            raise ValueError(f"u must be >= 0, got {self.u}")
        if self.v <= 0:
            raise ValueError(f"v must be > 0 so sigma stays positive, got {self.v}")
        if not 0 < self.c_max < 1:
            raise ValueError(f"c_max must lie strictly inside (0, 1), got {self.c_max}")


def sigma(c_f: ArrayLike, params: WeatherModelParams) -> ArrayLike:
    """Forecast-error standard deviation ``u * c_f + v``; strictly positive."""
    _check_cover(c_f)
    if np.ndim(c_f) == 0:
        return params.u * float(c_f) + params.v
    return params.u * np.asarray(c_f, dtype=np.float64) + params.v


def validation_probability(c_f: ArrayLike, params: WeatherModelParams) -> ArrayLike:
    """P(actual cover <= c_max | forecast c_f) = Phi((c_max - c_f) / sigma(c_f)).

    ``ndtr`` evaluates Phi through erf, accurate to well below 1e-12 in
    absolute error. Accepts scalars or arrays.
    """
    _check_cover(c_f)
    cf = np.asarray(c_f, dtype=np.float64)
    p = ndtr((params.c_max - cf) / (params.u * cf + params.v))
    return float(p) if np.ndim(c_f) == 0 else p


def sample_actual_cover(c_f: ArrayLike, params: WeatherModelParams, rng: np.random.Generator) -> ArrayLike:
    """Draw actual cover ~ Normal(c_f, sigma(c_f)^2), *unclamped*.

    The raw draw is what validation thresholds against; clamp to [0, 1]
    only for display. Broadcasts over array forecasts, one draw each.
    """
    _check_cover(c_f)
    cf = np.asarray(c_f, dtype=np.float64)
    g = rng.normal(cf, params.u * cf + params.v)
    return float(g) if np.ndim(c_f) == 0 else g


def _check_cover(c_f: ArrayLike) -> None:
    cf = np.asarray(c_f)
    if ((cf < 0) | (cf > 1)).any():
        raise ValueError("cloud cover must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class WeatherField:
    """Time-indexed forecast cover grids at a fixed step, starting at epoch.

    ``frames`` has shape (n_frames, n_lat, n_lon), float32, values in
    [0, 1]. Lookup at time t uses the nearest frame at or before t.
    Immutable after construction; shareable across threads.
    """

    grid: GridSpec
    epoch: datetime
    step_seconds: int
    frames: NDArray[np.float32] = field(repr=False)

    def __post_init__(self) -> None:
        if self.step_seconds <= 0:
            raise ValueError(f"step_seconds must be positive, got {self.step_seconds}")
        frames = np.asarray(self.frames, dtype=np.float32)
        if frames.ndim != 3 or frames.shape[1:] != self.grid.shape:
            raise ValueError(
                f"frames shape {frames.shape} does not match (n, {self.grid.n_lat}, {self.grid.n_lon})"
            )
        if frames.shape[0] < 1:
            raise ValueError("a weather field needs at least one frame")
        if ((frames < 0) | (frames > 1)).any():
            raise ValueError("cloud-cover values must lie in [0, 1]")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def end(self) -> datetime:
        """First instant no longer covered (last frame start + one step)."""
        return self.epoch + timedelta(seconds=self.n_frames * self.step_seconds)


def frame_index_at(field_: WeatherField, time: datetime) -> int:
    """Index of the nearest frame at or before ``time``.

    Raises ValueError outside [epoch, last frame start + step).
    """
    offset = (time - field_.epoch).total_seconds()
    idx = math.floor(offset / field_.step_seconds)
    if idx < 0 or idx >= field_.n_frames:
        raise ValueError(
            f"time {format_time(time)} outside weather coverage "
            f"[{format_time(field_.epoch)}, {format_time(field_.end)})"
        )
    return idx


def frame_at(field_: WeatherField, time: datetime) -> NDArray[np.float32]:
    """The (n_lat, n_lon) forecast frame in effect at ``time`` (read-only view)."""
    return field_.frames[frame_index_at(field_, time)]


def forecast_at(field_: WeatherField, time: datetime, cell: tuple[int, int]) -> float:
    """Forecast cover over one cell at ``time``."""
    lat_idx, lon_idx = cell
    if not field_.grid.contains(lat_idx, lon_idx):
        raise IndexError(f"cell {cell} outside grid {field_.grid.n_lat}x{field_.grid.n_lon}")
    return float(frame_at(field_, time)[lat_idx, lon_idx])


@dataclass(frozen=True)
class SynthParams:
    """Knobs of the synthetic cover generator.

    The latent field follows a per-cell AR(1) recurrence
    ``x' = rho * x + sqrt(1 - rho^2) * eps`` whose innovations ``eps``
    are box-blurred white noise (spatial correlation), squashed to
    [0, 1] by a logistic ``expit(gain * x + offset)``. The squash is
    invertible, so tests can recover the latent process exactly.
    """

    rho: float = 0.9
    blur_radius: int = 1
    gain: float = 5.0
    offset: float = 0.2

    def __post_init__(self) -> None:
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.blur_radius < 0:
            raise ValueError(f"blur_radius must be >= 0, got {self.blur_radius}")
        if self.gain <= 0:
            raise ValueError(f"gain must be > 0, got {self.gain}")


def generate_synthetic_weather(
    grid: GridSpec,
    n_frames: int,
    gen: SynthParams,
    rng: np.random.Generator,
    *,
    epoch: datetime | None = None,
    step_seconds: int = 21600,
) -> WeatherField:
    """Generate a seeded synthetic forecast field (stand-in for a real dataset)."""
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    if epoch is None:
        epoch = parse_time("2013-01-01T00:00:00Z")

    def innovation() -> NDArray[np.float64]:
        eps = rng.standard_normal(grid.shape)
        if gen.blur_radius > 0:
            eps = ndimage.uniform_filter(eps, size=2 * gen.blur_radius + 1, mode="nearest")
        return eps

    frames = np.empty((n_frames, grid.n_lat, grid.n_lon), dtype=np.float32)
    x = innovation()  # start at the stationary distribution of the recurrence
    scale = math.sqrt(1.0 - gen.rho**2)
    for t in range(n_frames):
        frames[t] = expit(gen.gain * x + gen.offset)
        x = gen.rho * x + scale * innovation()
    return WeatherField(grid=grid, epoch=epoch, step_seconds=step_seconds, frames=frames)


# On-disk format: a JSON sidecar and a raw little-endian float32 blob,
# time-major then row-major. Any grid converter can produce the pair.

def weather_meta(field_: WeatherField) -> dict:
    return {
        "n_frames": field_.n_frames,
        "n_lat": field_.grid.n_lat,
        "n_lon": field_.grid.n_lon,
        "epoch": format_time(field_.epoch),
        "step_seconds": field_.step_seconds,
        "lat0": field_.grid.lat0,
        "lon0": field_.grid.lon0,
        "res_deg": field_.grid.res_deg,
    }


def load_weather_field(meta: dict, blob: bytes | NDArray) -> WeatherField:
    """Assemble a WeatherField from parsed sidecar metadata and the raw blob."""
    try:
        n_frames = int(meta["n_frames"])
        grid = GridSpec(
            n_lat=int(meta["n_lat"]),
            n_lon=int(meta["n_lon"]),
            lat0=float(meta["lat0"]),
            lon0=float(meta["lon0"]),
            res_deg=float(meta["res_deg"]),
        )
        epoch = parse_time(meta["epoch"])
        step_seconds = int(meta["step_seconds"])
    except KeyError as exc:
        raise ValueError(f"weather metadata is missing field {exc.args[0]!r}") from exc
    if isinstance(blob, (bytes, bytearray, memoryview)):
        values = np.frombuffer(blob, dtype="<f4")
    else:
        values = np.asarray(blob, dtype="<f4").ravel()
    expected = n_frames * grid.n_lat * grid.n_lon
    if values.size != expected:
        raise ValueError(f"blob holds {values.size} values, metadata implies {expected}")
    frames = values.reshape(n_frames, grid.n_lat, grid.n_lon).astype(np.float32)
    return WeatherField(grid=grid, epoch=epoch, step_seconds=step_seconds, frames=frames)


def read_weather_field(json_path: str | Path) -> WeatherField:
    """Read a ``.json``/``.f32`` pair; the blob sits next to the sidecar."""
    json_path = Path(json_path)
    with open(json_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    blob_path = json_path.with_suffix(".f32")
    return load_weather_field(meta, blob_path.read_bytes())


def write_weather_field(field_: WeatherField, json_path: str | Path) -> None:
    json_path = Path(json_path)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(weather_meta(field_), fh, indent=1)
        fh.write("\n")
    json_path.with_suffix(".f32").write_bytes(
        np.ascontiguousarray(field_.frames, dtype="<f4").tobytes()
    )

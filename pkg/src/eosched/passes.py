"""Satellite pass schedule: pass times and per-pass accessible meshes.

One pass = one overflight of the AOI by one satellite = one decision
step. A satellite reaches only part of the grid on each pass; that is
modelled as a corridor of ``corridor_width_cols`` contiguous grid
columns whose center column advances by ``drift_cols_per_pass`` on each
of the satellite's own passes, wrapping around the grid. The corridor
sweep approximates a polar-orbit ground track over a Mercator grid
while keeping exactly two knobs.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .grid import MeshSet
from .timefmt import format_time


@dataclass(frozen=True)
class ConstellationParams:
    """Constellation geometry and cadence knobs for schedule generation."""

    n_sats: int = 4
    passes_per_sat_per_day: float = 1.0
    corridor_width_cols: int = 4
    drift_cols_per_pass: int = 1
    jitter_seconds: float = 600.0

    def __post_init__(self) -> None:
        if self.n_sats < 1:
            raise ValueError(f"n_sats must be >= 1, got {self.n_sats}")
        if self.passes_per_sat_per_day <= 0:
            raise ValueError("passes_per_sat_per_day must be > 0")
        if self.corridor_width_cols < 1:
            raise ValueError("corridor_width_cols must be >= 1")
        if self.drift_cols_per_pass < 0:
            raise ValueError("drift_cols_per_pass must be >= 0")
        if self.jitter_seconds < 0:
            raise ValueError("jitter_seconds must be >= 0")


@dataclass(frozen=True)
class PassWindow:
    """One pass: its step index, timestamp, satellite and reachable meshes."""

    index: int
    time: datetime
    satellite_id: int
    accessible: frozenset[int]


@dataclass(frozen=True)
class PassSchedule:
    """Time-ordered passes; ``horizon`` is the number of windows."""

    windows: tuple[PassWindow, ...]

    def __post_init__(self) -> None:
        for i, w in enumerate(self.windows):
            if w.index != i:
                raise ValueError(f"window {i} carries index {w.index}; indices must be consecutive")
            if i > 0 and w.time <= self.windows[i - 1].time:
                raise ValueError(f"window {i} timestamp does not increase strictly")

    @property
    def horizon(self) -> int:
        return len(self.windows)


def corridor_columns(center: int, width: int, n_lon: int) -> list[int]:
    """Grid columns of a corridor of ``width`` centered on ``center`` (wraps)."""
    lo = center - (width - 1) // 2
    return [(lo + d) % n_lon for d in range(width)]


def generate_schedule(
    ms: MeshSet,
    cp: ConstellationParams,
    start: datetime,
    n_passes: int,
    rng: np.random.Generator,
) -> PassSchedule:
    """Generate ``n_passes`` interleaved passes starting at ``start``.

    Satellites are staggered evenly inside the per-satellite period and
    their corridor phases are spread across the grid so they do not all
    sweep the same columns at the same time. Deterministic for a given
    (inputs, rng state). Raises ValueError when the corridor/drift pair
    would leave columns permanently unreachable.
    """
    if n_passes < 1:
        raise ValueError(f"n_passes must be >= 1, got {n_passes}")
    n_lon = ms.grid.n_lon
    width = min(cp.corridor_width_cols, n_lon)
    if width < n_lon and not 1 <= cp.drift_cols_per_pass <= width:
        raise ValueError(
            "drift_cols_per_pass must lie in [1, corridor_width_cols] for a partial "
            f"corridor, got drift {cp.drift_cols_per_pass} and width {width}"
        )

    period = timedelta(seconds=86400.0 / cp.passes_per_sat_per_day)
    per_sat = -(-n_passes // cp.n_sats) + 1  # ceil + margin to survive jitter reordering
    records: list[tuple[datetime, int, frozenset[int]]] = []
    lon_idx = ms.lon_indices
    for sat in range(cp.n_sats):
        phase = round(sat * n_lon / cp.n_sats)
        stagger = sat * period / cp.n_sats
        # offset by the jitter bound so no pass ever precedes `start`
        jitter = cp.jitter_seconds + rng.uniform(-cp.jitter_seconds, cp.jitter_seconds, size=per_sat)
        for i in range(per_sat):
            time = start + stagger + i * period + timedelta(seconds=float(jitter[i]))
            center = (phase + i * cp.drift_cols_per_pass) % n_lon
            cols = corridor_columns(center, width, n_lon)
            reachable = np.isin(lon_idx, cols)
            accessible = frozenset(int(k) for k in np.nonzero(reachable)[0])
            records.append((time, sat, accessible))

    records.sort(key=lambda rec: (rec[0], rec[1]))
    windows = []
    last_time: datetime | None = None
    for index, (time, sat, accessible) in enumerate(records[:n_passes]):
        if last_time is not None and time <= last_time:
            time = last_time + timedelta(microseconds=1)  # break exact ties
        last_time = time
        windows.append(PassWindow(index=index, time=time, satellite_id=sat, accessible=accessible))
    return PassSchedule(windows=tuple(windows))


def accessible_meshes(sched: PassSchedule, t: int) -> frozenset[int]:
    """Accessible mesh set of pass ``t``; raises IndexError out of range."""
    if not 0 <= t < sched.horizon:
        raise IndexError(f"pass index {t} out of range 0..{sched.horizon - 1}")
    return sched.windows[t].accessible


def schedule_to_json(sched: PassSchedule) -> list[dict]:
    """Inspection-friendly export (timestamps ISO-8601 UTC, meshes sorted)."""
    return [
        {
            "index": w.index,
            "time": format_time(w.time),
            "satellite_id": w.satellite_id,
            "accessible": sorted(w.accessible),
        }
        for w in sched.windows
    ]

"""The acquisition-scheduling decision process.

Each step is one satellite pass. The agent picks one mesh to acquire
(or does nothing), the chosen acquisition validates with the weather
model's probability, and the episode ends when every mesh is validated
or after ``t_max`` passes (10x the mesh count by default).

The observation is a float32 tensor of shape (n_lat, n_lon, n_pass + 1):
frame 0 holds the mesh status (1 = still to acquire, 0 = validated or
outside the AOI), frames 1..n_pass hold the validation probability of
each mesh for the next n_pass passes in chronological order, with 0 at
cells that are out of reach on the corresponding pass (and everywhere
outside the AOI). Probabilities are *not* masked by status; the status
frame is the single source of validation truth. Look-ahead frames past
the end of the schedule are all-zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .grid import MeshSet
from .passes import ConstellationParams, PassSchedule, generate_schedule
from .weather import (
    WeatherField,
    WeatherModelParams,
    frame_at,
    sample_actual_cover,
    validation_probability,
)


@dataclass
class EnvConfig:
    """Everything an episode needs.

    Exactly one of ``constellation`` (schedule generated per episode
    from the reset start date) or ``schedule`` (pregenerated, fixed)
    must be set. ``t_max`` defaults to 10 * K.
    """

    mesh_set: MeshSet
    weather_field: WeatherField
    weather_params: WeatherModelParams
    constellation: ConstellationParams | None = None
    schedule: PassSchedule | None = None
    n_pass: int = 20
    t_max: int | None = None
    gamma: float = 0.99

    def __post_init__(self) -> None:
        if (self.constellation is None) == (self.schedule is None):
            raise ValueError("set exactly one of constellation or schedule")
        if self.n_pass < 1:
            raise ValueError(f"n_pass must be >= 1, got {self.n_pass}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.t_max is not None and self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if self.weather_field.grid != self.mesh_set.grid:
            raise ValueError("weather field and mesh set use different grids")

    @property
    def max_steps(self) -> int:
        return 10 * self.mesh_set.k if self.t_max is None else self.t_max


@dataclass
class EnvState:
    """Mutable per-episode state; owned by one Environment instance."""

    status: NDArray[np.uint8]
    t: int
    time: datetime | None
    rng: np.random.Generator


@dataclass
class StepResult:
    observation: NDArray[np.float32]
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Sum of gamma^t * reward_t over the episode."""
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    total = 0.0
    for r in reversed(rewards):
        total = float(r) + gamma * total
    return total


def _probability_frame(
    window_accessible: frozenset[int],
    window_time: datetime,
    ms: MeshSet,
    field_: WeatherField,
    params: WeatherModelParams,
) -> NDArray[np.float32]:
    """Validation-probability frame of one pass over the full grid."""
    out = np.zeros(ms.grid.shape, dtype=np.float32)
    if window_accessible:
        idx = np.fromiter(sorted(window_accessible), dtype=np.int64)
        rows = ms.lat_indices[idx]
        cols = ms.lon_indices[idx]
        cf = frame_at(field_, window_time)[rows, cols].astype(np.float64)
        out[rows, cols] = validation_probability(cf, params).astype(np.float32)
    return out


def build_observation(
    status: NDArray[np.uint8],
    t: int,
    ms: MeshSet,
    schedule: PassSchedule,
    field_: WeatherField,
    params: WeatherModelParams,
    n_pass: int,
) -> NDArray[np.float32]:
    """Build the observation tensor directly from its definition.

    Reference path, recomputed from scratch on every call; Environment
    keeps per-episode tables that must agree with this bit-for-bit.
    """
    obs = np.zeros((ms.grid.n_lat, ms.grid.n_lon, n_pass + 1), dtype=np.float32)
    obs[ms.lat_indices, ms.lon_indices, 0] = status
    for n in range(1, n_pass + 1):
        idx = t + n - 1
        if idx >= schedule.horizon:
            break
        w = schedule.windows[idx]
        obs[:, :, n] = _probability_frame(w.accessible, w.time, ms, field_, params)
    return obs


class Environment:
    """One episodic environment instance (single-threaded; run one per worker).

    With a pregenerated schedule the per-pass tables are built once here
    and reset only reinitializes status and streams, which makes
    repeated short episodes cheap.
    """

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        ms = cfg.mesh_set
        self._k = ms.k
        self._schedule: PassSchedule | None = cfg.schedule
        self._state: EnvState | None = None
        self._done = True
        if cfg.schedule is not None:
            self._build_tables(cfg.schedule)

    # static scenario facts, available before reset
    @property
    def mesh_set(self) -> MeshSet:
        return self.cfg.mesh_set

    @property
    def k(self) -> int:
        return self._k

    @property
    def action_count(self) -> int:
        return self._k + 1

    @property
    def observation_shape(self) -> tuple[int, int, int]:
        g = self.cfg.mesh_set.grid
        return (g.n_lat, g.n_lon, self.cfg.n_pass + 1)

    @property
    def schedule(self) -> PassSchedule:
        if self._schedule is None:
            raise RuntimeError("no schedule yet; call reset first")
        return self._schedule

    @property
    def state(self) -> EnvState:
        if self._state is None:
            raise RuntimeError("no episode; call reset first")
        return self._state

    @property
    def done(self) -> bool:
        return self._done

    def reset(self, seed: int, start: datetime | None = None) -> NDArray[np.float32]:
        """Start a fresh episode; fully determined by (config, seed, start)."""
        cfg = self.cfg
        ss = np.random.SeedSequence(seed)
        schedule_seq, episode_seq = ss.spawn(2)
        if cfg.constellation is not None:
            begin = cfg.weather_field.epoch if start is None else start
            schedule = generate_schedule(
                cfg.mesh_set,
                cfg.constellation,
                begin,
                n_passes=cfg.max_steps + cfg.n_pass,
                rng=np.random.default_rng(schedule_seq),
            )
            self._schedule = schedule
            self._build_tables(schedule)
        elif start is not None:
            raise ValueError("start is only meaningful when the schedule is generated per episode")
        self._state = EnvState(
            status=np.ones(self._k, dtype=np.uint8),
            t=0,
            time=self._schedule.windows[0].time if self._schedule.horizon else None,
            rng=np.random.default_rng(episode_seq),
        )
        self._done = False
        return self._observation()

    def step(self, action: int) -> StepResult:
        """Apply one action at the current pass and advance to the next."""
        if self._state is None or self._done:
            raise RuntimeError("episode is done or not started; call reset")
        if not 0 <= action <= self._k:
            raise ValueError(f"action {action} out of range 0..{self._k}")
        state = self._state
        t = state.t
        reward = 0.0
        info: dict = {"chosen_mesh": None, "sampled_actual_cover": None, "validated": False}
        if action > 0:
            mesh = action - 1
            info["chosen_mesh"] = mesh
            in_schedule = t < self._schedule.horizon
            if in_schedule and self._access[t, mesh] and state.status[mesh] == 1:
                cover = sample_actual_cover(float(self._cf[t, mesh]), self.cfg.weather_params, state.rng)
                info["sampled_actual_cover"] = float(min(max(cover, 0.0), 1.0))
                if cover <= self.cfg.weather_params.c_max:
                    state.status[mesh] = 0
                    reward = 1.0
                    info["validated"] = True
        state.t = t + 1
        if state.t < self._schedule.horizon:
            state.time = self._schedule.windows[state.t].time
        self._done = bool((state.status == 0).all()) or state.t >= self.cfg.max_steps
        return StepResult(self._observation(), reward, self._done, info)

    def _build_tables(self, schedule: PassSchedule) -> None:
        cfg = self.cfg
        ms = cfg.mesh_set
        n_w = schedule.horizon
        self._access = np.zeros((n_w, self._k), dtype=bool)
        self._cf = np.zeros((n_w, self._k), dtype=np.float32)
        self._prob_frames = np.zeros((n_w, ms.grid.n_lat, ms.grid.n_lon), dtype=np.float32)
        for t, w in enumerate(schedule.windows):
            frame = frame_at(cfg.weather_field, w.time)  # raises when coverage runs out
            self._cf[t] = frame[ms.lat_indices, ms.lon_indices]
            if w.accessible:
                idx = np.fromiter(sorted(w.accessible), dtype=np.int64)
                self._access[t, idx] = True
            self._prob_frames[t] = _probability_frame(
                w.accessible, w.time, ms, cfg.weather_field, cfg.weather_params
            )

    def _observation(self) -> NDArray[np.float32]:
        ms = self.cfg.mesh_set
        state = self._state
        obs = np.zeros(self.observation_shape, dtype=np.float32)
        obs[ms.lat_indices, ms.lon_indices, 0] = state.status
        lookahead = min(self.cfg.n_pass, self._schedule.horizon - state.t)
        if lookahead > 0:
            frames = self._prob_frames[state.t : state.t + lookahead]
            obs[:, :, 1 : 1 + lookahead] = np.moveaxis(frames, 0, 2)
        return obs

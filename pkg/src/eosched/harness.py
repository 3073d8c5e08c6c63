"""Benchmark harness: seeded episode batches and completion-time statistics.

Runs a Cartesian product of (agent, start date, weather seed), each cell
an independent, individually seeded episode. The episode seed is a
stable hash of (master seed, agent, date, weather seed): different
agents on the same (date, weather seed) share the forecast data and the
pass geometry, which pairs the comparison and cuts variance. Capped
episodes count at their cap length and are flagged, never dropped.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .agents import HeuristicAgent, HeuristicParams, RandomAgent
from .env import EnvConfig, Environment, StepResult, discounted_return
from .scenario import Scenario, load_scenario
from .timefmt import format_time, parse_time

# distinct from the environment's internal streams; see run_episode
_AGENT_STREAM_TAG = 0xA6E27


@dataclass
class EpisodeStats:
    agent_name: str
    seed: int
    start_date: str
    weather_seed: int
    length: int
    validated_count: int
    discounted_return: float
    capped: bool


@dataclass
class AgentSummary:
    runs: int
    mean: float
    median: float
    std: float


@dataclass
class BenchmarkSummary:
    per_agent: dict[str, AgentSummary]
    run_count: int
    config_digest: str


def episode_seed(master_seed: int, agent_name: str, start_date: str, weather_seed: int) -> int:
    """Stable (cross-process, cross-version) per-episode seed."""
    key = f"{master_seed}|{agent_name}|{start_date}|{weather_seed}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def make_agent(name: str, cfg: EnvConfig, heuristic: HeuristicParams | None = None):
    if name == "random":
        return RandomAgent(cfg.mesh_set)
    if name == "heuristic":
        params = heuristic or HeuristicParams(n_pass=cfg.n_pass)
        if params.n_pass != cfg.n_pass:
            raise ValueError(
                f"heuristic n_pass {params.n_pass} does not match scenario n_pass {cfg.n_pass}"
            )
        return HeuristicAgent(cfg.mesh_set, params)
    raise ValueError(f"unknown agent {name!r} (expected 'random' or 'heuristic')")


def run_episode(
    cfg: EnvConfig,
    agent,
    seed: int,
    start: datetime | None = None,
    *,
    weather_seed: int = 0,
    on_step: Callable[[int, int, StepResult], None] | None = None,
) -> EpisodeStats:
    """Play one episode to termination; deterministic per (cfg, agent, seed, start)."""
    env = Environment(cfg)
    obs = env.reset(seed, start)
    agent_rng = np.random.default_rng([seed, _AGENT_STREAM_TAG])
    begin = start if start is not None else cfg.weather_field.epoch
    rewards: list[float] = []
    while True:
        t = env.state.t
        action = agent.act(obs, agent_rng)
        result = env.step(action)
        if on_step is not None:
            on_step(t, action, result)
        rewards.append(result.reward)
        obs = result.observation
        if result.done:
            break
    validated = int(round(sum(rewards)))
    return EpisodeStats(
        agent_name=agent.name,
        seed=seed,
        start_date=format_time(begin),
        weather_seed=weather_seed,
        length=len(rewards),
        validated_count=validated,
        discounted_return=discounted_return(rewards, cfg.gamma),
        capped=validated < cfg.mesh_set.k,
    )


def benchmark_dates(scenario: Scenario, n: int) -> list[datetime]:
    """``n`` start dates spread evenly over the weather field's usable span.

    The usable span leaves room for a full worst-case episode (t_max
    passes plus look-ahead) after the latest start.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cfg = scenario.env_config()
    cp = scenario.constellation
    passes_needed = cfg.max_steps + cfg.n_pass
    period = 86400.0 / cp.passes_per_sat_per_day
    horizon_sec = (passes_needed / cp.n_sats + 3) * period + 2 * cp.jitter_seconds
    field = scenario.weather_field
    span = (field.end - field.epoch).total_seconds() - horizon_sec
    if span < 0:
        raise ValueError(
            "weather field is too short for even one worst-case episode; "
            f"needs about {horizon_sec / 86400:.0f} days"
        )
    if n == 1:
        return [field.epoch]
    return [field.epoch + timedelta(seconds=i * span / (n - 1)) for i in range(n)]


# process-pool plumbing: each worker loads the scenario document once
_WORKER: dict = {}


def _worker_init(doc: dict, base_dir: str, heuristic_kw: dict | None) -> None:
    scenario = load_scenario(doc, base_dir=base_dir)
    cfg = scenario.env_config()
    _WORKER["cfg"] = cfg
    _WORKER["heuristic_kw"] = heuristic_kw


def _worker_run(task: tuple[str, str, int, int]) -> EpisodeStats:
    agent_name, date_iso, weather_seed, seed = task
    cfg = _WORKER["cfg"]
    hk = _WORKER["heuristic_kw"]
    hp = HeuristicParams(n_pass=cfg.n_pass, **hk) if (hk and agent_name == "heuristic") else None
    agent = make_agent(agent_name, cfg, hp)
    return run_episode(cfg, agent, seed, parse_time(date_iso), weather_seed=weather_seed)


def run_benchmark(
    scenario: Scenario,
    agent_names: Sequence[str],
    dates: Sequence[datetime],
    weather_seeds: Sequence[int],
    *,
    master_seed: int = 0,
    heuristic: HeuristicParams | None = None,
    workers: int = 1,
    resolved_doc: dict | None = None,
    base_dir: str | Path | None = None,
) -> tuple[list[EpisodeStats], BenchmarkSummary]:
    """Run the full (agent x date x weather seed) grid and aggregate.

    ``workers > 1`` fans episodes out over processes (requires
    ``resolved_doc``/``base_dir`` so workers can reload the scenario);
    results are identical to a single-threaded run, order included.
    """
    if not agent_names or not dates or not weather_seeds:
        raise ValueError("agents, dates and weather_seeds must all be non-empty")
    tasks = [
        (name, format_time(date), int(ws), episode_seed(master_seed, name, format_time(date), int(ws)))
        for name in agent_names
        for date in dates
        for ws in weather_seeds
    ]
    if workers > 1:
        if resolved_doc is None:
            raise ValueError("workers > 1 needs the scenario document to ship to workers")
        hk = None if heuristic is None else {"alpha": heuristic.alpha, "beta": heuristic.beta}
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(resolved_doc, str(base_dir or Path.cwd()), hk),
        ) as pool:
            rows = list(pool.map(_worker_run, tasks, chunksize=4))
    else:
        cfg = scenario.env_config()
        agents = {name: make_agent(name, cfg, heuristic) for name in dict.fromkeys(agent_names)}
        rows = [
            run_episode(cfg, agents[name], seed, parse_time(date_iso), weather_seed=ws)
            for name, date_iso, ws, seed in tasks
        ]
    return rows, summarize(rows, scenario.digest)


def summarize(rows: Sequence[EpisodeStats], config_digest: str = "") -> BenchmarkSummary:
    """Per-agent mean/median/sample-std of episode length over all rows."""
    per_agent: dict[str, AgentSummary] = {}
    for name in dict.fromkeys(r.agent_name for r in rows):
        lengths = np.array([r.length for r in rows if r.agent_name == name], dtype=np.float64)
        per_agent[name] = AgentSummary(
            runs=int(lengths.size),
            mean=float(lengths.mean()),
            median=float(np.median(lengths)),
            std=float(lengths.std(ddof=1)) if lengths.size > 1 else 0.0,
        )
    return BenchmarkSummary(per_agent=per_agent, run_count=len(rows), config_digest=config_digest)


CSV_FIELDS = [
    "agent_name",
    "seed",
    "start_date",
    "weather_seed",
    "length",
    "validated_count",
    "discounted_return",
    "capped",
]


def write_episode_csv(rows: Sequence[EpisodeStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            rec = asdict(row)
            rec["discounted_return"] = repr(row.discounted_return)  # exact round-trip
            rec["capped"] = "true" if row.capped else "false"
            writer.writerow(rec)


def read_episode_csv(path: str | Path) -> list[EpisodeStats]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                EpisodeStats(
                    agent_name=rec["agent_name"],
                    seed=int(rec["seed"]),
                    start_date=rec["start_date"],
                    weather_seed=int(rec["weather_seed"]),
                    length=int(rec["length"]),
                    validated_count=int(rec["validated_count"]),
                    discounted_return=float(rec["discounted_return"]),
                    capped=rec["capped"] == "true",
                )
            )
    return rows


def format_summary_table(summary: BenchmarkSummary) -> str:
    lines = [f"{'agent':<12}{'runs':>6}{'mean':>10}{'median':>10}{'std':>10}"]
    for name, s in summary.per_agent.items():
        lines.append(f"{name:<12}{s.runs:>6}{s.mean:>10.1f}{s.median:>10.1f}{s.std:>10.1f}")
    lines.append(f"{summary.run_count} runs, config {summary.config_digest}")
    return "\n".join(lines)


def summary_to_json(summary: BenchmarkSummary) -> dict:
    return {
        "per_agent": {name: asdict(s) for name, s in summary.per_agent.items()},
        "run_count": summary.run_count,
        "config_digest": summary.config_digest,
    }


def rolling_mean(values: Sequence[float], window: int) -> np.ndarray:
    """Mean of the last ``window`` values at each index (partial at warm-up)."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    arr = np.asarray(values, dtype=np.float64)
    out = np.empty_like(arr)
    csum = np.cumsum(arr)
    for i in range(arr.size):
        lo = max(0, i - window + 1)
        total = csum[i] - (csum[lo - 1] if lo > 0 else 0.0)
        out[i] = total / (i - lo + 1)
    return out


def write_curve_csv(means: Sequence[float], path: str | Path) -> None:
    """Emit (step, mean_length) rows; step is the 0-based episode index."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "mean_length"])
        for i, m in enumerate(means):
            writer.writerow([i, repr(float(m))])

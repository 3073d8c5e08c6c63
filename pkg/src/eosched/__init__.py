"""Cloud-aware Earth-observation acquisition scheduling: simulator,
reference agents, benchmark harness and wire-protocol server."""

from .agents import (
    HeuristicAgent,
    HeuristicParams,
    RandomAgent,
    candidate_meshes,
    heuristic_action,
    heuristic_score,
    heuristic_scores,
    random_action,
)
from .env import EnvConfig, Environment, EnvState, StepResult, build_observation, discounted_return
from .grid import (
    GridSpec,
    MeshSet,
    build_mesh_set,
    load_mesh_set,
    mesh_index,
    mesh_set_from_json,
    mesh_set_to_json,
    save_mesh_set,
)
from .harness import (
    BenchmarkSummary,
    EpisodeStats,
    benchmark_dates,
    episode_seed,
    make_agent,
    rolling_mean,
    run_benchmark,
    run_episode,
    summarize,
)
from .passes import (
    ConstellationParams,
    PassSchedule,
    PassWindow,
    accessible_meshes,
    generate_schedule,
    schedule_to_json,
)
from .scenario import Scenario, elliptical_mask, load_scenario, write_bundled_configs
from .weather import (
    SynthParams,
    WeatherField,
    WeatherModelParams,
    forecast_at,
    generate_synthetic_weather,
    load_weather_field,
    read_weather_field,
    sample_actual_cover,
    sigma,
    validation_probability,
    write_weather_field,
)

__version__ = "0.1.0"

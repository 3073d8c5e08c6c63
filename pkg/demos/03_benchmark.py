"""Paired benchmark of the reference agents on the tiny scenario.

Same start dates and weather seeds for both agents, aggregate
statistics at the end, plus CSV artifacts and a rolling-mean curve like
the ones training monitors plot.
"""

from pathlib import Path

from eosched import benchmark_dates, load_scenario, rolling_mean, run_benchmark
from eosched.harness import format_summary_table, write_curve_csv, write_episode_csv

scenario = load_scenario("configs/tiny.json")
dates = benchmark_dates(scenario, 20)
print(f"20 start dates from {dates[0]:%Y-%m-%d} to {dates[-1]:%Y-%m-%d}, 2 weather seeds each\n")

rows, summary = run_benchmark(scenario, ["random", "heuristic"], dates, weather_seeds=[1, 2])
print(format_summary_table(summary))

out = Path("out/demo_benchmark")
out.mkdir(parents=True, exist_ok=True)
write_episode_csv(rows, out / "episodes.csv")

lengths = [r.length for r in rows if r.agent_name == "random"]
write_curve_csv(rolling_mean(lengths, 10), out / "random_curve.csv")
print(f"\nwrote {out}/episodes.csv and {out}/random_curve.csv")

random_mean = summary.per_agent["random"].mean
heuristic_mean = summary.per_agent["heuristic"].mean
print(f"heuristic completes the area in {heuristic_mean / random_mean:0.0%} of the random agent's passes")

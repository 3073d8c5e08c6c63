"""Command-line entry points: bench, simulate, curve, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agents import HeuristicParams
from .harness import (
    benchmark_dates,
    format_summary_table,
    make_agent,
    read_episode_csv,
    rolling_mean,
    run_benchmark,
    run_episode,
    summary_to_json,
    write_curve_csv,
    write_episode_csv,
)
from .scenario import load_scenario
from .server import serve_stdio, serve_tcp
from .timefmt import parse_time


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="eosched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run a seeded benchmark grid and write CSV + summary")
    p.add_argument("--config", required=True, help="scenario config JSON")
    p.add_argument("--agents", default="random,heuristic", help="comma-separated agent names")
    p.add_argument("--episodes", type=int, default=10, help="number of start dates")
    p.add_argument("--seeds", default="1", help="comma-separated weather seeds")
    p.add_argument("--dates", default=None, help="explicit comma-separated ISO start dates")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alpha", type=float, default=None, help="heuristic future-pass weight")
    p.add_argument("--beta", type=float, default=None, help="heuristic per-pass discount")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("simulate", help="run one traced episode")
    p.add_argument("--config", required=True)
    p.add_argument("--agent", default="heuristic")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--start", default=None, help="ISO start date (default: weather epoch)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--trace", default=None, help="write a JSON-lines step trace here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("curve", help="rolling-mean episode-length curve from a CSV")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--in", dest="input", required=True, help="CSV with a length column")
    p.add_argument("--column", default="length")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("serve", help="expose the environment over the wire protocol")
    p.add_argument("--config", required=True)
    p.add_argument("--listen", default=None, help="HOST:PORT (port 0 picks a free port)")
    p.add_argument("--stdio", action="store_true", help="serve one session over stdin/stdout")
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


def _heuristic_params(args, n_pass: int) -> HeuristicParams | None:
    if args.alpha is None and args.beta is None:
        return None
    defaults = HeuristicParams(n_pass=n_pass)
    return HeuristicParams(
        alpha=defaults.alpha if args.alpha is None else args.alpha,
        beta=defaults.beta if args.beta is None else args.beta,
        n_pass=n_pass,
    )


def _cmd_bench(args) -> int:
    scenario = load_scenario(args.config)
    agents = [a.strip() for a in args.agents.split(",") if a.strip()]
    weather_seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if args.dates:
        dates = [parse_time(d) for d in args.dates.split(",") if d.strip()]
    else:
        dates = benchmark_dates(scenario, args.episodes)
    with open(args.config, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows, summary = run_benchmark(
        scenario,
        agents,
        dates,
        weather_seeds,
        master_seed=args.master_seed,
        heuristic=_heuristic_params(args, scenario.n_pass),
        workers=args.workers,
        resolved_doc=doc,
        base_dir=Path(args.config).parent,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_episode_csv(rows, out / "episodes.csv")
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary_to_json(summary), fh, indent=1)
        fh.write("\n")
    table = format_summary_table(summary)
    (out / "summary.txt").write_text(table + "\n", encoding="utf-8")
    print(table)
    return 0


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.config)
    cfg = scenario.env_config()
    agent = make_agent(args.agent, cfg, _heuristic_params(args, scenario.n_pass))
    start = parse_time(args.start) if args.start else None
    sink = open(args.trace, "w", encoding="utf-8") if args.trace else None

    def on_step(t, action, result):
        if sink is None:
            return
        record = {
            "t": t,
            "action": action,
            "reward": result.reward,
            "validated": result.info["validated"],
            "mesh": result.info["chosen_mesh"],
            "sampled_cover": result.info["sampled_actual_cover"],
        }
        sink.write(json.dumps(record) + "\n")

    try:
        stats = run_episode(cfg, agent, args.seed, start, on_step=on_step)
    finally:
        if sink is not None:
            sink.close()
    print(json.dumps(stats.__dict__))
    return 0


def _cmd_curve(args) -> int:
    path = Path(args.input)
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        sniff = fh.readline()
        fh.seek(0)
        if args.column in [c.strip() for c in sniff.strip().split(",")]:
            lengths = [float(rec[args.column]) for rec in _csv.DictReader(fh)]
        else:
            lengths = [float(line.strip()) for line in fh if line.strip()]
    means = rolling_mean(lengths, args.window)
    if args.out:
        write_curve_csv(means, args.out)
    else:
        print("step,mean_length")
        for i, m in enumerate(means):
            print(f"{i},{m!r}")
    return 0


def _cmd_serve(args) -> int:
    scenario = load_scenario(args.config)
    cfg = scenario.env_config()
    if args.stdio:
        serve_stdio(cfg, sys.stdin.buffer, sys.stdout.buffer)
        return 0
    if not args.listen:
        print("serve needs --listen HOST:PORT or --stdio", file=sys.stderr)
        return 2
    host, _, port = args.listen.rpartition(":")
    try:
        serve_tcp(cfg, host or "127.0.0.1", int(port))
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""One full episode, step by step.

Loads the tiny bundled scenario, shows the first few passes of the
generated schedule, then lets the heuristic play one episode and prints
what happens at each acquisition.
"""

import numpy as np

from eosched import Environment, load_scenario, make_agent
from eosched.passes import schedule_to_json

scenario = load_scenario("configs/tiny.json")
cfg = scenario.env_config()
env = Environment(cfg)
obs = env.reset(seed=42)

print(f"K = {cfg.mesh_set.k} meshes, t_max = {cfg.max_steps}, n_pass = {cfg.n_pass}")
print(f"observation tensor shape: {obs.shape}\n")

print("first passes of the generated schedule:")
for rec in schedule_to_json(env.schedule)[:6]:
    acc = rec["accessible"]
    print(f"   pass {rec['index']:>2}  sat {rec['satellite_id']}  {rec['time']}  reaches {len(acc)} meshes")

agent = make_agent("heuristic", cfg)
rng = np.random.default_rng(0)
print("\nfirst ten decisions:")
total = 0.0
steps = 0
while not env.done:
    action = agent.act(obs, rng)
    result = env.step(action)
    total += result.reward
    steps += 1
    if steps <= 10:
        mesh = result.info["chosen_mesh"]
        cover = result.info["sampled_actual_cover"]
        verdict = "validated" if result.info["validated"] else "rejected "
        if mesh is None:
            print(f"   t={steps - 1:>3}  do nothing")
        else:
            print(f"   t={steps - 1:>3}  mesh {mesh:>2}  actual cover {cover:0.2f}  {verdict}")
    obs = result.observation

print(f"\nepisode finished in {steps} passes, {int(total)}/{cfg.mesh_set.k} meshes validated")

"""The environment served over newline-delimited JSON, driven remotely.

Starts an in-process server on a loopback port, speaks the protocol by
hand so every message is visible, and checks the remote trajectory
against a local environment instance.
"""

import json

import numpy as np

from eosched import Environment, load_scenario
from eosched.client import EnvClient
from eosched.server import start_server_thread

scenario = load_scenario("configs/tiny.json")
cfg = scenario.env_config()
server, _ = start_server_thread(cfg)
host, port = server.server_address[:2]
print(f"server on {host}:{port}\n")

client = EnvClient(host, port, encoding="b64f32")

spec = client.call({"kind": "hello", "encoding": "b64f32"})
print(">>", json.dumps({"kind": "hello", "encoding": "b64f32"}))
print("<<", json.dumps(spec), "\n")

local = Environment(cfg)
local_obs = local.reset(seed=7)
obs, reward, done, info = client.reset(seed=7)
print(">>", json.dumps({"kind": "reset", "seed": 7}))
print(f"<< state with observation shape {obs.shape} (f32, base64 on the wire)")
print(f"   remote == local observation: {obs.tobytes() == local_obs.tobytes()}\n")

for action in (1, 0, 5):
    obs, reward, done, info = client.step(action)
    result = local.step(action)
    match = obs.tobytes() == result.observation.tobytes() and reward == result.reward
    print(f">> step action={action}   << reward={reward} done={done} info={info}")
    print(f"   matches local: {match}")

# protocol errors keep the session alive
resp = client.call({"kind": "step", "action": 999})
print("\n>> step action=999")
print("<<", json.dumps(resp))

client.close()
server.shutdown()
server.server_close()
print("\nsession closed")

"""Newline-delimited JSON protocol server exposing the environment.

One JSON object per line, UTF-8, one response per request, in order.
Each connection owns an isolated environment instance, so N training
workers simply open N connections. Protocol violations answer with an
``error`` object and leave the session alive whenever recoverable.

Requests:  hello{encoding?}, reset{seed, start_date?}, step{action}, close
Responses: spec{n_lat, n_lon, n_pass, K, action_count},
           state{observation, reward, done, info},
           error{code, message}, and ok (close acknowledgement)

Observations travel as {"shape": [...], "data": [...]} with plain JSON
numbers, or base64 little-endian float32 when the client asked for the
"b64f32" encoding in hello. See PROTOCOL.md for byte-level examples.
"""

from __future__ import annotations

import base64
import json
import socketserver
import threading
from typing import BinaryIO

import numpy as np
from numpy.typing import NDArray

from .env import EnvConfig, Environment
from .timefmt import parse_time

ENCODINGS = ("json", "b64f32")


def encode_observation(obs: NDArray[np.float32], encoding: str = "json") -> dict:
    if encoding == "b64f32":
        blob = np.ascontiguousarray(obs, dtype="<f4").tobytes()
        return {
            "shape": list(obs.shape),
            "encoding": "b64f32",
            "data": base64.b64encode(blob).decode("ascii"),
        }
    return {"shape": list(obs.shape), "data": [float(x) for x in obs.ravel()]}


def decode_observation(doc: dict) -> NDArray[np.float32]:
    shape = tuple(int(d) for d in doc["shape"])
    if doc.get("encoding") == "b64f32":
        flat = np.frombuffer(base64.b64decode(doc["data"]), dtype="<f4")
    else:
        flat = np.asarray(doc["data"], dtype=np.float64).astype(np.float32)
    return flat.reshape(shape)


class Session:
    """State machine for one connection: an env instance plus its encoding."""

    def __init__(self, cfg: EnvConfig):
        self.env = Environment(cfg)
        self.encoding = "json"
        self.has_episode = False

    def process_line(self, line: bytes | str) -> tuple[dict, bool]:
        """Handle one request line; returns (response, close_session)."""
        try:
            request = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return _error("bad_request", "line is not valid JSON"), False
        if not isinstance(request, dict):
            return _error("bad_request", "request must be a JSON object"), False
        try:
            return self._dispatch(request)
        except Exception as exc:  # keep the session alive on anything unexpected
            return _error("internal", f"{type(exc).__name__}: {exc}"), False

    def _dispatch(self, request: dict) -> tuple[dict, bool]:
        kind = request.get("kind")
        if kind == "hello":
            encoding = request.get("encoding", self.encoding)
            if encoding not in ENCODINGS:
                return _error("bad_request", f"unknown encoding {encoding!r}"), False
            self.encoding = encoding
            env = self.env
            n_lat, n_lon, depth = env.observation_shape
            return {
                "kind": "spec",
                "n_lat": n_lat,
                "n_lon": n_lon,
                "n_pass": depth - 1,
                "K": env.k,
                "action_count": env.action_count,
            }, False
        if kind == "reset":
            if not isinstance(request.get("seed"), int):
                return _error("bad_request", "reset needs an integer 'seed'"), False
            start = request.get("start_date")
            try:
                begin = parse_time(start) if start is not None else None
                obs = self.env.reset(request["seed"], begin)
            except ValueError as exc:
                return _error("bad_request", str(exc)), False
            self.has_episode = True
            return self._state(obs, 0.0, False, {}), False
        if kind == "step":
            if not self.has_episode or self.env.done:
                return _error("no_episode", "no running episode; send reset first"), False
            action = request.get("action")
            if not isinstance(action, int):
                return _error("bad_request", "step needs an integer 'action'"), False
            try:
                result = self.env.step(action)
            except ValueError as exc:
                return _error("bad_action", str(exc)), False
            return self._state(result.observation, result.reward, result.done, result.info), False
        if kind == "close":
            return {"kind": "ok"}, True
        return _error("bad_request", f"unknown request kind {kind!r}"), False

    def _state(self, obs, reward: float, done: bool, info: dict) -> dict:
        return {
            "kind": "state",
            "observation": encode_observation(obs, self.encoding),
            "reward": float(reward),
            "done": bool(done),
            "info": info,
        }


def _error(code: str, message: str) -> dict:
    return {"kind": "error", "code": code, "message": message}


def _session_loop(cfg: EnvConfig, rfile: BinaryIO, wfile: BinaryIO) -> None:
    session = Session(cfg)
    for line in rfile:
        if not line.strip():
            continue
        response, close = session.process_line(line)
        wfile.write((json.dumps(response) + "\n").encode("utf-8"))
        wfile.flush()
        if close:
            break


class EnvServer(socketserver.ThreadingTCPServer):
    """One thread per connection; sessions share only immutable config."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, cfg: EnvConfig, address: tuple[str, int]):
        self.env_config = cfg
        super().__init__(address, _TCPHandler)


class _TCPHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        try:
            _session_loop(self.server.env_config, self.rfile, self.wfile)
        except (BrokenPipeError, ConnectionResetError):
            pass  # client went away mid-session


def serve_tcp(cfg: EnvConfig, host: str, port: int) -> None:
    """Serve until interrupted; prints the bound address once ready."""
    with EnvServer(cfg, (host, port)) as server:
        bound_host, bound_port = server.server_address[:2]
        print(f"listening on {bound_host}:{bound_port}", flush=True)
        server.serve_forever()


def start_server_thread(cfg: EnvConfig, host: str = "127.0.0.1", port: int = 0) -> tuple[EnvServer, threading.Thread]:
    """In-process server for tests and demos; caller shuts it down."""
    server = EnvServer(cfg, (host, port))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


def serve_stdio(cfg: EnvConfig, rfile: BinaryIO, wfile: BinaryIO) -> None:
    """Single session over a byte-stream pair (e.g. stdin/stdout)."""
    _session_loop(cfg, rfile, wfile)

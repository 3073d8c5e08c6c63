"""Client for the environment wire protocol, used by tests and demos."""

from __future__ import annotations

import json
import socket

import numpy as np
from numpy.typing import NDArray

from .server import decode_observation


class ProtocolError(RuntimeError):
    """An error response from the server."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class EnvClient:
    """One protocol session over TCP; call hello() before reset/step."""

    def __init__(self, host: str, port: int, encoding: str = "b64f32", timeout: float = 60.0):
        self.encoding = encoding
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rwb")
        self.spec: dict | None = None

    def call(self, request: dict) -> dict:
        """Send one request object, return the raw response object."""
        self._file.write((json.dumps(request) + "\n").encode("utf-8"))
        self._file.flush()
        line = self._file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line)

    def _checked(self, request: dict) -> dict:
        response = self.call(request)
        if response.get("kind") == "error":
            raise ProtocolError(response.get("code", "?"), response.get("message", ""))
        return response

    def hello(self) -> dict:
        self.spec = self._checked({"kind": "hello", "encoding": self.encoding})
        return self.spec

    def reset(self, seed: int, start_date: str | None = None) -> tuple[NDArray[np.float32], float, bool, dict]:
        request: dict = {"kind": "reset", "seed": seed}
        if start_date is not None:
            request["start_date"] = start_date
        return self._unpack(self._checked(request))

    def step(self, action: int) -> tuple[NDArray[np.float32], float, bool, dict]:
        return self._unpack(self._checked({"kind": "step", "action": action}))

    @staticmethod
    def _unpack(response: dict) -> tuple[NDArray[np.float32], float, bool, dict]:
        return (
            decode_observation(response["observation"]),
            float(response["reward"]),
            bool(response["done"]),
            response["info"],
        )

    def close(self) -> None:
        try:
            self._checked({"kind": "close"})
        finally:
            self._file.close()
            self._sock.close()

    def __enter__(self) -> "EnvClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

"""Reference decision policies: uniform-random and the expert heuristic.

Both act on the observation tensor alone. A mesh is a *candidate* when
its current-pass probability frame is positive (positive p exactly
encodes reachability) and its status frame still reads 1. The heuristic
ranks candidates by a now-versus-later trade-off

    score(m) = p(m, 1) + alpha * (1 - mean_{n=2..N} beta^n * p(m, n))

where the mean runs over the N-1 future passes: a mesh that is likely
clear now but unlikely to be acquirable later outranks one that can
wait. Ties break toward the lowest mesh index; with no candidate both
policies fall back to the do-nothing action 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import MeshSet


@dataclass(frozen=True)
class HeuristicParams:
    alpha: float = 1.0
    beta: float = 0.99
    n_pass: int = 20

    def __post_init__(self) -> None:
        if self.n_pass < 2:
            raise ValueError(f"n_pass must be >= 2 for the future term, got {self.n_pass}")
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")


def _mesh_frames(obs: NDArray, ms: MeshSet) -> tuple[NDArray, NDArray]:
    """Per-mesh (status, probability-stack) views of an observation."""
    rows, cols = ms.lat_indices, ms.lon_indices
    return obs[rows, cols, 0], obs[rows, cols, 1:]


def candidate_meshes(obs: NDArray, ms: MeshSet) -> NDArray[np.int64]:
    """Mesh indices that are unvalidated and reachable on the current pass."""
    status, probs = _mesh_frames(obs, ms)
    return np.nonzero((status == 1) & (probs[:, 0] > 0))[0]


def random_action(obs: NDArray, ms: MeshSet, rng: np.random.Generator) -> int:
    """Uniform choice among candidate meshes; 0 when there is none."""
    candidates = candidate_meshes(obs, ms)
    if candidates.size == 0:
        return 0
    return int(candidates[rng.integers(candidates.size)]) + 1


def heuristic_scores(obs: NDArray, ms: MeshSet, hp: HeuristicParams) -> NDArray[np.float64]:
    """Trade-off score of every mesh (vectorized)."""
    if obs.shape[2] - 1 != hp.n_pass:
        raise ValueError(
            f"params expect n_pass={hp.n_pass}, observation carries {obs.shape[2] - 1}"
        )
    _, probs = _mesh_frames(obs, ms)
    probs = probs.astype(np.float64)
    weights = hp.beta ** np.arange(2, hp.n_pass + 1, dtype=np.float64)
    future = probs[:, 1:] @ weights / (hp.n_pass - 1)
    return probs[:, 0] + hp.alpha * (1.0 - future)


def heuristic_score(obs: NDArray, ms: MeshSet, mesh: int, hp: HeuristicParams) -> float:
    """Trade-off score of a single mesh."""
    if not 0 <= mesh < ms.k:
        raise IndexError(f"mesh index {mesh} out of range 0..{ms.k - 1}")
    return float(heuristic_scores(obs, ms, hp)[mesh])


def _argmax_candidate(scores: NDArray, candidates: NDArray) -> int:
    """Action for the best-scoring candidate; ties -> lowest mesh index."""
    if candidates.size == 0:
        return 0
    best = candidates[np.argmax(scores[candidates])]  # argmax keeps the first maximum
    return int(best) + 1


def heuristic_action(obs: NDArray, ms: MeshSet, hp: HeuristicParams) -> int:
    """Best candidate by trade-off score; 0 when there is no candidate."""
    return _argmax_candidate(heuristic_scores(obs, ms, hp), candidate_meshes(obs, ms))


class RandomAgent:
    """Picks uniformly among candidate meshes each pass."""

    name = "random"

    def __init__(self, ms: MeshSet):
        self.ms = ms

    def act(self, obs: NDArray, rng: np.random.Generator) -> int:
        return random_action(obs, self.ms, rng)


class HeuristicAgent:
    """Expert trade-off policy; deterministic given the observation."""

    name = "heuristic"

    def __init__(self, ms: MeshSet, params: HeuristicParams | None = None):
        self.ms = ms
        self.params = params or HeuristicParams()

    def act(self, obs: NDArray, rng: np.random.Generator) -> int:
        return heuristic_action(obs, self.ms, self.params)

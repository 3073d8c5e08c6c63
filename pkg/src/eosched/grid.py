"""Acquisition grid and area-of-interest (AOI) mesh bookkeeping.

The AOI is a boolean mask over a rectangular lat/lon grid. Every masked
cell is one *mesh*, the atomic unit of acquisition. Meshes are numbered
0..K-1 in row-major order (rows north to south, columns west to east);
that numbering is the contract every other module relies on, in
particular the action encoding where action ``k + 1`` selects mesh ``k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid with row 0 at the north-west corner.

    ``lat0``/``lon0``/``res_deg`` are carried as metadata for export and
    display only; the simulator never does distance math with them.
    """

    n_lat: int
    n_lon: int
    lat0: float = 0.0
    lon0: float = 0.0
    res_deg: float = 0.5

    def __post_init__(self) -> None:
        if self.n_lat < 1 or self.n_lon < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.n_lat}x{self.n_lon}")
        if self.res_deg <= 0:
            raise ValueError(f"res_deg must be > 0, got {self.res_deg}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_lat, self.n_lon)

    def contains(self, lat_idx: int, lon_idx: int) -> bool:
        return 0 <= lat_idx < self.n_lat and 0 <= lon_idx < self.n_lon


@dataclass(frozen=True, eq=False)
class MeshSet:
    """The AOI meshes of a grid plus both directions of the index mapping.

    ``meshes[k]`` is the (lat_idx, lon_idx) cell of mesh ``k``;
    ``index_of[i, j]`` is the mesh index of cell (i, j), or -1 outside
    the AOI. All arrays are read-only; instances may be shared freely.
    """

    grid: GridSpec
    mask: NDArray[np.bool_]
    meshes: NDArray[np.int64]
    index_of: NDArray[np.int64] = field(repr=False)

    @property
    def k(self) -> int:
        """Number of meshes in the AOI."""
        return int(self.meshes.shape[0])

    @property
    def lat_indices(self) -> NDArray[np.int64]:
        return self.meshes[:, 0]

    @property
    def lon_indices(self) -> NDArray[np.int64]:
        return self.meshes[:, 1]

    def cell_of(self, mesh: int) -> tuple[int, int]:
        if not 0 <= mesh < self.k:
            raise IndexError(f"mesh index {mesh} out of range 0..{self.k - 1}")
        return int(self.meshes[mesh, 0]), int(self.meshes[mesh, 1])


def build_mesh_set(grid: GridSpec, mask: NDArray) -> MeshSet:
    """Build the mesh set for ``mask`` with row-major index assignment.

    Raises ValueError on a mask/grid shape mismatch or an all-false mask;
    both are configuration errors.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.shape:
        raise ValueError(f"mask shape {mask.shape} does not match grid {grid.shape}")
    if not mask.any():
        raise ValueError("mask selects no cells; the AOI must contain at least one mesh")
    mask = mask.copy()
    meshes = np.argwhere(mask).astype(np.int64)  # argwhere scans row-major
    index_of = np.full(grid.shape, -1, dtype=np.int64)
    index_of[meshes[:, 0], meshes[:, 1]] = np.arange(meshes.shape[0], dtype=np.int64)
    for arr in (mask, meshes, index_of):
        arr.setflags(write=False)
    return MeshSet(grid=grid, mask=mask, meshes=meshes, index_of=index_of)


def mesh_index(ms: MeshSet, lat_idx: int, lon_idx: int) -> int | None:
    """Mesh index of cell (lat_idx, lon_idx), or None for a non-AOI cell.

    Raises IndexError for out-of-bounds coordinates.
    """
    if not ms.grid.contains(lat_idx, lon_idx):
        raise IndexError(
            f"cell ({lat_idx}, {lon_idx}) outside grid {ms.grid.n_lat}x{ms.grid.n_lon}"
        )
    k = int(ms.index_of[lat_idx, lon_idx])
    return None if k < 0 else k


def mesh_set_to_json(ms: MeshSet) -> dict:
    """Serialize to the mask-document layout (mask rows north to south)."""
    return {
        "n_lat": ms.grid.n_lat,
        "n_lon": ms.grid.n_lon,
        "lat0": ms.grid.lat0,
        "lon0": ms.grid.lon0,
        "res_deg": ms.grid.res_deg,
        "mask": ms.mask.astype(int).tolist(),
    }


def mesh_set_from_json(doc: dict) -> MeshSet:
    """Parse a mask document; values must be 0 or 1."""
    try:
        grid = GridSpec(
            n_lat=int(doc["n_lat"]),
            n_lon=int(doc["n_lon"]),
            lat0=float(doc["lat0"]),
            lon0=float(doc["lon0"]),
            res_deg=float(doc["res_deg"]),
        )
        rows = doc["mask"]
    except KeyError as exc:
        raise ValueError(f"mask document is missing field {exc.args[0]!r}") from exc
    mask = np.asarray(rows)
    if mask.ndim != 2:
        raise ValueError("mask must be a list of equal-length rows")
    if not np.isin(mask, (0, 1)).all():
        raise ValueError("mask entries must be 0 or 1")
    return build_mesh_set(grid, mask.astype(bool))


def load_mesh_set(path: str | Path) -> MeshSet:
    with open(path, encoding="utf-8") as fh:
        return mesh_set_from_json(json.load(fh))


def save_mesh_set(ms: MeshSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mesh_set_to_json(ms), fh, indent=1)
        fh.write("\n")

"""Grids, meshes and the cloud-cover model, end to end.

Builds the bundled 122-mesh area of interest, prints it, then walks
through the noise model: sigma, the analytic validation probability and
a Monte-Carlo cross-check of the two.
"""

import numpy as np

from eosched import (
    GridSpec,
    WeatherModelParams,
    build_mesh_set,
    mesh_index,
    sample_actual_cover,
    sigma,
    validation_probability,
)
from eosched.scenario import elliptical_mask

# --- the area of interest ------------------------------------------------

grid = GridSpec(n_lat=14, n_lon=13, lat0=51.5, lon0=-5.0, res_deg=0.54)
ms = build_mesh_set(grid, elliptical_mask(14, 13, 122))
print(f"grid {grid.n_lat}x{grid.n_lon}, K = {ms.k} meshes\n")
for row in ms.mask:
    print("   " + "".join(".#"[int(v)] for v in row))

# mesh indices are row-major over the mask; the mapping inverts exactly
k = mesh_index(ms, 6, 0)
print(f"\nwesternmost mesh of row 6 is mesh {k}; cell_of({k}) = {ms.cell_of(k)}")

# --- the forecast-error model ---------------------------------------------

params = WeatherModelParams(u=0.1, v=0.2, c_max=0.2)
print("\nforecast cover -> sigma, P(validate):")
for cf in (0.0, 0.2, 0.5, 0.8, 1.0):
    print(f"   c_f = {cf:0.1f}   sigma = {sigma(cf, params):0.3f}   p = {validation_probability(cf, params):0.4f}")

# the sampled dynamics agree with the closed form
rng = np.random.default_rng(1)
cf = 0.35
draws = sample_actual_cover(np.full(200_000, cf), params, rng)
print(f"\nMonte-Carlo at c_f = {cf}: {float((draws <= params.c_max).mean()):0.4f}")
print(f"analytic:                 {validation_probability(cf, params):0.4f}")

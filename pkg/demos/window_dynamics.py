"""Window sizes of the two adaptive rules when every swap disconnects with probability p."""

import math

import numpy as np

from swapchain.shuffle import GEOMETRIC, GKANTSIDIS, simulate_heuristic, theta_max

rng = np.random.default_rng(0)
print(f"{'p':>8} {'T_gkan':>9} {'sqrt(2/p)':>9} {'theta_gkan':>10} {'theta_geo':>9} {'theta_max':>9}")
for p in (1e-2, 1e-3, 1e-4):
    gk = simulate_heuristic(GKANTSIDIS, p, 200_000, rng).tail()
    geo = simulate_heuristic(GEOMETRIC, p, 200_000, rng).tail()
    print(f"{p:8g} {gk.mean_T:9.1f} {math.sqrt(2 / p):9.1f} {gk.theta:10.1f} "
          f"{geo.theta:9.1f} {theta_max(p)[1]:9.1f}")

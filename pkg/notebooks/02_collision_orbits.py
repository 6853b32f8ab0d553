# %% [markdown]
# # Collision orbits near a Lagrange configuration
#
# Generate an orbit on the collision manifold leaving the equilibrium along
# both unstable shape modes and check that the rotation angle converges
# exponentially fast.

# %%
import numpy as np

from ccspin.ccfind import classify, solve_cc
from ccspin.core import MassedConfiguration
from ccspin.dynamics import asymptotic_exponents, homothetic_cartesian, make_collision_orbit, theta_limit
from ccspin.frame import build_chart

s3 = np.sqrt(3)
cc = solve_cc(MassedConfiguration([1, 2, 3], [-s3 / 2, -0.5, s3 / 2, -0.5, 0, 1]))
chart = build_chart(classify(cc))

# %%
orbit = make_collision_orbit(chart, mix=[1, 1], delta=1e-6, zmax=0.05)
lim = theta_limit(orbit.tau, orbit.theta)
print("tail", lim.tail_model, "sigma", lim.sigma, "R2", lim.r2)
print("max energy residual", np.abs(orbit.energy_residual).max())

# %% [markdown]
# Homothetic collapse in Cartesian coordinates: power laws of I and U.

# %%
fits = asymptotic_exponents(homothetic_cartesian(chart))
print({k: round(fits[k].slope, 6) for k in ("I", "U", "K", "r")})

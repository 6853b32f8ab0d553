# %% [markdown]
# # Equilateral triangle with a central mass
#
# Sweep the central mass, locate the value where the restricted Hessian
# gains a two-dimensional kernel, and evaluate the cubic data that decide
# the spin question there.

# %%
import numpy as np

from ccspin.catalog import M4_STAR, equilateral_family, locate_degenerate_mass
from ccspin.frame import build_chart
from ccspin.normal_forms import center_manifold_quadratic, spin_verdict

for m4 in np.linspace(0.5, 1.0, 6):
    rep = equilateral_family(m4)["report"]
    print(f"m4={m4:.2f}  smallest eig={rep.eig[0]: .3e}  n0={rep.partition.n0}")

# %%
m4 = locate_degenerate_mass()
print("root", m4, "closed form", M4_STAR, "diff", m4 - M4_STAR)

# %%
rep = equilateral_family(M4_STAR)["report"]
chart = build_chart(rep)
v = spin_verdict(rep, chart)
print(v.case, "normalized discriminant", v.normalized_discriminant)
print("characteristic directions", np.round(v.supporting["theta0"], 4))
print("halving ratio of the invariance residual", center_manifold_quadratic(chart).residual_ratio)

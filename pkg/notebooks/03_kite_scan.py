# %% [markdown]
# # Kite family: two-degree degeneracy scan
#
# Numerical evidence on a grid only; sign changes of one determinant are
# expected, simultaneous zeros are not.

# %%
import numpy as np

from ccspin.catalog import kite_two_degree_scan, rhombic_eigenvalues

scan = kite_two_degree_scan(n=200, threads=4)
print(scan.to_json())

# %% [markdown]
# Rhombic family: the two largest eigenvalues cross at 1 + sqrt(2).

# %%
for z in (2.2, 1 + np.sqrt(2), 2.6):
    e = rhombic_eigenvalues(z)
    print(f"zeta={z:.4f}  mu7-mu8={e['mu7'] - e['mu8']: .3e}")

"""Single barrier: nodal versus non-nodal insertion.

Inserting a wall at a node of sin(theta) leaves the state untouched; it is the
n = 2 mode of the new well.  Inserting it at theta = 0 into cos(theta) instead
populates every odd mode, and each one carries about 4/pi**2 of energy, so the
total grows without bound as modes are added.
"""

import math

import numpy as np

from ringwell import PHI, RingState, classify_point, divergence_scan, insert_single, truncated_energy
from ringwell.energy import odd_mode_increment

# %% nodal insertion
print("sin(theta) at 0 ->", classify_point(PHI, 0.0).value)
exp = insert_single(PHI, 0.0, 8)
print("coefficients:", np.round(exp.coeffs.real, 12))
print("energy after insertion:", truncated_energy(exp))

# %% non-nodal insertion
cos = RingState.cos()
print("\ncos(theta) at 0 ->", classify_point(cos, 0.0).value)
scan = divergence_scan(cos, 0.0, [100, 200, 400, 800, 1600])
for N, energy in scan:
    print(f"N = {N:5d}  partial energy = {energy:10.4f}")
print("energy per odd mode:", [round(x, 5) for x in odd_mode_increment(scan)])
print("4/pi^2 =", round(4 / math.pi**2, 5))

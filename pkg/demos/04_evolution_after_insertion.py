"""Free evolution after a non-nodal insertion.

The coefficients only pick up phases, so norm and truncated energy are
constant, while the sampled wave function develops the rough, carpet-like
structure typical of a sudden quench in a box.  The samples are printed; feed
them to any plotting tool.
"""

import math

import numpy as np

from ringwell import RingState, TimeGrid, evolve, insert_single, sample_grid, truncated_energy

exp = insert_single(RingState.cos(), 0.0, 500)
thetas = np.linspace(0, 2 * math.pi, 9)
e0 = truncated_energy(exp)

for t in TimeGrid(0.0, 0.5, 5).times:
    later = evolve(exp, float(t))
    amp = sample_grid(later, thetas)
    print(f"t = {t:.2f}  norm = {math.sqrt(later.weight):.12f}  "
          f"energy drift = {truncated_energy(later) - e0:+.1e}")
    print("   |psi|:", np.round(np.abs(amp), 3))

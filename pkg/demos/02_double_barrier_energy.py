"""Two barriers at 0 and alpha: chamber expansions and energy transfers.

phi = sin(theta) has a node at 0 but not at alpha; psi = sin(theta - alpha) is
the mirror case.  Both re-expand on the chambers (0, alpha) and (alpha, 2 pi),
with coefficient magnitudes that coincide mode by mode, so the energy
transferred on every branch (n, m) is the same for both.
"""

import math

import numpy as np

from ringwell import PHI, build_extended_after, energy_ledger, insert_double, parseval_defect, psi_state

alpha = math.pi / 4

# %% chamber expansions
for N in (10, 100, 1000, 10000):
    print(f"N = {N:5d}  Parseval defect = {parseval_defect(insert_double(PHI, alpha, N), PHI):.3e}")

two_phi = insert_double(PHI, alpha, 5)
two_psi = insert_double(psi_state(alpha), alpha, 5)
print("\nleft chamber  phi:", np.round(two_phi.left_chamber.coeffs.real, 6))
print("left chamber  psi:", np.round(two_psi.left_chamber.coeffs.real, 6))

# %% energy transfer table
phi = energy_ledger(alpha, 6, 6, "phi")
psi = energy_ledger(alpha, 6, 6, "psi")
np.set_printoptions(precision=3, suppress=True)
print("\ndE_nm (rows n, columns m):\n", phi.table)
print("max |dE_phi - dE_psi| =", np.abs(phi.table - psi.table).max())
print("smallest |dE| for n, m <= 50:", energy_ledger(alpha, 50, 50).min_abs)

# %% barrier bookkeeping
ext = build_extended_after(PHI, alpha, 3)
for term in ext.terms[:4]:
    print(term.particle, f"particle {term.particle_energy_change:+.4f}",
          f"barrier@0 {term.barrier0.energy_tag:+.4f}", f"barrier@alpha {term.barrierA.energy_tag:+.4f}")

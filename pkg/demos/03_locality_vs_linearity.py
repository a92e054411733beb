"""Why energy-free nodal insertion and linear insertion maps cannot coexist.

For every pair of chamber modes the branch weights R0 and Ralpha are fixed
twice, once from each chamber.  The two determinations disagree everywhere on
0 < alpha < pi/2, and the condition they leave behind, sin(alpha) = (-1)^(n+m),
has no solution there.
"""

import math

from ringwell import consistency_scan, solve_R_weights
from ringwell.loclin import default_alpha_grid, exact_solution

# %% one cell
sol = solve_R_weights(1, 2, math.pi / 4)
print("R0 from the left chamber :", sol.R0_from_eq3)
print("R0 from the right chamber:", sol.R0_from_eq4)
print("exact:", {k: str(v) for k, v in exact_solution(1, 2, "1/4").items()})

# %% full grid
report = consistency_scan(default_alpha_grid(50), 10, 10)
print("\nverdict:", report.verdict)
print("smallest residual:", report.min_abs_residual_eq9, "at (n, m, alpha) =", report.worst_cell)
print("floor 1 - sin(pi/2 - 0.05) =", 1 - math.sin(math.pi / 2 - 0.05))

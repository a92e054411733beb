"""Consistency check of energy-free nodal insertion against linear insertion maps.

Writing ``sin(t - alpha) = cos(alpha) sin(t) - sin(alpha) cos(t)`` and mapping
each piece linearly, the branch weights ``R0`` (all transferred energy at the
barrier at 0) and ``Ra`` (all at alpha) must satisfy four matching
conditions, one per chamber and barrier configuration:

    1 = R0 (1 - (-1)^n cos a)                    (left chamber, energy at 0)
    (-1)^m sin a = R0 ((-1)^m - cos a)           (right chamber, energy at 0)
    (-1)^n cos a = Ra ((-1)^n cos a - 1)         (left chamber, energy at alpha)
    cos a = Ra (cos a - (-1)^m)                  (right chamber, energy at alpha)

Eliminating ``R0`` and ``Ra`` pairwise leaves two conditions on ``alpha``
alone, which together require ``sin a = (-1)^(n+m)``; that is impossible for
``a`` in ``(0, pi/2)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .overlap import _check_alpha

LEFT_ZERO = "left@0"
RIGHT_ZERO = "right@0"
LEFT_ALPHA = "left@alpha"
RIGHT_ALPHA = "right@alpha"


class DenominatorZero(ZeroDivisionError):
    def __init__(self, equation: str, n: int, m: int, alpha: float):
        super().__init__(f"vanishing denominator in the {equation} condition at n={n}, m={m}, alpha={alpha}")
        self.equation = equation


class EmptyGrid(ValueError):
    pass


def _parity(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass(frozen=True)
class RWeightSolution:
    n: int
    m: int
    alpha: float
    R0_from_eq3: float
    R0_from_eq4: float
    Ralpha_from_eq6: float
    Ralpha_from_eq7: float
    norm_defect: float
    residual_eq5: float
    residual_eq8: float
    residual_eq9: float
    residual_eq5_chain: float
    residual_eq8_chain: float

    @property
    def branch_gap(self) -> float:
        """Largest disagreement between the two determinations of each weight."""
        return max(abs(self.R0_from_eq3 - self.R0_from_eq4),
                   abs(self.Ralpha_from_eq6 - self.Ralpha_from_eq7))

    def satisfiable(self, threshold: float) -> bool:
        return self.branch_gap <= threshold and abs(self.norm_defect) <= threshold


def _divide(num, den, label, n, m, alpha):
    if abs(den) < 1e-300:
        raise DenominatorZero(label, n, m, alpha)
    return num / den


def solve_R_weights(n: int, m: int, alpha: float) -> RWeightSolution:
    """Solve each matching condition for its branch weight and evaluate the residuals."""
    _check_alpha(alpha)
    sn, sm = _parity(n), _parity(m)
    s, c = math.sin(alpha), math.cos(alpha)

    r0_3 = _divide(1.0, 1.0 - sn * c, LEFT_ZERO, n, m, alpha)
    r0_4 = _divide(sm * s, sm - c, RIGHT_ZERO, n, m, alpha)
    ra_6 = _divide(sn * c, sn * c - 1.0, LEFT_ALPHA, n, m, alpha)
    ra_7 = _divide(c, c - sm, RIGHT_ALPHA, n, m, alpha)

    res5 = abs((sm - c) - sm * s * (1.0 - sn * c))
    res8 = abs(sn * (c - sm) - (sn * c - 1.0))
    # the same eliminations, but routed through the branch solutions
    res5_chain = abs(sm * s / r0_4 - sm * s / r0_3)
    res8_chain = abs(sn * c / ra_7 - sn * c / ra_6)

    return RWeightSolution(
        n=n, m=m, alpha=alpha,
        R0_from_eq3=r0_3, R0_from_eq4=r0_4,
        Ralpha_from_eq6=ra_6, Ralpha_from_eq7=ra_7,
        norm_defect=r0_3**2 + ra_6**2 - 1.0,
        residual_eq5=res5, residual_eq8=res8,
        residual_eq9=residual_eq9(n, m, alpha),
        residual_eq5_chain=res5_chain, residual_eq8_chain=res8_chain,
    )


def residual_eq9(n: int, m: int, alpha: float) -> float:
    """``|sin(alpha) - (-1)^(n+m)|``; positive on the whole open interval."""
    _check_alpha(alpha)
    return abs(math.sin(alpha) - _parity(n + m))


# --- exact arithmetic at rational multiples of pi ---------------------------


def exact_angle(fraction_of_pi: Fraction | str):
    """Sympy angle ``p/q * pi`` from a :class:`Fraction` or a string like ``"1/4"``."""
    frac = Fraction(fraction_of_pi)
    return sympy.Rational(frac.numerator, frac.denominator) * sympy.pi


def exact_residual_eq9(n: int, m: int, fraction_of_pi) -> sympy.Expr:
    alpha = exact_angle(fraction_of_pi)
    return sympy.nsimplify(sympy.Abs(sympy.sin(alpha) - (-1) ** (n + m)))


def exact_solution(n: int, m: int, fraction_of_pi) -> dict[str, sympy.Expr]:
    """Branch weights and residuals in exact arithmetic."""
    a = exact_angle(fraction_of_pi)
    s, c = sympy.sin(a), sympy.cos(a)
    sn, sm = sympy.Integer(_parity(n)), sympy.Integer(_parity(m))
    out = {
        "R0_from_eq3": 1 / (1 - sn * c),
        "R0_from_eq4": sm * s / (sm - c),
        "Ralpha_from_eq6": sn * c / (sn * c - 1),
        "Ralpha_from_eq7": c / (c - sm),
        "residual_eq5": sympy.Abs((sm - c) - sm * s * (1 - sn * c)),
        "residual_eq8": sympy.Abs(sn * (c - sm) - (sn * c - 1)),
        "residual_eq9": sympy.Abs(s - sn * sm),
    }
    return {k: sympy.radsimp(sympy.simplify(v)) for k, v in out.items()}


# --- grid scan ---------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    alpha_grid: tuple[float, ...]
    n_max: int
    m_max: int
    threshold: float
    min_abs_residual_eq9: float
    worst_cell: tuple[int, int, float]
    verdict: str
    satisfiable_cells: int = 0
    excluded_alphas: tuple[float, ...] = ()
    max_chain_error: float = 0.0
    cells: tuple[RWeightSolution, ...] = field(default=(), repr=False)

    def to_dict(self, with_cells: bool = False) -> dict:
        out = asdict(self)
        out["alpha_grid"] = list(self.alpha_grid)
        out["worst_cell"] = list(self.worst_cell)
        out["excluded_alphas"] = list(self.excluded_alphas)
        if with_cells:
            out["cells"] = [asdict(c) for c in self.cells]
        else:
            out.pop("cells")
        return out


def default_alpha_grid(points: int = 50, margin: float = 0.05) -> list[float]:
    return np.linspace(margin, math.pi / 2 - margin, points).tolist()


def _has_vanishing_transfer(alpha, n_max, m_max, tol=1e-12):
    from .energy import delta_E

    n, m = np.meshgrid(np.arange(1, n_max + 1), np.arange(1, m_max + 1), indexing="ij")
    return bool(np.any(np.abs(delta_E(n, m, "phi", alpha)) < tol))


def consistency_scan(alpha_grid: Sequence[float], n_max: int, m_max: int,
                     threshold: float = 1e-6, workers: int = 1) -> ConsistencyReport:
    """Evaluate every ``(n, m, alpha)`` cell and decide whether any weights fit.

    The verdict is ``incompatible`` when every cell keeps
    ``residual_eq9 > threshold`` and no cell admits a weight pair that solves
    all four matching conditions together with ``R0**2 + Ra**2 = 1``.  Angles at
    which some energy transfer vanishes are excluded from the grid.
    """
    grid = [float(a) for a in alpha_grid]
    if not grid:
        raise EmptyGrid("alpha grid is empty")
    if n_max < 1 or m_max < 1:
        raise ValueError("n_max and m_max must be at least 1")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    for a in grid:
        _check_alpha(a)
    excluded = tuple(a for a in grid if _has_vanishing_transfer(a, n_max, m_max))
    kept = [(i, a) for i, a in enumerate(grid) if a not in excluded]
    if not kept:
        raise EmptyGrid("every alpha was excluded")

    def column(item):
        idx, a = item
        return [(n, m, idx, solve_R_weights(n, m, a))
                for n in range(1, n_max + 1) for m in range(1, m_max + 1)]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(column, kept))
    else:
        chunks = [column(item) for item in kept]
    cells = [c for chunk in chunks for c in chunk]

    # deterministic reduction: smallest residual, ties by (n, m, alpha index)
    n, m, idx, worst = min(cells, key=lambda c: (c[3].residual_eq9, c[0], c[1], c[2]))
    satisfiable = sum(sol.satisfiable(threshold) for *_, sol in cells)
    chain = max(max(abs(sol.residual_eq5 - sol.residual_eq5_chain),
                    abs(sol.residual_eq8 - sol.residual_eq8_chain)) for *_, sol in cells)
    incompatible = worst.residual_eq9 > threshold and satisfiable == 0
    return ConsistencyReport(
        alpha_grid=tuple(grid),
        n_max=n_max,
        m_max=m_max,
        threshold=threshold,
        min_abs_residual_eq9=worst.residual_eq9,
        worst_cell=(n, m, grid[idx]),
        verdict="incompatible" if incompatible else "inconclusive",
        satisfiable_cells=satisfiable,
        excluded_alphas=excluded,
        max_chain_error=chain,
        cells=tuple(sol for *_, sol in cells),
    )

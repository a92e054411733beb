"""Energy bookkeeping for barrier insertions."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DEFAULT_CONFIG, RingConfig, RingState, ring_energy, well_energy
from .insertion import PointClass, classify_point, insert_single, pair_energy_change
from .overlap import Convention, _check_alpha, chamber_wells, closed_form_coeff


class FixedNodeInput(ValueError):
    """A divergence scan was requested at a fixed node, where the energy is constant."""


class EnergyConvention(str, enum.Enum):
    corrected = "corrected"
    literal = "literal"


_FAMILIES = {"phi": ("a", "A"), "psi": ("c", "C")}


def delta_E(n, m, state_id: str = "phi", alpha: float = math.pi / 4,
            config: RingConfig = DEFAULT_CONFIG, convention=EnergyConvention.corrected):
    """Energy transferred to the particle on the branch ``|n> (left) + |m> (right)``.

    ``corrected`` weighs the two well energies by the orthonormal coefficient
    probabilities and subtracts the true pre-insertion energy ``E_1``.
    ``literal`` keeps the uncorrected form: the weights use the literal
    coefficients, the left-chamber term for ``phi`` carries an extra factor 2
    and the subtracted constant is ``1/(4 pi**2)`` in units of
    ``pi**2 hbar**2 / 2M``.  In that flavour ``phi`` and ``psi`` disagree.

    ``n`` and ``m`` may be integer arrays; they broadcast against each other.
    """
    _check_alpha(alpha)
    convention = EnergyConvention(convention)
    if state_id not in _FAMILIES:
        raise ValueError(f"state_id must be 'phi' or 'psi', got {state_id!r}")
    n_arr, m_arr = np.broadcast_arrays(np.asarray(n), np.asarray(m))
    if np.any(n_arr < 1) or np.any(m_arr < 1):
        raise ValueError("modes start at 1")
    lf, rf = _FAMILIES[state_id]
    left, right = chamber_wells(alpha)
    if convention is EnergyConvention.corrected:
        cl = closed_form_coeff(lf, n_arr.ravel(), alpha)
        cr = closed_form_coeff(rf, m_arr.ravel(), alpha)
        out = pair_energy_change(
            cl, cr,
            well_energy(n_arr.ravel(), left, config),
            well_energy(m_arr.ravel(), right, config),
            ring_energy(1, config),
        )
    else:
        cl = closed_form_coeff(lf, n_arr.ravel(), alpha, Convention.literal)
        cr = closed_form_coeff(rf, m_arr.ravel(), alpha, Convention.literal)
        pl, pr = cl**2, cr**2
        w = pl / (pl + pr)
        factor = 2.0 if state_id == "phi" else 1.0
        nn, mm = n_arr.ravel().astype(float), m_arr.ravel().astype(float)
        out = config.energy_unit * math.pi**2 * (
            w * factor * nn**2 / alpha**2
            + (1.0 - w) * mm**2 / (2 * math.pi - alpha) ** 2
            - 1.0 / (4 * math.pi**2)
        )
    out = np.asarray(out, dtype=float).reshape(n_arr.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EnergyLedger:
    alpha: float
    table: np.ndarray
    pre_energy: float
    convention: EnergyConvention
    state_id: str = "phi"

    @property
    def min_abs(self) -> float:
        return float(np.abs(self.table).min())

    def split(self, n: int, m: int, to_zero: float) -> tuple[float, float]:
        """Split ``dE_nm`` into shares at the barriers at 0 and alpha."""
        total = float(self.table[n - 1, m - 1])
        return to_zero, total - to_zero


def energy_ledger(alpha: float, n_max: int, m_max: int, state_id: str = "phi",
                  config: RingConfig = DEFAULT_CONFIG,
                  convention=EnergyConvention.corrected, workers: int = 1) -> EnergyLedger:
    """Table ``dE[n-1, m-1]`` for ``n <= n_max``, ``m <= m_max``.

    Rows are computed in tiles; assembly order is fixed so the table does not
    depend on ``workers``.
    """
    m = np.arange(1, m_max + 1)
    rows = range(1, n_max + 1)

    def row(n):
        return delta_E(np.full(m_max, n), m, state_id, alpha, config, convention)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            table = np.vstack(list(pool.map(row, rows)))
    else:
        table = np.vstack([row(n) for n in rows])
    if not np.all(np.isfinite(table)):
        raise FloatingPointError("non-finite energy transfer")
    return EnergyLedger(alpha, table, ring_energy(1, config), EnergyConvention(convention), state_id)


def truncated_energy(expansion, config: RingConfig = DEFAULT_CONFIG) -> float:
    """``sum |c_n|**2 E_n`` over every chamber of the expansion."""
    chambers = getattr(expansion, "chambers", (expansion,))
    total = 0.0
    for ch in chambers:
        if ch.truncation == 0:
            continue
        total += float((np.abs(ch.coeffs) ** 2) @ well_energy(ch.modes, ch.well, config))
    return total


def divergence_scan(state: RingState, theta0: float, N_list: Sequence[int],
                    config: RingConfig = DEFAULT_CONFIG, tol: float = 1e-12):
    """Partial energies of the single-barrier re-expansion for each truncation.

    Only meaningful away from fixed nodes, where the partial sums grow
    without bound.
    """
    if classify_point(state, theta0, tol) is PointClass.fixed_node:
        raise FixedNodeInput(f"theta0={theta0} is a fixed node of the state; energy is conserved")
    if not N_list:
        return []
    full = insert_single(state, theta0, max(N_list))
    weights = np.abs(full.coeffs) ** 2 * well_energy(full.modes, full.well, config)
    partial = np.cumsum(weights)
    return [(int(N), float(partial[N - 1])) for N in N_list]


def odd_mode_increment(scan) -> list[float]:
    """Mean energy added per odd mode between consecutive scan points."""
    out = []
    for (n0, e0), (n1, e1) in zip(scan, scan[1:]):
        odd = (n1 + 1) // 2 - (n0 + 1) // 2
        out.append((e1 - e0) / odd)
    return out

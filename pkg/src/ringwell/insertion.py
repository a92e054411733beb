"""Sudden insertion of one or two impenetrable barriers into the ring."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import (
    DEFAULT_CONFIG,
    INV_SQRT_PI,
    TWO_PI,
    ChamberExpansion,
    RingConfig,
    RingState,
    WellSpec,
    well_energy,
)
from .overlap import _check_alpha, chamber_wells, project


class PointClass(str, enum.Enum):
    fixed_node = "fixed_node"
    transitory_node = "transitory_node"
    non_nodal = "non_nodal"


class EntanglementMode(str, enum.Enum):
    per_eigenstate = "per_eigenstate"
    per_chamber = "per_chamber"


def classify_point(state: RingState, theta0: float, tol: float = 1e-12) -> PointClass:
    """Classify ``theta0`` as a fixed node, transitory node or non-nodal point.

    Each ring energy level evolves with its own phase, so ``theta0`` is a node
    at all times exactly when every single-energy component vanishes there.
    """
    if not state.terms:
        raise ValueError("cannot classify points of the zero state")
    if not tol > 0:
        raise ValueError("tol must be positive")
    parts = [
        INV_SQRT_PI * (s * math.sin(n * theta0) + c * math.cos(n * theta0))
        for n, s, c in state.terms
    ]
    if all(abs(p) < tol for p in parts):
        return PointClass.fixed_node
    if abs(math.fsum(parts)) < tol:
        return PointClass.transitory_node
    return PointClass.non_nodal


def insert_single(state: RingState, theta0: float, N: int) -> ChamberExpansion:
    """Re-expand ``state`` on the single well ``(theta0, theta0 + 2 pi)``."""
    well = WellSpec(theta0, TWO_PI)
    return ChamberExpansion(well, project(state, well, N))


@dataclass(frozen=True)
class TwoChamberState:
    left_chamber: ChamberExpansion
    right_chamber: ChamberExpansion
    alpha: float

    def __post_init__(self):
        lw, rw = self.left_chamber.well, self.right_chamber.well
        if not (lw.left == 0.0 and math.isclose(lw.length, self.alpha)
                and math.isclose(rw.left, self.alpha) and math.isclose(rw.right, TWO_PI)):
            raise ValueError("chambers must partition the ring at 0 and alpha")
        if self.left_chamber.weight + self.right_chamber.weight > 1.0 + 1e-9:
            raise ValueError("total coefficient mass exceeds 1")

    @property
    def chambers(self) -> tuple[ChamberExpansion, ChamberExpansion]:
        return self.left_chamber, self.right_chamber


Expansion = Union[ChamberExpansion, TwoChamberState]


def insert_double(state: RingState, alpha: float, N: int) -> TwoChamberState:
    """Re-expand ``state`` on the chambers ``(0, alpha)`` and ``(alpha, 2 pi)``."""
    _check_alpha(alpha)
    if N < 1:
        raise ValueError("truncation must be at least 1")
    left, right = chamber_wells(alpha)
    return TwoChamberState(
        ChamberExpansion(left, project(state, left, N)),
        ChamberExpansion(right, project(state, right, N)),
        alpha,
    )


# --- extended states (particle x barrier at 0 x barrier at alpha) -----------


@dataclass(frozen=True)
class BarrierLabel:
    """State of one barrier after insertion.

    ``energy_tag`` is the barrier's own signed energy change, so that a
    particle gaining ``dE`` is paired with a barrier tagged ``-dE``.  Labels
    with different tags are orthogonal.
    """

    location: float
    energy_tag: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.energy_tag):
            raise ValueError("barrier energy tag must be finite")


@dataclass(frozen=True)
class ExtendedTerm:
    """One branch of an extended state.

    ``particle`` is ``(n, m)`` for a left/right mode pair, ``("left", None)``
    or ``(None, "right")`` for a whole chamber.  ``amplitudes`` are the
    normalised particle amplitudes on the left and right parts of the branch.
    """

    weight: complex
    particle: tuple
    barrier0: BarrierLabel
    barrierA: BarrierLabel
    particle_energy_change: float
    amplitudes: tuple[float, float] = (0.0, 0.0)

    @property
    def energy_balance(self) -> float:
        return self.particle_energy_change + self.barrier0.energy_tag + self.barrierA.energy_tag


@dataclass(frozen=True)
class ExtendedState:
    terms: tuple[ExtendedTerm, ...]
    alpha: float
    mode: EntanglementMode
    nodal_barrier: str
    truncation: int
    defect: float = field(default=0.0)

    @property
    def weight(self) -> float:
        return math.fsum(abs(t.weight) ** 2 for t in self.terms)


def chamber_probabilities(state: RingState, alpha: float) -> tuple[float, float]:
    """Exact probabilities of finding ``state`` in ``(0, alpha)`` and ``(alpha, 2 pi)``.

    Evaluated from the antiderivatives of the products of ring modes.
    """

    def prim(x):
        total = 0.0
        for n, s1, c1 in state.terms:
            for k, s2, c2 in state.terms:
                total += _product_integral(n, s1, c1, k, s2, c2, x)
        return total / math.pi

    p_left = prim(alpha) - prim(0.0)
    p_total = math.fsum(s * s + c * c for _, s, c in state.terms)
    return p_left, p_total - p_left


def _product_integral(n, s1, c1, k, s2, c2, x):
    # antiderivative of (s1 sin nt + c1 cos nt)(s2 sin kt + c2 cos kt) at x
    def cc(p, q):  # int cos(pt) cos(qt)
        return 0.5 * (_sinc_int(p - q, x) + _sinc_int(p + q, x))

    def ss(p, q):
        return 0.5 * (_sinc_int(p - q, x) - _sinc_int(p + q, x))

    def sc(p, q):  # int sin(pt) cos(qt)
        return 0.5 * (_cos_int(p + q, x) + _cos_int(p - q, x))

    return s1 * s2 * ss(n, k) + c1 * c2 * cc(n, k) + s1 * c2 * sc(n, k) + c1 * s2 * sc(k, n)


def _sinc_int(w, x):
    return x if w == 0 else math.sin(w * x) / w


def _cos_int(w, x):
    return 0.0 if w == 0 else -math.cos(w * x) / w


def _nodal_barrier(state: RingState, alpha: float, tol: float) -> str:
    at_zero = classify_point(state, 0.0, tol) is PointClass.fixed_node
    at_alpha = classify_point(state, alpha, tol) is PointClass.fixed_node
    if at_zero and at_alpha:
        return "both"
    if at_zero:
        return "zero"
    if at_alpha:
        return "alpha"
    raise ValueError("state has no fixed node at 0 or alpha; barrier bookkeeping is undefined")


def pair_energy_change(left_amp, right_amp, e_left, e_right, e_pre):
    """Energy change of the mode pair ``left_amp |n> + right_amp |m>`` (unnormalised)."""
    pl = np.abs(left_amp) ** 2
    pr = np.abs(right_amp) ** 2
    w = pl / (pl + pr)
    return w * e_left + (1.0 - w) * e_right - e_pre


def build_extended_after(state: RingState, alpha: float, N: int,
                         mode=EntanglementMode.per_eigenstate,
                         config: RingConfig = DEFAULT_CONFIG,
                         tol: float = 1e-12) -> ExtendedState:
    """Particle-plus-barriers state directly after a double insertion.

    The barrier sitting on a fixed node of ``state`` stays at zero energy; the
    other barrier absorbs the complement of the particle's energy change.

    In ``per_eigenstate`` mode every left mode ``n`` and right mode ``m`` form a
    branch carrying the pair ``(c_n |n> + C_m |m>)``, weighted as independent
    outcomes of the two chambers: ``c_n C_m / sqrt(P_left P_right)`` with the
    exact chamber probabilities.  In ``per_chamber`` mode each chamber is one
    branch with its truncated mean energy.
    """
    _check_alpha(alpha)
    mode = EntanglementMode(mode)
    nodal = _nodal_barrier(state, alpha, tol)
    expansion = insert_double(state, alpha, N)
    left = expansion.left_chamber.coeffs.real
    right = expansion.right_chamber.coeffs.real
    e_left = well_energy(expansion.left_chamber.modes, expansion.left_chamber.well, config)
    e_right = well_energy(expansion.right_chamber.modes, expansion.right_chamber.well, config)
    e_pre = state.energy(config)

    def labels(delta):
        tag = -delta
        if nodal == "zero":
            return BarrierLabel(0.0, 0.0), BarrierLabel(alpha, tag)
        if nodal == "alpha":
            return BarrierLabel(0.0, tag), BarrierLabel(alpha, 0.0)
        return BarrierLabel(0.0, 0.0), BarrierLabel(alpha, 0.0)

    terms = []
    if mode is EntanglementMode.per_eigenstate:
        p_left, p_right = chamber_probabilities(state, alpha)
        scale = 1.0 / math.sqrt(p_left * p_right)
        for i in range(N):
            for j in range(N):
                a, A = left[i], right[j]
                if a == 0.0 and A == 0.0:
                    continue
                if nodal == "both":
                    delta = 0.0
                else:
                    delta = float(pair_energy_change(a, A, e_left[i], e_right[j], e_pre))
                b0, bA = labels(delta)
                amp = math.hypot(a, A)
                terms.append(ExtendedTerm(
                    weight=complex(a * A * scale),
                    particle=(i + 1, j + 1),
                    barrier0=b0,
                    barrierA=bA,
                    particle_energy_change=delta,
                    amplitudes=(float(a / amp), float(A / amp)),
                ))
        defect = abs(1.0 - math.fsum(abs(t.weight) ** 2 for t in terms))
    else:
        for name, coeffs, energies in (("left", left, e_left), ("right", right, e_right)):
            mass = float(coeffs @ coeffs)
            mean = float(coeffs**2 @ energies / mass) if mass > 0 else e_pre
            delta = 0.0 if nodal == "both" else mean - e_pre
            b0, bA = labels(delta)
            particle = (name, None) if name == "left" else (None, name)
            terms.append(ExtendedTerm(
                weight=complex(math.sqrt(mass)),
                particle=particle,
                barrier0=b0,
                barrierA=bA,
                particle_energy_change=delta,
                amplitudes=(1.0, 0.0) if name == "left" else (0.0, 1.0),
            ))
        defect = abs(state.normalization**2 - math.fsum(abs(t.weight) ** 2 for t in terms))
    return ExtendedState(tuple(terms), alpha, mode, nodal, N, defect)

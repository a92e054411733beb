"""Units, ring eigenbasis, well geometry and the state containers.

Angles are measured in radians on a ring of circumference ``2*pi`` (in units of
the radius).  The default units set ``hbar**2 / (2 * mass) = 1`` so the ring
eigenvalues are simply ``n**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class RingConfig:
    """Physical constants of the ring.

    Energies scale as ``1 / radius**2``; angles are unaffected by the radius.
    """

    hbar: float = 1.0
    mass: float = 0.5
    radius: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "radius"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def energy_unit(self) -> float:
        """``hbar**2 / (2 M R**2)``, the energy of ring mode 1."""
        return self.hbar**2 / (2.0 * self.mass * self.radius**2)


DEFAULT_CONFIG = RingConfig()


@dataclass(frozen=True)
class RingState:
    """Finite superposition ``(1/sqrt(pi)) * sum(s_n sin(n t) + c_n cos(n t))``.

    ``terms`` holds ``(n, sin_coeff, cos_coeff)`` triples with distinct
    positive ``n``.  With the ``1/sqrt(pi)`` prefactor the squared norm is
    ``sum(s_n**2 + c_n**2)``.
    """

    terms: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        clean = []
        seen = set()
        for n, s, c in self.terms:
            if int(n) != n or n < 1:
                raise ValueError(f"ring modes must be positive integers, got {n!r}")
            n = int(n)
            if n in seen:
                raise ValueError(f"duplicate mode n={n}")
            seen.add(n)
            s, c = float(s), float(c)
            if not (math.isfinite(s) and math.isfinite(c)):
                raise ValueError(f"non-finite coefficient for mode n={n}")
            clean.append((n, s, c))
        object.__setattr__(self, "terms", tuple(sorted(clean)))

    @classmethod
    def sin(cls, n: int = 1, shift: float = 0.0, amplitude: float = 1.0) -> "RingState":
        """``amplitude * sin(n (theta - shift)) / sqrt(pi)``, via the angle-difference identity."""
        return cls(((n, amplitude * math.cos(n * shift), -amplitude * math.sin(n * shift)),))

    @classmethod
    def cos(cls, n: int = 1, shift: float = 0.0, amplitude: float = 1.0) -> "RingState":
        """``amplitude * cos(n (theta - shift)) / sqrt(pi)``."""
        return cls(((n, amplitude * math.sin(n * shift), amplitude * math.cos(n * shift)),))

    @property
    def modes(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms], dtype=int)

    @property
    def normalization(self) -> float:
        return norm(self)

    def __add__(self, other: "RingState") -> "RingState":
        merged: dict[int, list[float]] = {}
        for n, s, c in self.terms + other.terms:
            acc = merged.setdefault(n, [0.0, 0.0])
            acc[0] += s
            acc[1] += c
        return RingState(tuple((n, s, c) for n, (s, c) in merged.items()))

    def __mul__(self, scalar: float) -> "RingState":
        return RingState(tuple((n, scalar * s, scalar * c) for n, s, c in self.terms))

    __rmul__ = __mul__

    def __sub__(self, other: "RingState") -> "RingState":
        return self + (-1.0) * other

    def energy(self, config: RingConfig = DEFAULT_CONFIG) -> float:
        """Energy expectation value (normalised by the state's own norm)."""
        weights = np.array([s * s + c * c for _, s, c in self.terms])
        if weights.sum() == 0.0:
            return 0.0
        energies = np.array([ring_energy(n, config) for n, _, _ in self.terms])
        return float(weights @ energies / weights.sum())


PHI = RingState.sin(1)


def psi_state(alpha: float) -> RingState:
    """``sin(theta - alpha) / sqrt(pi)``."""
    return RingState.sin(1, shift=alpha)


@dataclass(frozen=True)
class WellSpec:
    """Infinite square well occupying the arc ``(left, left + length)``."""

    left: float = 0.0
    length: float = TWO_PI

    def __post_init__(self):
        if not (0.0 < self.length <= TWO_PI + 1e-12):
            raise ValueError(f"well length must lie in (0, 2*pi], got {self.length!r}")
        object.__setattr__(self, "left", float(self.left) % TWO_PI)

    @property
    def right(self) -> float:
        return self.left + self.length

    def basis(self, n: int | np.ndarray, theta: float | np.ndarray) -> np.ndarray:
        """Orthonormal eigenfunction ``sqrt(2/L) sin(n pi (theta - left) / L)``."""
        u = np.asarray(theta, dtype=float) - self.left
        return math.sqrt(2.0 / self.length) * np.sin(np.asarray(n) * math.pi * u / self.length)

    def integral_to_orthonormal(self) -> float:
        """Factor turning a literal coefficient into an orthonormal one.

        Literal chamber expansions read ``sqrt(1/pi) * sum(x_n sin(...))`` with
        ``x_n = (1/pi) * integral``; the orthonormal coefficient is
        ``sqrt(2 pi / L) * x_n``.
        """
        return math.sqrt(TWO_PI / self.length)


@dataclass(frozen=True)
class ChamberExpansion:
    """Truncated expansion over the orthonormal sine basis of one well.

    ``coeffs[k]`` is the coefficient of mode ``n = k + 1``.  Coefficients are
    stored as complex numbers so that time evolution keeps the same type.
    """

    well: WellSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).ravel()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        if (np.abs(arr) ** 2).sum() > 1.0 + 1e-9:
            raise ValueError("coefficient mass exceeds 1; input is not a normalised state")

    @property
    def truncation(self) -> int:
        return self.coeffs.size

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.truncation + 1)

    @property
    def weight(self) -> float:
        return float((np.abs(self.coeffs) ** 2).sum())


def ring_energy(n: int | np.ndarray, config: RingConfig = DEFAULT_CONFIG):
    """Ring eigenvalue ``hbar**2 n**2 / (2 M R**2)``."""
    if np.any(np.asarray(n) < 0):
        raise ValueError("ring modes must be non-negative")
    n = np.asarray(n, dtype=float)
    out = config.energy_unit * n * n
    return float(out) if out.ndim == 0 else out


def well_energy(n: int | np.ndarray, well: WellSpec, config: RingConfig = DEFAULT_CONFIG):
    """Infinite-well eigenvalue ``n**2 pi**2 hbar**2 / (2 M L**2 R**2)``."""
    if np.any(np.asarray(n) < 1):
        raise ValueError("well modes start at n = 1")
    n = np.asarray(n, dtype=float)
    out = config.energy_unit * (n * math.pi / well.length) ** 2
    return float(out) if out.ndim == 0 else out


def evaluate(state: RingState, theta: float | np.ndarray):
    """Amplitude of ``state`` at ``theta``."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for n, s, c in state.terms:
        out = out + s * np.sin(n * theta) + c * np.cos(n * theta)
    out = out * INV_SQRT_PI
    return float(out) if out.ndim == 0 else out


def norm(state: RingState) -> float:
    """L2 norm over one turn of the ring."""
    return math.sqrt(math.fsum(s * s + c * c for _, s, c in state.terms))


def superpose(states: Iterable[RingState], weights: Sequence[float]) -> RingState:
    out = RingState()
    for st, w in zip(states, weights):
        out = out + w * st
    return out

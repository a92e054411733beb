"""Free evolution inside the wells after an insertion, and pointwise sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_CONFIG, TWO_PI, ChamberExpansion, RingConfig, well_energy
from .insertion import TwoChamberState


class OutOfDomain(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 1.0
    steps: int = 1

    def __post_init__(self):
        if self.t_end < self.t_start:
            raise ValueError("t_end must not precede t_start")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)


def _evolve_chamber(ch: ChamberExpansion, t: float, config: RingConfig) -> ChamberExpansion:
    if ch.truncation == 0 or t == 0:
        return ch
    phase = np.exp(-1j * well_energy(ch.modes, ch.well, config) * t / config.hbar)
    return ChamberExpansion(ch.well, ch.coeffs * phase)


def evolve(expansion, t: float, config: RingConfig = DEFAULT_CONFIG):
    """Apply ``exp(-i E_n t / hbar)`` to every well mode; chambers evolve independently."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if isinstance(expansion, TwoChamberState):
        return TwoChamberState(
            _evolve_chamber(expansion.left_chamber, t, config),
            _evolve_chamber(expansion.right_chamber, t, config),
            expansion.alpha,
        )
    return _evolve_chamber(expansion, t, config)


def _chamber_samples(ch: ChamberExpansion, u: np.ndarray, chunk: int = 256) -> np.ndarray:
    # u is the offset from the left wall, already inside [0, L]
    out = np.empty(u.size, dtype=complex)
    k = ch.modes * (math.pi / ch.well.length)
    norm = math.sqrt(2.0 / ch.well.length)
    for start in range(0, u.size, chunk):
        block = u[start:start + chunk]
        out[start:start + chunk] = norm * (np.sin(np.outer(block, k)) @ ch.coeffs)
    return out


def _offset(theta: np.ndarray, well) -> np.ndarray:
    u = np.asarray(theta, dtype=float) - well.left
    if math.isclose(well.length, TWO_PI):
        return np.mod(u, TWO_PI)
    return u


def sample_grid(expansion, thetas) -> np.ndarray:
    """Wave function of an expansion at the given angles.

    Raises :class:`OutOfDomain` for angles outside ``[0, 2 pi]`` or outside the
    single well; barrier positions return the (vanishing) boundary value.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any((thetas < 0) | (thetas > TWO_PI)):
        raise OutOfDomain("angles must lie in [0, 2*pi]")
    if isinstance(expansion, TwoChamberState):
        out = np.empty(thetas.size, dtype=complex)
        in_left = thetas <= expansion.alpha
        left, right = expansion.chambers
        out[in_left] = _chamber_samples(left, thetas[in_left] - left.well.left)
        out[~in_left] = _chamber_samples(right, thetas[~in_left] - right.well.left)
        return out
    u = _offset(thetas, expansion.well)
    if np.any((u < -1e-12) | (u > expansion.well.length + 1e-12)):
        raise OutOfDomain("angle outside the well")
    return _chamber_samples(expansion, u)

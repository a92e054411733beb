"""Overlap integrals between ring functions and well eigenfunctions.

Three routes are provided and kept independent of each other:

* :func:`closed_form_coeff` evaluates the closed-form coefficient families
  ``a, A, c, C, b, B, f``;
* :func:`project` expands an arbitrary :class:`RingState` on a well using the
  product-to-sum antiderivative, mode by mode;
* :func:`quadrature_overlap` integrates numerically with an adaptive
  Gauss-Legendre rule and serves as the oracle for the other two.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import TWO_PI, INV_SQRT_PI, ChamberExpansion, RingState, WellSpec, evaluate


class ConvergenceFailure(RuntimeError):
    """Adaptive quadrature ran out of subdivisions before reaching tolerance."""

    def __init__(self, message, integral_id=None):
        super().__init__(message)
        self.integral_id = integral_id


class CoeffFamily(str, enum.Enum):
    a = "a"
    A = "A"
    c = "c"
    C = "C"
    b = "b"
    B = "B"
    f = "f"

    @property
    def chamber(self) -> str:
        if self is CoeffFamily.f:
            return "ring"
        return "left" if self.value.islower() else "right"

    @property
    def source(self) -> str:
        """Which ring function the family expands: ``phi``, ``psi`` or ``cos``."""
        return {"a": "phi", "A": "phi", "c": "psi", "C": "psi", "b": "cos", "B": "cos", "f": "phi"}[
            self.value
        ]


class Convention(str, enum.Enum):
    orthonormal = "orthonormal"
    literal = "literal"


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < math.pi / 2):
        raise ValueError(f"alpha must lie in (0, pi/2), got {alpha!r}")


def chamber_wells(alpha: float) -> tuple[WellSpec, WellSpec]:
    return WellSpec(0.0, alpha), WellSpec(alpha, TWO_PI - alpha)


def _sign(n):
    return 1.0 - 2.0 * (np.asarray(n) % 2)


def _left_magnitude(n, alpha):
    # shared by a and c so that |a_n| == |c_n| bit for bit
    return alpha * n * math.sin(alpha) / (alpha * alpha - math.pi**2 * n * n)


def _right_magnitude(n, alpha):
    # shared by A and C
    return (
        (TWO_PI - alpha)
        * n
        * math.sin(alpha)
        / ((alpha - (n + 2) * math.pi) * (alpha + (n - 2) * math.pi))
    )


def _f_literal(n):
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    # sin(pi n) vanishes for integer n; n = 2 is the removable singularity
    out[n == 2] = math.pi
    non_int = n != np.round(n)
    if np.any(non_int):
        m = n[non_int]
        out[non_int] = 4.0 * np.sin(math.pi * m) / (m * m - 4.0)
    return out


def closed_form_coeff(family, n, alpha: float | None = None, convention=Convention.orthonormal):
    """Closed form of a coefficient family.

    Parameters
    ----------
    family : CoeffFamily or str
        One of ``a, A, c, C`` (``phi``/``psi`` on the left/right chamber),
        ``b, B`` (``cos`` on the chambers) or ``f`` (``phi`` on the single
        well of length ``2 pi``).
    n : int or array of int
        Well mode(s), ``n >= 1``.
    alpha : float
        Second barrier position in ``(0, pi/2)``; ignored for ``f``.
    convention : Convention
        ``literal`` returns ``(1/pi) * integral``; ``orthonormal`` rescales by
        ``sqrt(2 pi / L)`` so the coefficients are amplitudes in the
        normalised well basis.  The literal ``f`` closed form
        ``4 sin(pi n) / (n**2 - 4)`` lacks the ``1/pi`` of its defining
        integral (its n = 2 limit is ``pi``); ``orthonormal`` restores it.
    """
    family = CoeffFamily(family)
    convention = Convention(convention)
    scalar = np.ndim(n) == 0
    n = np.atleast_1d(np.asarray(n))
    if np.any(n < 1):
        raise ValueError("well modes start at n = 1")
    nf = n.astype(float)

    if family is CoeffFamily.f:
        out = _f_literal(nf)
        if convention is Convention.orthonormal:
            out = out / math.pi
        return float(out[0]) if scalar else out

    _check_alpha(alpha)
    sgn = _sign(n)
    if family is CoeffFamily.a:
        out = sgn * _left_magnitude(nf, alpha)
    elif family is CoeffFamily.c:
        out = _left_magnitude(nf, alpha)
    elif family is CoeffFamily.A:
        out = -_right_magnitude(nf, alpha)
    elif family is CoeffFamily.C:
        out = -sgn * _right_magnitude(nf, alpha)
    elif family is CoeffFamily.b:
        out = alpha * nf * (sgn * math.cos(alpha) - 1.0) / (alpha * alpha - math.pi**2 * nf * nf)
    else:
        out = (
            (TWO_PI - alpha)
            * nf
            * (math.cos(alpha) - sgn)
            / ((alpha + math.pi * (nf - 2)) * (math.pi * (nf + 2) - alpha))
        )
    if convention is Convention.orthonormal:
        left, right = chamber_wells(alpha)
        well = left if family.chamber == "left" else right
        out = out * well.integral_to_orthonormal()
    return float(out[0]) if scalar else np.asarray(out, dtype=float)


# --- analytic projection ---------------------------------------------------

_RESONANCE_TOL = 1e-10


def _sine_overlaps(k: int, length: float, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``int_0^L sin(k u) sin(q u) du`` and ``int_0^L cos(k u) sin(q u) du``, ``q = n pi / L``."""
    q = n * math.pi / length
    kl = k * length
    sin_kl, cos_kl = math.sin(kl), math.cos(kl)
    sgn = _sign(n)
    diff = q - k
    total = q + k
    resonant = np.abs(diff * length) < _RESONANCE_TOL * max(1.0, kl)
    safe = np.where(resonant, 1.0, diff)
    # sin((q -+ k) L) = -+(-1)^n sin(kL),  cos((q -+ k) L) = (-1)^n cos(kL)
    s_minus = np.where(resonant, length, -sgn * sin_kl / safe)
    s_plus = sgn * sin_kl / total
    t_minus = np.where(resonant, 0.0, (1.0 - sgn * cos_kl) / safe)
    t_plus = (1.0 - sgn * cos_kl) / total
    return 0.5 * (s_minus - s_plus), 0.5 * (t_plus + t_minus)


def project(state: RingState, well: WellSpec, truncation: int) -> np.ndarray:
    """Orthonormal coefficients of ``state`` on ``well`` for modes ``1..truncation``."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    n = np.arange(1, truncation + 1, dtype=float)
    out = np.zeros(truncation)
    shift = well.left
    for k, s, c in state.terms:
        # rewrite around the well's left edge: f = p sin(k u) + r cos(k u), u = theta - left
        p = s * math.cos(k * shift) - c * math.sin(k * shift)
        r = s * math.sin(k * shift) + c * math.cos(k * shift)
        i_sin, i_cos = _sine_overlaps(k, well.length, n)
        out += p * i_sin + r * i_cos
    return out * INV_SQRT_PI * math.sqrt(2.0 / well.length)


# --- adaptive Gauss-Legendre quadrature -------------------------------------


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-15
    max_subdivisions: int = 2**20
    order: int = 24

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.order < 2:
            raise ValueError("order must be at least 2")


_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes(order: int):
    if order not in _NODE_CACHE:
        _NODE_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _NODE_CACHE[order]


def integrate(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              settings: QuadratureSettings = QuadratureSettings(), integral_id=None) -> float:
    """Adaptive Gauss-Legendre integral of a vectorised ``func`` over ``[a, b]``.

    Each panel is accepted when the rule on the panel agrees with the sum of
    the rule on its two halves.  Panels are processed breadth-first, in a
    fixed order, so the result is bit-reproducible.
    """
    if a == b:
        return 0.0
    x, w = _nodes(settings.order)
    panels = np.array([[a, b]], dtype=float)

    def rule(p):
        mid = 0.5 * (p[:, 0] + p[:, 1])[:, None]
        half = 0.5 * (p[:, 1] - p[:, 0])[:, None]
        return (func(mid + half * x) * w).sum(axis=1) * half[:, 0]

    coarse = rule(panels)
    accepted = []
    n_panels = 1
    while panels.size:
        mid = 0.5 * (panels[:, 0] + panels[:, 1])
        left = np.column_stack([panels[:, 0], mid])
        right = np.column_stack([mid, panels[:, 1]])
        fine_l, fine_r = rule(left), rule(right)
        fine = fine_l + fine_r
        err = np.abs(fine - coarse)
        estimate = abs(math.fsum(accepted) + fine.sum())
        tol = max(settings.abs_tol, settings.rel_tol * estimate)
        width_share = (panels[:, 1] - panels[:, 0]) / abs(b - a)
        ok = err <= tol * np.maximum(width_share, 1e-3)
        accepted.extend(fine[ok].tolist())
        bad = ~ok
        if not bad.any():
            break
        n_panels += 2 * int(bad.sum())
        if n_panels > settings.max_subdivisions:
            raise ConvergenceFailure(
                f"quadrature on [{a}, {b}] did not reach rel_tol={settings.rel_tol} "
                f"within {settings.max_subdivisions} subdivisions",
                integral_id=integral_id,
            )
        panels = np.concatenate([left[bad], right[bad]])
        coarse = np.concatenate([fine_l[bad], fine_r[bad]])
    return math.fsum(accepted)


RingFunction = Union[RingState, Callable[[np.ndarray], np.ndarray]]


def quadrature_overlap(func: RingFunction, well: WellSpec, n: int,
                       settings: QuadratureSettings = QuadratureSettings(),
                       convention=Convention.orthonormal) -> float:
    """Overlap of a ring function with well mode ``n`` by numerical integration.

    ``func`` is either a :class:`RingState` (evaluated with its ``1/sqrt(pi)``
    prefactor) or a plain vectorised callable of the angle.  With
    ``convention="literal"`` the callable is treated as a bare trigonometric
    function and the result is ``(1/pi) * int func(t) sin(n pi (t - left)/L) dt``.
    """
    convention = Convention(convention)
    f = (lambda t: evaluate(func, t)) if isinstance(func, RingState) else func
    if convention is Convention.orthonormal:
        integrand = lambda t: f(t) * well.basis(n, t)
    else:
        integrand = lambda t: f(t) * np.sin(n * math.pi * (t - well.left) / well.length) / math.pi
    return integrate(integrand, well.left, well.right, settings,
                     integral_id=f"overlap(n={n}, well=({well.left}, {well.right}))")


def family_oracle(family, n: int, alpha: float | None = None,
                  settings: QuadratureSettings = QuadratureSettings(),
                  convention=Convention.orthonormal) -> float:
    """Quadrature value of a coefficient family, from its defining integral."""
    family = CoeffFamily(family)
    convention = Convention(convention)
    if family is CoeffFamily.f:
        well = WellSpec(0.0, TWO_PI)
        raw = quadrature_overlap(np.sin, well, n, settings, Convention.literal)
        # the literal f closed form lacks the 1/pi of its integral
        return raw * math.pi if convention is Convention.literal else raw
    source = {"phi": np.sin, "psi": lambda t: np.sin(t - alpha), "cos": np.cos}[family.source]
    left, right = chamber_wells(alpha)
    well = left if family.chamber == "left" else right
    raw = quadrature_overlap(source, well, n, settings, Convention.literal)
    return raw * well.integral_to_orthonormal() if convention is Convention.orthonormal else raw


def parseval_defect(expansion, source: RingState) -> float:
    """``|1 - sum |c_n|**2|`` relative to the squared norm of ``source``."""
    chambers = getattr(expansion, "chambers", (expansion,))
    mass = math.fsum(float((np.abs(ch.coeffs) ** 2).sum()) for ch in chambers)
    target = math.fsum(s * s + c * c for _, s, c in source.terms)
    return abs(target - mass)


__all__ = [
    "ChamberExpansion",
    "CoeffFamily",
    "Convention",
    "ConvergenceFailure",
    "QuadratureSettings",
    "chamber_wells",
    "closed_form_coeff",
    "family_oracle",
    "integrate",
    "parseval_defect",
    "project",
    "quadrature_overlap",
]

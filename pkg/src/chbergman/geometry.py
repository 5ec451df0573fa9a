"""Ball model of the complex hyperbolic plane.

Points live in the open unit ball of C^2; lifts are homogeneous coordinates
``(z1, z2, 1)`` paired by the signature-(2, 1) form ``diag(1, 1, -1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import integrate

__all__ = [
    "BOUNDARY_GUARD",
    "HERMITIAN_FORM",
    "BallPoint",
    "Lift",
    "lift",
    "one_minus_norm2",
    "hyp_inner",
    "hyp_distance",
    "hyp_distance_many",
    "volume_density",
    "ball_volume",
    "petersson_factor",
]

BOUNDARY_GUARD = 1e-12
HERMITIAN_FORM = np.diag([1.0, 1.0, -1.0]).astype(complex)


def one_minus_norm2(z1, z2):
    """``1 - |z1|^2 - |z2|^2`` in the factored form that limits cancellation."""
    a1 = np.abs(z1)
    return (1.0 - a1) * (1.0 + a1) - np.abs(z2) ** 2


@dataclass(frozen=True)
class BallPoint:
    z1: complex
    z2: complex

    def __post_init__(self):
        z1, z2 = complex(self.z1), complex(self.z2)
        if not (math.isfinite(z1.real) and math.isfinite(z1.imag)
                and math.isfinite(z2.real) and math.isfinite(z2.imag)):
            raise ValueError("ball coordinates must be finite")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)
        if abs(z1) ** 2 + abs(z2) ** 2 >= 1.0 - BOUNDARY_GUARD:
            raise ValueError(f"point ({z1}, {z2}) is not inside the unit ball")

    @classmethod
    def from_array(cls, arr) -> "BallPoint":
        return cls(complex(arr[0]), complex(arr[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.z1) ** 2 + abs(self.z2) ** 2

    @property
    def weight(self) -> float:
        """``1 - |z|^2``."""
        return float(one_minus_norm2(self.z1, self.z2))


@dataclass(frozen=True)
class Lift:
    v1: complex
    v2: complex
    v3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=complex)


def lift(p: BallPoint) -> Lift:
    return Lift(p.z1, p.z2, 1.0 + 0.0j)


def hyp_inner(p: Lift, q: Lift) -> complex:
    """``q* H p`` for ``H = diag(1, 1, -1)``."""
    return p.v1 * q.v1.conjugate() + p.v2 * q.v2.conjugate() - p.v3 * q.v3.conjugate()


def _sinh2_half(z1, z2, w1, w2):
    # |1 - <z,w>|^2 - (1-|z|^2)(1-|w|^2) = |z-w|^2 - |z1 w2 - z2 w1|^2
    num = np.abs(z1 - w1) ** 2 + np.abs(z2 - w2) ** 2 - np.abs(z1 * w2 - z2 * w1) ** 2
    den = one_minus_norm2(z1, z2) * one_minus_norm2(w1, w2)
    return np.maximum(num, 0.0) / den


def hyp_distance(p: BallPoint, q: BallPoint) -> float:
    """Hyperbolic distance with ``cosh^2(d/2)`` equal to the normalised pairing ratio.

    Evaluated as ``2 asinh(sqrt(R - 1))`` with ``R - 1`` formed without
    subtracting nearly equal quantities; ``R`` below 1 is clamped.
    """
    s = _sinh2_half(p.z1, p.z2, q.z1, q.z2)
    return float(2.0 * np.arcsinh(np.sqrt(s)))


def hyp_distance_many(z: BallPoint, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Distances from ``z`` to the points ``(w1[i], w2[i])``."""
    s = _sinh2_half(z.z1, z.z2, np.asarray(w1), np.asarray(w2))
    return 2.0 * np.arcsinh(np.sqrt(s))


def volume_density(p: BallPoint) -> float:
    """Density ``(1 - |z|^2)^-3`` of the hyperbolic volume against Lebesgue measure."""
    return p.weight ** -3


def ball_volume(r: float, convention: str = "literal") -> float:
    """Volume of a hyperbolic ball of radius ``r``.

    ``convention="literal"`` gives ``2 pi sinh^4(r/2)``. ``"integrated"``
    integrates the volume density over the Euclidean ball of radius
    ``tanh(r/2)`` radially, ``2 pi^2 int_0^R s^3 (1 - s^2)^-3 ds``, which
    evaluates to ``(pi^2 / 2) sinh^4(r/2)``.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if convention == "literal":
        return 2.0 * math.pi * math.sinh(r / 2.0) ** 4
    if convention != "integrated":
        raise ValueError(f"unknown convention {convention!r}")
    if r == 0:
        return 0.0
    R = math.tanh(r / 2.0)

    def radial(s):
        return s ** 3 / ((1.0 - s) * (1.0 + s)) ** 3

    return 2.0 * math.pi ** 2 * integrate(radial, 0.0, R, tol=1e-13).value


def petersson_factor(p: BallPoint, m: int) -> float:
    if m < 0:
        raise ValueError("weight must be nonnegative")
    return p.weight ** m

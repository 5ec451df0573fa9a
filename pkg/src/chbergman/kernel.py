"""Truncated automorphic Bergman-kernel series and the induced metric.

All operations take the cusp-form weight ``m`` explicitly; quantities tied
to the k-th power of the canonical bundle use ``m = 3k``. The series
constant ``C`` is carried separately: ``raw`` values are sums with unit
constant and every ratio built from them is independent of ``C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .geometry import BallPoint
from .group import GroupElement
from .orbit import Orbit

__all__ = [
    "KernelConstant",
    "KernelValue",
    "DiagonalDerivatives",
    "MetricRatio",
    "DegenerateKernelError",
    "kernel_term",
    "kernel_sum",
    "diagonal_raw",
    "diagonal_derivatives",
    "kernel_grad",
    "kernel_hessian",
    "conjugate_form_grad",
    "conjugate_form_hessian",
    "bergman_matrix",
    "volume_ratio",
]

_WHICH = {"z1": 0, "z2": 1, "zbar1": 2, "zbar2": 3}


class DegenerateKernelError(ArithmeticError):
    """The diagonal kernel value is not positive, so its logarithm is undefined."""


@dataclass(frozen=True)
class KernelConstant:
    C: float = 1.0

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError("series constant must be positive and finite")


class LedgerEntry(NamedTuple):
    dist: float
    modulus: float


@dataclass(frozen=True)
class KernelValue:
    raw: complex
    petersson: float
    term_count: int
    per_term_ledger: tuple | None = None
    exhaustive: bool = True


class DiagonalDerivatives(NamedTuple):
    value: complex
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class MetricRatio:
    m11: complex
    m12: complex
    m21: complex
    m22: complex
    T1: complex
    T2: complex
    T3: complex
    T4: complex
    ratio: float
    det: complex
    t_scale: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def t_sum(self) -> complex:
        return self.T1 + self.T2 + self.T3 + self.T4


def _lift_weights(z: BallPoint, w: BallPoint, m: int) -> float:
    return z.weight ** (m / 2.0) * w.weight ** (m / 2.0)


def kernel_term(g: GroupElement, z: BallPoint, w: BallPoint, m: int) -> complex:
    """Single series term ``((-<z~, lift(gw)>) * conj(Cw + D))**-m``.

    Equivalently ``(-(g w~)* H z~)**-m``; the integer power is taken by
    repeated squaring.
    """
    if m < 1:
        raise ValueError("weight must be at least 1")
    return complex(_kernels.offdiag_terms(g.matrix[None], z.as_array(), w.as_array(), m)[0])


def kernel_sum(orbit: Orbit, m: int, constant: KernelConstant = KernelConstant(),
               ledger: bool = False) -> KernelValue:
    """Sum the series over the orbit elements at the orbit's (center, base) pair.

    ``petersson`` is ``C (1-|z|^2)^(m/2) (1-|w|^2)^(m/2) |raw|``, which on
    the diagonal is ``C (1-|z|^2)^m |raw|``.
    """
    z, w = orbit.center, orbit.base
    terms = _kernels.offdiag_terms(orbit.matrices, z.as_array(), w.as_array(), m)
    raw = complex(_kernels.pairwise_sum(terms))
    weight = _lift_weights(z, w, m)
    entries = None
    if ledger:
        mods = constant.C * weight * np.abs(terms)
        entries = tuple(LedgerEntry(float(d), float(v)) for d, v in zip(orbit.dists, mods))
    return KernelValue(raw, constant.C * weight * abs(raw), len(orbit), entries, orbit.exhaustive)


def diagonal_raw(matrices, z: BallPoint, m: int) -> complex:
    """Unit-constant diagonal series at ``z`` over an explicit matrix stack."""
    val, _, _ = _kernels.diag_terms(np.asarray(matrices), z.as_array(), m, want_derivs=False)
    return complex(_kernels.pairwise_sum(val))


def _check_diagonal(orbit: Orbit):
    if orbit.center != orbit.base:
        raise ValueError("derivative series need a diagonal orbit (center == base)")


def diagonal_derivatives(orbit: Orbit, m: int) -> DiagonalDerivatives:
    """Raw diagonal value with its Wirtinger gradient and mixed Hessian.

    ``grad`` holds d/dz1, d/dz2, d/dzbar1, d/dzbar2 and ``hess[i, j]`` is
    d2/dz_i dzbar_j, all differentiated term by term and summed in a fixed
    pairwise order.
    """
    _check_diagonal(orbit)
    val, grad, hess = _kernels.diag_terms(orbit.matrices, orbit.center.as_array(), m)
    return DiagonalDerivatives(
        complex(_kernels.pairwise_sum(val)),
        np.array([_kernels.pairwise_sum(grad[:, c]) for c in range(4)]),
        np.array([[_kernels.pairwise_sum(hess[:, i, j]) for j in range(2)] for i in range(2)]),
    )


def kernel_grad(orbit: Orbit, m: int, constant: KernelConstant, which: str) -> complex:
    if which not in _WHICH:
        raise ValueError(f"which must be one of {sorted(_WHICH)}")
    return constant.C * complex(diagonal_derivatives(orbit, m).grad[_WHICH[which]])


def kernel_hessian(orbit: Orbit, m: int, constant: KernelConstant, i: int, j: int) -> complex:
    """``d2 B / dz_i dzbar_j`` for ``i, j`` in ``{1, 2}``."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("indices must be 1 or 2")
    return constant.C * complex(diagonal_derivatives(orbit, m).hess[i - 1, j - 1])


def _conjugate_base(orbit: Orbit):
    g = orbit.matrices
    z1, z2 = orbit.center.z1, orbit.center.z2
    zb1, zb2 = np.conj(z1), np.conj(z2)
    n1 = g[:, 0, 0] * z1 + g[:, 0, 1] * z2 + g[:, 0, 2]
    n2 = g[:, 1, 0] * z1 + g[:, 1, 1] * z2 + g[:, 1, 2]
    q = g[:, 2, 0] * z1 + g[:, 2, 1] * z2 + g[:, 2, 2]
    return g, (n1, n2), q - n1 * zb1 - n2 * zb2, (zb1, zb2)


def conjugate_form_grad(orbit: Orbit, m: int, j: int) -> complex:
    """d/dzbar_j from the conjugated series ``sum (Cz + D - N . zbar)**-m``.

    Equals :func:`kernel_grad` with ``zbar_j`` whenever the truncated
    diagonal sum is real, e.g. for inverse-closed element sets.
    """
    _check_diagonal(orbit)
    _, n, base, _ = _conjugate_base(orbit)
    return complex(_kernels.pairwise_sum(m * n[j - 1] / base ** (m + 1)))


def conjugate_form_hessian(orbit: Orbit, m: int, i: int, j: int) -> complex:
    """d2/dz_i dzbar_j by differentiating the conjugated series in ``z_i``."""
    _check_diagonal(orbit)
    g, n, base, zb = _conjugate_base(orbit)
    first = m * g[:, j - 1, i - 1] / base ** (m + 1)
    lin = g[:, 2, i - 1] - g[:, 0, i - 1] * zb[0] - g[:, 1, i - 1] * zb[1]
    second = m * (m + 1.0) * n[j - 1] * lin / base ** (m + 2)
    return complex(_kernels.pairwise_sum(first - second))


def _hyperbolic_block(z: BallPoint) -> np.ndarray:
    """``a_ij = -d_i dbar_j log(1 - |z|^2)``."""
    s = z.weight
    zv = z.as_array()
    return (np.eye(2) * s + np.outer(np.conj(zv), zv)) / s ** 2


def _identity_mask(orbit: Orbit) -> np.ndarray:
    return np.all(np.abs(orbit.matrices - np.eye(3)) <= 1e-12, axis=(1, 2))


def _split_log_hessian(orbit: Orbit, m: int) -> np.ndarray:
    # log(s^m B) = log(1 + R), R = s^m * (B - s^-m): avoids cancelling the identity term
    z = orbit.center
    s = z.weight
    zv = z.as_array()
    val, grad, hess = _kernels.diag_terms(orbit.matrices, zv, m)
    rest = ~_identity_mask(orbit)
    bn = complex(_kernels.pairwise_sum(val[rest]))
    bg = np.array([_kernels.pairwise_sum(grad[rest, c]) for c in range(4)])
    bh = np.array([[_kernels.pairwise_sum(hess[rest, i, j]) for j in range(2)] for i in range(2)])
    u = s ** m
    du = -m * s ** (m - 1) * np.conj(zv)        # d/dz_i of s^m
    dub = -m * s ** (m - 1) * zv                # d/dzbar_j of s^m
    ddu = -m * s ** (m - 1) * np.eye(2) + m * (m - 1) * s ** (m - 2) * np.outer(np.conj(zv), zv)
    R = u * bn
    Ri = du * bn + u * bg[:2]
    Rj = dub * bn + u * bg[2:]
    Rij = ddu * bn + np.outer(du, bg[2:]) + np.outer(bg[:2], dub) + u * bh
    one = 1.0 + R
    if one.real <= 0:
        raise DegenerateKernelError("diagonal kernel value is not positive")
    return Rij / one - np.outer(Ri, Rj) / one ** 2


def bergman_matrix(z: BallPoint, k: int, orbit: Orbit, constant: KernelConstant = KernelConstant(),
                   literal_pi: bool = False, method: str = "split") -> np.ndarray:
    """Coefficient matrix ``m_ij`` of ``d dbar log`` of the Petersson diagonal kernel.

    ``m_ij = -3k a_ij + d_i dbar_j log B`` with
    ``a_ij = (delta_ij (1-|z|^2) + zbar_i z_j) / (1-|z|^2)^2``.
    ``method="split"`` (default) evaluates it as ``d dbar log(1 + R)`` with
    the identity term removed analytically; ``method="direct"`` uses the
    full-series quotients. ``literal_pi=True`` divides the hyperbolic part
    by pi instead, reproducing the printed coefficient; that variant does
    not vanish for the single-term kernel and is kept for comparison only.
    The constant ``C`` cancels and is accepted for interface symmetry.
    """
    if orbit.center != z:
        raise ValueError("orbit must be enumerated at z")
    _check_diagonal(orbit)
    m = 3 * k
    if method == "split" and not literal_pi:
        return _split_log_hessian(orbit, m)
    d = diagonal_derivatives(orbit, m)
    B = d.value
    if B.real <= 0:
        raise DegenerateKernelError("diagonal kernel value is not positive")
    logh = d.hess / B - np.outer(d.grad[:2], d.grad[2:]) / B ** 2
    scale = m / math.pi if literal_pi else m
    return -scale * _hyperbolic_block(z) + logh


def volume_ratio(z: BallPoint, k: int, orbit: Orbit,
                 constant: KernelConstant = KernelConstant()) -> MetricRatio:
    """Ratio of the Bergman volume form to the hyperbolic one at ``z``.

    ``ratio = (1-|z|^2)^3 |det m| / pi^2``. The determinant is also expanded
    as ``T1 + T2 + T3 + T4``: the pure hyperbolic term, the cross terms with
    second derivatives, the cross terms with gradient products plus the
    Hessian determinant, and the cubic (and vanishing quartic) remainder.
    ``t_scale`` is the sum of the moduli of the T terms, the natural
    magnitude against which the two evaluations are compared.
    """
    h = bergman_matrix(z, k, orbit, constant)
    det = complex(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])
    m = 3 * k
    d = diagonal_derivatives(orbit, m)
    B = d.value
    Bi, Bj = d.grad[:2], d.grad[2:]
    P = d.hess / B
    G = np.outer(Bi, Bj) / B ** 2
    a = _hyperbolic_block(z)
    s = z.weight
    T1 = m * m / s ** 3
    T2 = -m * (a[0, 0] * P[1, 1] + a[1, 1] * P[0, 0] - a[0, 1] * P[1, 0] - a[1, 0] * P[0, 1])
    T3 = (m * (a[0, 0] * G[1, 1] + a[1, 1] * G[0, 0] - a[0, 1] * G[1, 0] - a[1, 0] * G[0, 1])
          + P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0])
    T4 = (-P[0, 0] * G[1, 1] - G[0, 0] * P[1, 1] + P[0, 1] * G[1, 0] + G[0, 1] * P[1, 0]
          + G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0])
    Ts = [complex(T1), complex(T2), complex(T3), complex(T4)]
    return MetricRatio(
        complex(h[0, 0]), complex(h[0, 1]), complex(h[1, 0]), complex(h[1, 1]),
        *Ts,
        ratio=float(s ** 3 * abs(det) / math.pi ** 2),
        det=det,
        t_scale=float(sum(abs(t) for t in Ts)),
    )

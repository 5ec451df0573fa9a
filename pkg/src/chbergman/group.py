"""SU(2,1) elements acting on the ball by fractional-linear maps.

A 3x3 matrix ``g`` is split into blocks ``A`` (2x2), ``B`` (2x1), ``C``
(1x2) and ``D`` (scalar); ``g`` sends ``z`` to ``(Az + B) / (Cz + D)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import HERMITIAN_FORM, BallPoint

__all__ = [
    "MEMBERSHIP_TOL",
    "MembershipReport",
    "GroupElement",
    "SingularActionError",
    "check_membership",
    "reproject",
    "act",
    "cocycle",
    "action_jacobian",
    "entry_bound_holds",
    "identity",
    "boost",
    "rotation",
    "random_element",
]

MEMBERSHIP_TOL = 1e-10
_REPROJECT_TOL = 5e-12
H = HERMITIAN_FORM


class SingularActionError(ArithmeticError):
    """``Cz + D`` vanished: the matrix cannot be a member of SU(2,1)."""


@dataclass(frozen=True)
class MembershipReport:
    form_residual: float
    det_residual: float
    column_relation_residual: float
    row_relation_residual: float

    @property
    def passed(self) -> bool:
        return self.form_residual <= MEMBERSHIP_TOL and self.det_residual <= MEMBERSHIP_TOL


def check_membership(M) -> MembershipReport:
    """Residuals of ``g*Hg = H``, ``det g = 1`` and the derived norm relations."""
    g = np.asarray(M, dtype=complex)
    if g.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {g.shape}")
    form = float(np.max(np.abs(g.conj().T @ H @ g - H)))
    det = float(abs(np.linalg.det(g) - 1.0))
    sig = np.array([1.0, 1.0, -1.0])
    # columns: |a_1i|^2 + |a_2i|^2 - |c_i|^2 = 1 and |D|^2 - |b_1|^2 - |b_2|^2 = 1;
    # rows: the same with g replaced by g*
    cols = sig @ np.abs(g) ** 2 - sig
    rows = np.abs(g) ** 2 @ sig - sig
    return MembershipReport(form, det, float(np.max(np.abs(cols))), float(np.max(np.abs(rows))))


def reproject(M) -> np.ndarray:
    """One first-order correction back onto ``g*Hg = H``, then ``det = 1``.

    Residuals are only acted on when they exceed the rounding level of a
    matrix of this size (``|g|^2`` for the form, ``|g|^3`` for the
    determinant); correcting pure rounding noise would add error, not
    remove it.
    """
    g = np.asarray(M, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(g))))
    delta = g.conj().T @ H @ g - H
    if np.max(np.abs(delta)) > _REPROJECT_TOL * scale ** 2:
        g = g @ (np.eye(3) - 0.5 * H @ delta)
    det = np.linalg.det(g)
    if abs(det - 1.0) > _REPROJECT_TOL * scale ** 3:
        g = g / cmath.exp(cmath.log(det) / 3.0)
    return g


class GroupElement:
    """An SU(2,1) matrix. Construction validates membership unless ``check=False``."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        g = np.array(matrix, dtype=complex)
        if g.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {g.shape}")
        if check:
            rep = check_membership(g)
            if not rep.passed:
                raise ValueError(
                    f"matrix is not in SU(2,1): form residual {rep.form_residual:.3g}, "
                    f"det residual {rep.det_residual:.3g}")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[:2, 2]

    @property
    def C(self) -> np.ndarray:
        return self.matrix[2, :2]

    @property
    def D(self) -> complex:
        return complex(self.matrix[2, 2])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(reproject(self.matrix @ other.matrix), check=False)

    def inverse(self) -> "GroupElement":
        # g^-1 = H g* H for H-unitary g
        return GroupElement(H @ self.matrix.conj().T @ H, check=False)

    def conj_transpose(self) -> "GroupElement":
        return GroupElement(self.matrix.conj().T, check=False)

    def allclose(self, other: "GroupElement", atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"GroupElement({self.matrix.tolist()!r})"


def act(g: GroupElement, p: BallPoint) -> BallPoint:
    m = g.matrix
    q = m[2, 0] * p.z1 + m[2, 1] * p.z2 + m[2, 2]
    if abs(q) < 1e-14:
        raise SingularActionError("Cz + D vanishes; the matrix is not in SU(2,1)")
    n1 = m[0, 0] * p.z1 + m[0, 1] * p.z2 + m[0, 2]
    n2 = m[1, 0] * p.z1 + m[1, 1] * p.z2 + m[1, 2]
    return BallPoint(n1 / q, n2 / q)


def cocycle(g: GroupElement, p: BallPoint) -> complex:
    """The automorphy factor ``c1 z1 + c2 z2 + D``."""
    m = g.matrix
    return complex(m[2, 0] * p.z1 + m[2, 1] * p.z2 + m[2, 2])


def action_jacobian(g: GroupElement, p: BallPoint) -> np.ndarray:
    """Holomorphic Jacobian ``d(gz)_i / dz_j``; its determinant is ``cocycle**-3``."""
    m = g.matrix
    z = p.as_array()
    q = m[2, :2] @ z + m[2, 2]
    num = m[:2, :2] @ z + m[:2, 2]
    return (m[:2, :2] * q - np.outer(num, m[2, :2])) / q ** 2


def entry_bound_holds(g: GroupElement) -> bool:
    """``|a_ji| <= 2|D|`` for all entries of the ``A`` block."""
    return bool(np.all(np.abs(g.A) <= 2.0 * abs(g.D) * (1.0 + 1e-12)))


def identity() -> GroupElement:
    return GroupElement(np.eye(3), check=False)


def boost(t: float) -> GroupElement:
    """Translation by ``2t`` along the complex geodesic ``z2 = 0``."""
    c, s = math.cosh(t), math.sinh(t)
    return GroupElement([[c, 0, s], [0, 1, 0], [s, 0, c]], check=False)


def rotation(theta: float) -> GroupElement:
    u = cmath.exp(1j * theta)
    return GroupElement(np.diag([u, u, u ** -2]), check=False)


def _form(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(v.conj() @ H @ u)


def random_element(seed=None) -> GroupElement:
    """Random SU(2,1) element by Gram-Schmidt against the indefinite form.

    A Gaussian complex 3-frame is orthonormalised with the two positive
    vectors first and the negative one last; near-null candidates restart
    the draw. The frame is then divided by a cube root of its determinant.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    signs = (1.0, 1.0, -1.0)
    while True:
        raw = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        frame: list[np.ndarray] = []
        for k in range(3):
            v = raw[:, k].copy()
            for e, s in zip(frame, signs):
                v = v - s * _form(v, e) * e
            nrm = _form(v, v).real
            if abs(nrm) < 1e-6 or nrm * signs[k] < 0:
                break
            frame.append(v / math.sqrt(abs(nrm)))
        if len(frame) == 3:
            break
    g = np.column_stack(frame)
    g = g / cmath.exp(cmath.log(np.linalg.det(g)) / 3.0)
    if np.max(np.abs(g.conj().T @ H @ g - H)) > _REPROJECT_TOL:
        g = reproject(g)
    return GroupElement(g, check=False)

"""Inner loops over orbit elements.

Every public function here has a numba implementation and a numpy
implementation with identical arithmetic order; ``_accel.HAVE_NUMBA`` picks
one at import. Matrices arrive as an ``(n, 3, 3)`` complex128 stack.

Series conventions (weight ``m``, diagonal point ``z``): with
``N_i = a_i1 z1 + a_i2 z2 + b_i``, ``Q = c1 z1 + c2 z2 + D`` and
``E_j = conj(c_j) - conj(a_1j) z1 - conj(a_2j) z2``, each element contributes

    base   = conj(Q) - conj(N_1) z1 - conj(N_2) z2
    term   = base**-m
    d/dz_j     term = m conj(N_j) base**-(m+1)
    d/dzbar_j  term = -m E_j base**-(m+1)
    d2/dz_i dzbar_j term = m conj(a_ij) base**-(m+1)
                           - m (m+1) E_j conj(N_i) base**-(m+2)
"""
from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit

if HAVE_NUMBA:
    from numba import prange
else:  # pragma: no cover - exercised with the env flag
    prange = range


# ---------------------------------------------------------------- numba path

@njit(cache=True)
def _ipow_nb(x, n):
    result = 1.0 + 0.0j
    while n > 0:
        if n & 1:
            result = result * x
        x = x * x
        n >>= 1
    return result


@njit(cache=True)
def _pairwise_sum_nb(values):
    n = values.shape[0]
    buf = values.copy()
    while n > 1:
        half = n // 2
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        if n % 2 == 1:
            buf[half] = buf[n - 1]
            n = half + 1
        else:
            n = half
    return buf[0]


@njit(cache=True, parallel=True)
def _offdiag_terms_nb(mats, z1, z2, w1, w2, m):
    n = mats.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for e in prange(n):
        g = mats[e]
        n1 = g[0, 0] * w1 + g[0, 1] * w2 + g[0, 2]
        n2 = g[1, 0] * w1 + g[1, 1] * w2 + g[1, 2]
        q = g[2, 0] * w1 + g[2, 1] * w2 + g[2, 2]
        base = np.conj(q) - np.conj(n1) * z1 - np.conj(n2) * z2
        out[e] = _ipow_nb(1.0 / base, m)
    return out


@njit(cache=True, parallel=True)
def _diag_terms_nb(mats, z1, z2, m, want_derivs):
    n = mats.shape[0]
    val = np.empty(n, dtype=np.complex128)
    grad = np.zeros((n, 4), dtype=np.complex128)
    hess = np.zeros((n, 2, 2), dtype=np.complex128)
    for e in prange(n):
        g = mats[e]
        n1 = g[0, 0] * z1 + g[0, 1] * z2 + g[0, 2]
        n2 = g[1, 0] * z1 + g[1, 1] * z2 + g[1, 2]
        q = g[2, 0] * z1 + g[2, 1] * z2 + g[2, 2]
        base = np.conj(q) - np.conj(n1) * z1 - np.conj(n2) * z2
        inv = 1.0 / base
        p0 = _ipow_nb(inv, m)
        val[e] = p0
        if want_derivs:
            p1 = p0 * inv
            p2 = p1 * inv
            cn1 = np.conj(n1)
            cn2 = np.conj(n2)
            e1 = np.conj(g[2, 0]) - np.conj(g[0, 0]) * z1 - np.conj(g[1, 0]) * z2
            e2 = np.conj(g[2, 1]) - np.conj(g[0, 1]) * z1 - np.conj(g[1, 1]) * z2
            grad[e, 0] = m * cn1 * p1
            grad[e, 1] = m * cn2 * p1
            grad[e, 2] = -m * e1 * p1
            grad[e, 3] = -m * e2 * p1
            mm = m * (m + 1.0)
            hess[e, 0, 0] = m * np.conj(g[0, 0]) * p1 - mm * e1 * cn1 * p2
            hess[e, 0, 1] = m * np.conj(g[0, 1]) * p1 - mm * e2 * cn1 * p2
            hess[e, 1, 0] = m * np.conj(g[1, 0]) * p1 - mm * e1 * cn2 * p2
            hess[e, 1, 1] = m * np.conj(g[1, 1]) * p1 - mm * e2 * cn2 * p2
    return val, grad, hess


# ---------------------------------------------------------------- numpy path

def _ipow_np(x: np.ndarray, n: int) -> np.ndarray:
    result = np.ones_like(x)
    while n > 0:
        if n & 1:
            result = result * x
        x = x * x
        n >>= 1
    return result


def _pairwise_sum_np(values: np.ndarray):
    buf = np.asarray(values)
    if buf.shape[0] == 0:
        return buf.dtype.type(0)
    while buf.shape[0] > 1:
        n = buf.shape[0]
        half = n // 2
        summed = buf[0:2 * half:2] + buf[1:2 * half:2]
        if n % 2 == 1:
            summed = np.concatenate([summed, buf[n - 1:]])
        buf = summed
    return buf[0]


def _rows(mats, x1, x2):
    n1 = mats[:, 0, 0] * x1 + mats[:, 0, 1] * x2 + mats[:, 0, 2]
    n2 = mats[:, 1, 0] * x1 + mats[:, 1, 1] * x2 + mats[:, 1, 2]
    q = mats[:, 2, 0] * x1 + mats[:, 2, 1] * x2 + mats[:, 2, 2]
    return n1, n2, q


def _offdiag_terms_np(mats, z1, z2, w1, w2, m):
    n1, n2, q = _rows(mats, w1, w2)
    base = np.conj(q) - np.conj(n1) * z1 - np.conj(n2) * z2
    return _ipow_np(1.0 / base, m)


def _diag_terms_np(mats, z1, z2, m, want_derivs):
    n = mats.shape[0]
    n1, n2, q = _rows(mats, z1, z2)
    base = np.conj(q) - np.conj(n1) * z1 - np.conj(n2) * z2
    inv = 1.0 / base
    p0 = _ipow_np(inv, m)
    grad = np.zeros((n, 4), dtype=np.complex128)
    hess = np.zeros((n, 2, 2), dtype=np.complex128)
    if want_derivs:
        p1 = p0 * inv
        p2 = p1 * inv
        cn1, cn2 = np.conj(n1), np.conj(n2)
        c = np.conj(mats)
        e1 = c[:, 2, 0] - c[:, 0, 0] * z1 - c[:, 1, 0] * z2
        e2 = c[:, 2, 1] - c[:, 0, 1] * z1 - c[:, 1, 1] * z2
        grad[:, 0] = m * cn1 * p1
        grad[:, 1] = m * cn2 * p1
        grad[:, 2] = -m * e1 * p1
        grad[:, 3] = -m * e2 * p1
        mm = m * (m + 1.0)
        hess[:, 0, 0] = m * c[:, 0, 0] * p1 - mm * e1 * cn1 * p2
        hess[:, 0, 1] = m * c[:, 0, 1] * p1 - mm * e2 * cn1 * p2
        hess[:, 1, 0] = m * c[:, 1, 0] * p1 - mm * e1 * cn2 * p2
        hess[:, 1, 1] = m * c[:, 1, 1] * p1 - mm * e2 * cn2 * p2
    return p0, grad, hess


# ---------------------------------------------------------------- dispatch

def _prep(mats):
    return np.ascontiguousarray(mats, dtype=np.complex128)


def pairwise_sum(values, use_numba: bool | None = None):
    """Deterministic bottom-up pairwise sum of a 1-D real or complex array."""
    values = np.ascontiguousarray(values)
    if values.dtype.kind not in "fc":
        values = values.astype(np.float64)
    if values.shape[0] == 0:
        return values.dtype.type(0)
    if _use(use_numba):
        return _pairwise_sum_nb(values)
    return _pairwise_sum_np(values)


def offdiag_terms(mats, z, w, m: int, use_numba: bool | None = None) -> np.ndarray:
    """Per-element terms ``(-<z~, g w~>)**-m`` of the off-diagonal series."""
    args = (_prep(mats), complex(z[0]), complex(z[1]), complex(w[0]), complex(w[1]), int(m))
    if _use(use_numba):
        return _offdiag_terms_nb(*args)
    return _offdiag_terms_np(*args)


def diag_terms(mats, z, m: int, want_derivs: bool = True, use_numba: bool | None = None):
    """Per-element diagonal terms with first and mixed second Wirtinger derivatives.

    Returns ``(val, grad, hess)`` of shapes ``(n,)``, ``(n, 4)`` and
    ``(n, 2, 2)``. ``grad`` columns are d/dz1, d/dz2, d/dzbar1, d/dzbar2;
    ``hess[:, i, j]`` is d2/dz_i dzbar_j.
    """
    args = (_prep(mats), complex(z[0]), complex(z[1]), int(m), bool(want_derivs))
    if _use(use_numba):
        return _diag_terms_nb(*args)
    return _diag_terms_np(*args)


def _use(flag):
    if flag is None:
        return HAVE_NUMBA
    if flag and not HAVE_NUMBA:
        raise RuntimeError("numba path requested but numba is disabled or missing")
    return bool(flag)

"""Measured-versus-bound sweeps shared by the CLI and the test suite."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import bounds
from .bounds import BoundReport, verify
from .geometry import BallPoint, hyp_distance
from .kernel import KernelConstant, diagonal_derivatives, kernel_sum, volume_ratio
from .numerics import integrate_tail
from .orbit import LatticeSpec, counting_function, dirichlet_membership, enumerate_orbit

__all__ = [
    "random_points",
    "point_at_distance",
    "pairs_at_distances",
    "spec_radius",
    "counting_reports",
    "majorant_reports",
    "diagonal_reports",
    "offdiag_reports",
    "derivative_reports",
    "ratio_reports",
    "lemma_reports",
    "full_audit",
]

MAJORANT_TOL = 1e-10


def random_points(n: int, seed: int, max_radius: float = 0.7) -> list[BallPoint]:
    """Seeded points uniform in direction with radius ``max_radius * u^(1/4)``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.standard_normal(4)
        v *= max_radius * rng.random() ** 0.25 / np.linalg.norm(v)
        out.append(BallPoint(complex(v[0], v[1]), complex(v[2], v[3])))
    return out


def point_at_distance(z: BallPoint, d: float, direction) -> BallPoint:
    """Point at hyperbolic distance ``d`` from ``z``, leaving in ``direction``.

    Uses the ball automorphism swapping 0 and ``z``, which is an isometry.
    """
    u = np.asarray(direction, dtype=complex)
    x = math.tanh(d / 2.0) * u / np.linalg.norm(u)
    a = z.as_array()
    na = float(np.real(np.vdot(a, a)))
    if na == 0.0:
        return BallPoint(-x[0], -x[1])
    xa = np.vdot(a, x)                    # <x, a> = sum x_i conj(a_i)
    px = xa / na * a
    s = math.sqrt(z.weight)
    y = (a - px - s * (x - px)) / (1.0 - xa)
    return BallPoint(y[0], y[1])


def pairs_at_distances(centers: Iterable[BallPoint], distances: Iterable[float],
                       seed: int) -> list[tuple[BallPoint, BallPoint]]:
    rng = np.random.default_rng(seed)
    out = []
    for z in centers:
        for d in distances:
            v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            out.append((z, point_at_distance(z, d, v)))
    return out


def spec_radius(spec: LatticeSpec, r: float | None = None) -> float:
    if r is not None:
        return float(r)
    if spec.injectivity_radius_override is None:
        raise ValueError(f"spec {spec.name!r} has no injectivity radius; pass r explicitly")
    return spec.injectivity_radius_override


def counting_reports(spec: LatticeSpec, r: float, z: BallPoint, w: BallPoint, length: int,
                     deltas: Iterable[float]) -> list[BoundReport]:
    orb = enumerate_orbit(spec, z, w, length)
    out = []
    for delta in deltas:
        if delta > orb.truncation_radius:
            continue
        n = counting_function(orb, delta)
        out.append(verify(f"N({spec.name}; delta={delta:g})", n.count,
                          bounds.counting_bound(delta, r), "counting"))
    return out


def majorant_reports(ms: Iterable[int], rs: Iterable[float],
                     delta_factors: Sequence[float] = (0.75, 1.0, 1.5, 2.0, 3.0, 5.0),
                     tol: float = MAJORANT_TOL) -> list[BoundReport]:
    """Quadrature of the tail integral against each closed-form majorant.

    ``prop1`` and ``prop2`` are checked at ``delta = f * r`` for each
    factor ``f``; ``cor3`` at its own cut ``delta = r``.
    """
    out = []
    for r in rs:
        for m in ms:
            f = bounds.tail_integrand(m, r)
            cache: dict[float, float] = {}

            def tail(delta):
                if delta not in cache:
                    cache[delta] = integrate_tail(f, delta, tol=tol).value
                return cache[delta]

            for fac in delta_factors:
                delta = fac * r
                for kind in ("prop1", "prop2"):
                    out.append(verify(f"tail[{kind}] m={m} r={r:g} delta={delta:g}", tail(delta),
                                      bounds.tail_majorant(kind, m, r, delta), "delta >= 3r/4"))
            out.append(verify(f"tail[cor3] m={m} r={r:g}", tail(float(r)),
                              bounds.tail_majorant("cor3", m, r), "delta = r"))
    return out


def diagonal_reports(spec: LatticeSpec, r: float, points: Iterable[BallPoint],
                     ks: Iterable[int], length: int, C: float = 1.0) -> list[BoundReport]:
    const = KernelConstant(C)
    out = []
    for z in points:
        orb = enumerate_orbit(spec, z, z, length)
        for k in ks:
            val = kernel_sum(orb, 3 * k, const).petersson
            out.append(verify(f"diag kernel {spec.name} k={k}", val,
                              bounds.c_tilde(k, r, C).value, "diagonal"))
    return out


def offdiag_reports(spec: LatticeSpec, r: float, pairs: Iterable[tuple[BallPoint, BallPoint]],
                    ks: Iterable[int], length: int, C: float = 1.0,
                    variant: str = "proof") -> list[BoundReport]:
    """Off-diagonal kernel against the regime-appropriate estimate.

    Pairs whose ``w`` is not in the explored Dirichlet domain of ``z`` are
    skipped, since both estimates assume it. Two measured quantities are
    reported: the Petersson kernel and the termwise majorant
    ``sum C / cosh^m(d(z, gw)/2)``.
    """
    const = KernelConstant(C)
    out = []
    for z, w in pairs:
        orb = enumerate_orbit(spec, z, w, length)
        if not dirichlet_membership(z, w, orb):
            continue
        d = hyp_distance(z, w)
        for k in ks:
            m = 3 * k
            bound, regime = bounds.offdiag_bound(d, k, r, C, variant)
            kv = kernel_sum(orb, m, const)
            tri = C * math.fsum(np.cosh(orb.dists / 2.0) ** -float(m))
            out.append(verify(f"offdiag kernel {spec.name} k={k} d={d:.6g}", kv.petersson,
                              bound, regime))
            out.append(verify(f"offdiag termwise {spec.name} k={k} d={d:.6g}", tri, bound, regime))
    return out


def derivative_reports(spec: LatticeSpec, r: float, points: Iterable[BallPoint],
                       ks: Iterable[int], length: int, C: float = 1.0) -> list[BoundReport]:
    out = []
    for z in points:
        orb = enumerate_orbit(spec, z, z, length)
        for k in ks:
            ct = bounds.c_tilde(k, r, C).value
            der = diagonal_derivatives(orb, 3 * k)
            g = C * float(np.max(np.abs(der.grad[:2])))
            h = C * float(np.max(np.abs(der.hess)))
            out.append(verify(f"grad {spec.name} k={k}", g, bounds.prop6_bound(k, z.weight, ct),
                              "diagonal"))
            out.append(verify(f"hessian {spec.name} k={k}", h,
                              bounds.prop8_bound(k, z.weight, ct), "diagonal"))
    return out


def ratio_reports(spec: LatticeSpec, r: float, points: Iterable[BallPoint], ks: Iterable[int],
                  length: int, C: float = 1.0) -> list[BoundReport]:
    const = KernelConstant(C)
    out = []
    for z in points:
        orb = enumerate_orbit(spec, z, z, length)
        for k in ks:
            mr = volume_ratio(z, k, orb, const)
            out.append(verify(f"volume ratio {spec.name} k={k}", mr.ratio,
                              bounds.thm9_bound(k, r, C), "log k"))
    return out


def lemma_reports(rs: Iterable[float] = (0.5, 1.0, 2.0, 4.0), n: int = 10_000) -> list[BoundReport]:
    out = []
    for r in rs:
        out.extend(bounds.elementary_lemmas(r, n))
    return out


def _dirichlet_pairs(spec: LatticeSpec, candidates, length: int):
    pairs = []
    for z, w in candidates:
        orb = enumerate_orbit(spec, z, w, length)
        if dirichlet_membership(z, w, orb):
            pairs.append((z, w))
    return pairs


def full_audit(spec: LatticeSpec, r: float, ks: Sequence[int] = (3, 5, 10), length: int = 3,
               n_points: int = 8, seed: int = 0, C: float = 1.0,
               variant: str = "proof") -> list[BoundReport]:
    """Every inequality check for one spec, in a fixed order."""
    pts = random_points(n_points, seed)
    dists = [f * r for f in (0.1, 0.4, 0.7, 0.74, 0.76, 1.0, 1.5, 2.5)]
    candidates = pairs_at_distances(random_points(n_points, seed + 1, 0.5), dists, seed + 2)
    origin = BallPoint(0.0, 0.0)
    reports: list[BoundReport] = []
    reports += counting_reports(spec, r, origin, origin, length,
                                [0.0, 0.5 * r, r, 1.5 * r, 2.0 * r, 3.0 * r])
    reports += diagonal_reports(spec, r, pts, ks, length, C)
    reports += offdiag_reports(spec, r, _dirichlet_pairs(spec, candidates, length), ks, length, C,
                               variant)
    reports += derivative_reports(spec, r, pts, ks, length, C)
    reports += ratio_reports(spec, r, pts, ks, length, C)
    reports += lemma_reports((r,), 10_000)
    reports += majorant_reports([3 * k for k in ks], [r])
    return reports

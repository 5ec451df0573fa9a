"""Closed-form kernel estimates, truncation-tail certificates and bound reports.

Weights follow the kernel module: ``k`` is the bundle power and the series
weight is ``m = 3k``. ``r`` is always an explicit injectivity radius; the
caller decides whether it comes from an orbit estimate or an override.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .numerics import integrate_tail

__all__ = [
    "SATISFIED_TOL",
    "HypothesisError",
    "MajorantUndefinedError",
    "RegimeError",
    "TruncationCertificate",
    "BoundReport",
    "CTilde",
    "counting_bound",
    "tail_integrand",
    "tail_majorant",
    "tail_certificate",
    "prop1_bound",
    "prop2_bound",
    "offdiag_bound",
    "c_tilde",
    "thm4_bound",
    "thm9_bound",
    "prop6_bound",
    "prop8_bound",
    "elementary_lemmas",
    "verify",
]

SATISFIED_TOL = 1e-12
VARIANTS = ("proof", "statement")


class HypothesisError(ValueError):
    """An estimate was requested outside the range where it is proved."""


class RegimeError(HypothesisError):
    """Distance falls in the other estimate's regime."""


class MajorantUndefinedError(ValueError):
    """The closed-form majorant needs a larger weight; ``certificate`` is still usable."""

    def __init__(self, message: str, certificate: "TruncationCertificate"):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class TruncationCertificate:
    delta_cut: float
    boundary_term: float
    tail_integral_term: float
    total_tail: float
    exhaustive: bool
    majorant: float | None
    quadrature_error: float

    @property
    def within_majorant(self) -> bool | None:
        if self.majorant is None:
            return None
        return self.tail_integral_term <= self.majorant * (1.0 + 1e-12)


@dataclass(frozen=True)
class BoundReport:
    quantity: str
    measured: float
    bound: float
    regime: str
    satisfied: bool
    margin: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CTilde:
    value: float
    components: tuple


def _check_r(r: float):
    if not r > 0:
        raise ValueError("injectivity radius must be positive")


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")


def _log_cosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _log_sinh(x):
    # x > 0
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def _inv_cosh_pow(x: float, p: float) -> float:
    """``cosh(x)**-p`` without overflow."""
    return math.exp(-p * float(_log_cosh(x)))


def counting_bound(delta: float, r: float) -> float:
    """Packing bound ``sinh^4((2 delta + r)/4) / sinh^4(r/4)`` on the orbit count."""
    _check_r(r)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return (math.sinh((2.0 * delta + r) / 4.0) / math.sinh(r / 4.0)) ** 4


def tail_integrand(m: float, r: float):
    """``rho -> cosh^-m(rho/2) sinh^3((2 rho + r)/4) cosh((2 rho + r)/4)``, evaluated in logs."""
    _check_r(r)

    def f(rho):
        rho = np.asarray(rho, dtype=float)
        x = (2.0 * rho + r) / 4.0
        return np.exp(-m * _log_cosh(rho / 2.0) + 3.0 * _log_sinh(x) + _log_cosh(x))

    return f


def tail_majorant(kind: str, m: float, r: float, delta: float | None = None) -> float:
    """Closed-form upper bounds for ``int_delta^inf tail_integrand``.

    ``"prop1"``: ``32 cosh^4(r/4) / ((m-6) cosh^(m-6)(delta/2))``,
    ``"prop2"``: ``32 / ((m-8) cosh^(m-8)(delta/2))`` with default
    ``delta = 3r/4``, and ``"cor3"``: the same expression at ``delta = r``.
    All three need ``delta >= 3r/4``; the factor ``C / sinh^4(r/4)`` is not
    included.
    """
    _check_r(r)
    if kind == "cor3":
        delta = r if delta is None else delta
    elif kind == "prop2":
        delta = 0.75 * r if delta is None else delta
    elif kind != "prop1":
        raise ValueError(f"unknown majorant {kind!r}")
    if delta is None:
        raise ValueError("prop1 majorant needs delta")
    if delta < 0.75 * r * (1.0 - 1e-14):
        raise HypothesisError("majorants need delta >= 3r/4")
    if kind == "prop1":
        if m <= 6:
            raise ValueError("prop1 majorant needs m > 6")
        return 32.0 * math.cosh(r / 4.0) ** 4 / (m - 6.0) * _inv_cosh_pow(delta / 2.0, m - 6.0)
    if m <= 8:
        raise ValueError("majorant needs m > 8")
    return 32.0 / (m - 8.0) * _inv_cosh_pow(delta / 2.0, m - 8.0)


def tail_certificate(m: int, delta: float, r: float, C: float = 1.0, exhaustive: bool = True,
                     tol: float = 1e-8) -> TruncationCertificate:
    """Bound on the series terms at distances beyond ``delta``.

    ``boundary_term = C cosh^-m(delta/2) counting_bound(delta, r)`` and
    ``tail_integral_term = C / sinh^4(r/4) * int_delta^inf tail_integrand``
    by quadrature. The first closed-form majorant is attached when
    ``delta >= 3r/4``.
    """
    _check_r(r)
    if delta <= r / 2.0:
        raise HypothesisError("tail estimate needs delta > r/2")
    if m < 5:
        raise ValueError("weight must be at least 5")
    boundary = C * _inv_cosh_pow(delta / 2.0, m) * counting_bound(delta, r)
    res = integrate_tail(tail_integrand(m, r), delta, tol=tol)
    scale = C / math.sinh(r / 4.0) ** 4
    integral = scale * res.value
    maj = None
    if m > 6 and delta >= 0.75 * r:
        maj = scale * tail_majorant("prop1", m, r, delta)
    cert = TruncationCertificate(delta, boundary, integral, boundary + integral, exhaustive,
                                 maj, scale * res.error_estimate)
    if m <= 6:
        raise MajorantUndefinedError("closed-form majorant needs m > 6", cert)
    return cert


def prop1_bound(d: float, k: int, r: float, C: float = 1.0, variant: str = "proof") -> float:
    """Off-diagonal estimate for ``d >= 3r/4``.

    ``"statement"`` uses ``16 coth(r/4)`` over ``cosh^3k`` and a plain
    ``32 / (3k-6)`` tail; ``"proof"`` carries ``coth^4(r/4)`` on both, with
    ``cosh^(3k-4)`` in the middle term.
    """
    _check_r(r)
    _check_variant(variant)
    if k < 3:
        raise ValueError("k must be at least 3")
    if d < 0.75 * r:
        raise RegimeError("prop1 applies for d >= 3r/4")
    m = 3 * k
    h = d / 2.0
    coth = 1.0 / math.tanh(r / 4.0)
    first = C * _inv_cosh_pow(h, m)
    if variant == "statement":
        return first + 16.0 * coth * C * _inv_cosh_pow(h, m) \
            + 32.0 * C / (m - 6.0) * _inv_cosh_pow(h, m - 6)
    return first + 16.0 * coth ** 4 * C * _inv_cosh_pow(h, m - 4) \
        + 32.0 * coth ** 4 * C / (m - 6.0) * _inv_cosh_pow(h, m - 6)


def prop2_bound(d: float, k: int, r: float, C: float = 1.0, variant: str = "proof") -> float:
    """Off-diagonal estimate for ``d < 3r/4``.

    ``"proof"`` combines the near-range count with the boundary term
    (factor 2) and ends the tail at ``cosh^(3k-8)(3r/8)``. ``"statement"``
    uses ``cosh^k`` in the first term and ``coth(r/4) / cosh^(3k-8)(3r/4)``
    in the tail.
    """
    _check_r(r)
    _check_variant(variant)
    if k < 3:
        raise ValueError("k must be at least 3")
    if d >= 0.75 * r or d < 0:
        raise RegimeError("prop2 applies for 0 <= d < 3r/4")
    m = 3 * k
    h = d / 2.0
    s4 = math.sinh(r / 4.0) ** 4
    middle = 2.0 * C * math.sinh(5.0 * r / 8.0) ** 4 / s4 * _inv_cosh_pow(h, m)
    if variant == "statement":
        coth = 1.0 / math.tanh(r / 4.0)
        return C * _inv_cosh_pow(h, k) + middle \
            + 32.0 * coth * C / ((m - 8.0) * s4) * _inv_cosh_pow(0.75 * r, m - 8)
    return C * _inv_cosh_pow(h, m) + middle \
        + 32.0 * C / ((m - 8.0) * s4) * _inv_cosh_pow(0.375 * r, m - 8)


def offdiag_bound(d: float, k: int, r: float, C: float = 1.0,
                  variant: str = "proof") -> tuple[float, str]:
    """Regime-appropriate off-diagonal bound and the regime label."""
    if d >= 0.75 * r:
        return prop1_bound(d, k, r, C, variant), "d >= 3r/4"
    return prop2_bound(d, k, r, C, variant), "d < 3r/4"


def c_tilde(k: int, r: float, C: float = 1.0) -> CTilde:
    """Diagonal majorant: ``C`` plus packing and tail corrections at ``delta = r``."""
    _check_r(r)
    if k < 3:
        raise ValueError("k must be at least 3")
    m = 3 * k
    s4 = math.sinh(r / 4.0) ** 4
    packing = C * math.sinh(0.75 * r) ** 4 / s4 * _inv_cosh_pow(r / 2.0, m)
    tail = 32.0 * C / ((m - 8.0) * s4) * _inv_cosh_pow(r / 2.0, m - 8)
    return CTilde(C + packing + tail, (C, packing, tail))


def thm4_bound(d: float, k: int, r: float, C: float = 1.0,
               variant: str = "proof") -> tuple[float, float]:
    """Envelope value and the constant ``A`` with ``value = A k^2 / cosh^(3k-8)(d/2)``."""
    if d < 0:
        raise ValueError("distance must be nonnegative")
    value, _ = offdiag_bound(d, k, r, C, variant)
    A = value / (k * k) / _inv_cosh_pow(d / 2.0, 3 * k - 8)
    return value, A


def thm9_bound(k: int, r: float, C: float = 1.0, variant: str = "log",
               weight: float | None = None) -> float:
    """Bound on the Bergman-to-hyperbolic volume ratio.

    ``"log"``: ``120961 (Ct/C)^3 k^4 ln k``; ``"nolog"``: the same without
    ``ln k``; ``"pointwise"``: ``9k^2/pi^2 + (2 Ct/C)^3 15120 k^4 / (1-|z|^2)``,
    which needs ``weight = 1 - |z|^2``.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    q = c_tilde(k, r, C).value / C
    if variant == "log":
        return 120961.0 * q ** 3 * k ** 4 * math.log(k)
    if variant == "nolog":
        return 120961.0 * q ** 3 * k ** 4
    if variant == "pointwise":
        if weight is None or not weight > 0:
            raise ValueError("pointwise variant needs weight = 1 - |z|^2 > 0")
        return 9.0 * k * k / math.pi ** 2 + (2.0 * q) ** 3 * 15120.0 * k ** 4 / weight
    raise ValueError(f"unknown variant {variant!r}")


def prop6_bound(k: int, weight: float, ctilde: float) -> float:
    """First-derivative bound ``6k Ct / (1-|z|^2)^(3k+1)``."""
    return 6.0 * k * ctilde / weight ** (3 * k + 1)


def prop8_bound(k: int, weight: float, ctilde: float, variant: str = "statement") -> float:
    """Mixed second-derivative bound with ``12k(3k+1)`` (statement) or ``12k(k+1)`` (proof)."""
    if variant == "statement":
        c = 24.0 * k + 12.0 * k * (3 * k + 1)
    elif variant == "proof":
        c = 24.0 * k + 12.0 * k * (k + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return c * ctilde / weight ** (3 * k + 2)


def verify(quantity: str, measured: float, bound: float, regime: str = "") -> BoundReport:
    measured, bound = float(measured), float(bound)
    margin = bound - measured
    return BoundReport(quantity, measured, bound, regime, bool(margin >= -SATISFIED_TOL), margin)


def elementary_lemmas(r: float, n: int = 10_000, rho_max: float = 40.0) -> list[BoundReport]:
    """Worst-case ratio lhs/rhs of the three pointwise hyperbolic inequalities.

    The first holds for all ``rho >= 0``; the other two on ``rho >= 3r/4``.
    Each report compares the grid maximum of ``lhs/rhs`` against 1.
    """
    _check_r(r)
    rho_all = np.linspace(0.0, rho_max, n)
    rho_far = np.linspace(0.75 * r, rho_max, n)
    x_all = (2.0 * rho_all + r) / 4.0
    x_far = (2.0 * rho_far + r) / 4.0
    checks = [
        ("sinh((2rho+r)/4) <= 2cosh(r/4)cosh(rho/2)", "rho >= 0",
         _log_sinh(x_all) - (math.log(2.0 * math.cosh(r / 4.0)) + _log_cosh(rho_all / 2.0))),
        ("sinh((2rho+r)/4) <= 2sinh(rho/2)cosh(rho/2)", "rho >= 3r/4",
         _log_sinh(x_far) - (math.log(2.0) + _log_sinh(rho_far / 2.0) + _log_cosh(rho_far / 2.0))),
        ("cosh((2rho+r)/4) <= 2cosh^2(rho/2)", "rho >= 3r/4",
         _log_cosh(x_far) - (math.log(2.0) + 2.0 * _log_cosh(rho_far / 2.0))),
    ]
    out = []
    for name, regime, log_ratio in checks:
        worst = float(np.exp(np.max(log_ratio)))
        out.append(verify(f"{name} [r={r:g}]", worst, 1.0, regime))
    return out


def violations(reports: Iterable[BoundReport]) -> list[BoundReport]:
    return [rep for rep in reports if not rep.satisfied]

"""Complex hyperbolic ball geometry, SU(2,1) orbits and automorphic Bergman-kernel series."""
from ._accel import backend
from .bounds import (BoundReport, CTilde, TruncationCertificate, c_tilde, counting_bound,
                     prop1_bound, prop2_bound, tail_certificate, thm4_bound, thm9_bound, verify)
from .geometry import BallPoint, ball_volume, hyp_distance, hyp_inner, lift, volume_density
from .group import GroupElement, act, boost, check_membership, cocycle, random_element, rotation
from .kernel import (KernelConstant, KernelValue, MetricRatio, bergman_matrix, kernel_grad,
                     kernel_hessian, kernel_sum, kernel_term, volume_ratio)
from .orbit import LatticeSpec, Orbit, counting_function, dirichlet_membership, enumerate_orbit

__version__ = "0.1.0"

__all__ = [
    "backend", "BoundReport", "CTilde", "TruncationCertificate", "c_tilde", "counting_bound",
    "prop1_bound", "prop2_bound", "tail_certificate", "thm4_bound", "thm9_bound", "verify",
    "BallPoint", "ball_volume", "hyp_distance", "hyp_inner", "lift", "volume_density",
    "GroupElement", "act", "boost", "check_membership", "cocycle", "random_element", "rotation",
    "KernelConstant", "KernelValue", "MetricRatio", "bergman_matrix", "kernel_grad",
    "kernel_hessian", "kernel_sum", "kernel_term", "volume_ratio",
    "LatticeSpec", "Orbit", "counting_function", "dirichlet_membership", "enumerate_orbit",
]

"""Generator sets shipped with the package for tests and the CLI."""
from __future__ import annotations

import math
from importlib import resources

import numpy as np

from .group import GroupElement, boost, rotation
from .orbit import LatticeSpec

__all__ = ["SHIPPED", "boost_spec", "boost_rotation_spec", "schottky_spec", "shipped_spec",
           "shipped_spec_path"]

SHIPPED = ("boost", "boost_rotation", "schottky")


def boost_spec() -> LatticeSpec:
    """Cyclic group of translations by 2 along the ``z2 = 0`` geodesic."""
    return LatticeSpec("boost", (boost(1.0),), True, 2.0)


def boost_rotation_spec() -> LatticeSpec:
    """Boost together with the central element ``rotation(2 pi / 3)``; has torsion."""
    return LatticeSpec("boost_rotation", (boost(1.0), rotation(2.0 * math.pi / 3.0)), True, None)


def _boost_z2(t: float) -> GroupElement:
    c, s = math.cosh(t), math.sinh(t)
    return GroupElement(np.array([[1, 0, 0], [0, c, s], [0, s, c]], dtype=complex), check=False)


def schottky_spec() -> LatticeSpec:
    """Two translations of length 4 along the perpendicular axes ``z2 = 0`` and ``z1 = 0``.

    The axes meet at the origin, and the translation lengths are long
    enough for the ping-pong lemma, so the group is free and discrete. The
    minimum displacement is 4, attained on the two axes.
    """
    return LatticeSpec("schottky", (boost(2.0), _boost_z2(2.0)), True, 4.0)


def shipped_spec_path(name: str):
    if name not in SHIPPED:
        raise KeyError(f"no shipped spec named {name!r}")
    return resources.files("chbergman.specs").joinpath(f"{name}.json")


def shipped_spec(name: str) -> LatticeSpec:
    from .io import spec_from_json

    return spec_from_json(shipped_spec_path(name).read_text())

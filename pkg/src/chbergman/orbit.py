"""Orbits of a finitely generated subgroup of SU(2,1).

The group is given only by generators; discreteness is assumed, never
checked. Words are tuples of letters: ``i`` stands for generator ``i`` and
``-(i + 1)`` for its inverse. A word ``(i1, ..., iL)`` is the product
``G[i1] @ ... @ G[iL]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import HERMITIAN_FORM, BallPoint, hyp_distance_many
from .group import _REPROJECT_TOL, GroupElement, check_membership

__all__ = [
    "DEDUP_TOL",
    "DEFAULT_BUDGET",
    "LatticeSpec",
    "Orbit",
    "OrbitElement",
    "CountResult",
    "PartialOrbitError",
    "UndefinedEstimateError",
    "TorsionWarning",
    "enumerate_orbit",
    "counting_function",
    "injectivity_radius_estimate",
    "dirichlet_membership",
    "word_to_str",
    "word_from_str",
]

DEDUP_TOL = 1e-9
DEFAULT_BUDGET = 10 ** 6
_TORSION_TOL = 1e-9
_TIE_TOL = 1e-12
_COUNT_TOL = 1e-12
H = HERMITIAN_FORM


class PartialOrbitError(RuntimeError):
    """Element budget exceeded; ``orbit`` is complete up to ``completed_length``."""

    def __init__(self, completed_length: int, orbit: "Orbit"):
        super().__init__(
            f"element budget exceeded; orbit complete only up to word length {completed_length}")
        self.completed_length = completed_length
        self.orbit = orbit


class UndefinedEstimateError(ValueError):
    pass


class TorsionWarning(UserWarning):
    pass


def _flat(mats: np.ndarray) -> np.ndarray:
    mats = mats.reshape(-1, 9)
    return np.concatenate([mats.real, mats.imag], axis=1)


def _dedup_radius(mats: np.ndarray) -> np.ndarray:
    # entries grow exponentially with word length, so the tolerance is relative
    return DEDUP_TOL * np.maximum(1.0, np.max(np.abs(mats), axis=(1, 2)))


def _duplicates(cand: np.ndarray, known: np.ndarray) -> np.ndarray:
    """Mask of candidates matching a known matrix or an earlier candidate."""
    flat = _flat(cand)
    rad = _dedup_radius(cand)
    dup = cKDTree(_flat(known)).query_ball_point(flat, rad, p=np.inf, return_length=True) > 0
    near = cKDTree(flat).query_ball_point(flat, rad, p=np.inf)
    for i, nbrs in enumerate(near):
        if not dup[i] and any(j < i for j in nbrs):
            dup[i] = True
    return dup


def _reproject_stack(mats: np.ndarray) -> np.ndarray:
    # vectorised group.reproject, same size-aware thresholds
    mats = mats.copy()
    scale = np.maximum(1.0, np.max(np.abs(mats), axis=(1, 2)))
    delta = np.einsum("nji,jk,nkl->nil", mats.conj(), H, mats) - H
    bad = np.max(np.abs(delta), axis=(1, 2)) > _REPROJECT_TOL * scale ** 2
    if np.any(bad):
        mats[bad] = mats[bad] @ (np.eye(3) - 0.5 * np.einsum("ij,njk->nik", H, delta[bad]))
    det = np.linalg.det(mats)
    off = np.abs(det - 1.0) > _REPROJECT_TOL * scale ** 3
    if np.any(off):
        mats[off] = mats[off] / np.exp(np.log(det[off]) / 3.0)[:, None, None]
    return mats


@dataclass(frozen=True)
class LatticeSpec:
    name: str
    generators: tuple
    include_inverses: bool = True
    injectivity_radius_override: float | None = None

    def __post_init__(self):
        gens = tuple(g if isinstance(g, GroupElement) else GroupElement(g) for g in self.generators)
        if not gens:
            raise ValueError("a lattice spec needs at least one generator")
        for i, g in enumerate(gens):
            rep = check_membership(g.matrix)
            if not rep.passed:
                raise ValueError(f"generator {i} is not in SU(2,1)")
        mats = np.stack([g.matrix for g in gens])
        if len(gens) > 1:
            dup = _duplicates(mats[1:], mats[:1]) | _duplicates(mats, mats[:0])[1:]
            if np.any(dup):
                pos = [int(i) + 1 for i in np.flatnonzero(dup)]
                raise ValueError(f"duplicate generators at positions {pos}")
        object.__setattr__(self, "generators", gens)

    def letters(self) -> list[tuple[int, np.ndarray]]:
        out = [(i, g.matrix) for i, g in enumerate(self.generators)]
        if self.include_inverses:
            out += [(-(i + 1), g.inverse().matrix) for i, g in enumerate(self.generators)]
        return out


class OrbitElement(NamedTuple):
    word: tuple
    g: GroupElement
    image: BallPoint
    dist: float


@dataclass
class Orbit:
    """Deduplicated group elements with images of ``base`` and distances from ``center``.

    Arrays are sorted by distance (stable with respect to enumeration
    order). ``truncation_radius`` is the smallest distance among the
    elements first reached at the final word length; queries beyond it can
    only give lower bounds.
    """

    spec: LatticeSpec | None
    center: BallPoint
    base: BallPoint
    max_word_length: int
    words: list
    matrices: np.ndarray
    images: np.ndarray
    dists: np.ndarray
    truncation_radius: float
    exhaustive: bool = True
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def elements(self) -> list[OrbitElement]:
        return [
            OrbitElement(w, GroupElement(m, check=False), BallPoint(im[0], im[1]), float(d))
            for w, m, im, d in zip(self.words, self.matrices, self.images, self.dists)
        ]

    @property
    def identity_index(self) -> int:
        return self.words.index(())

    @classmethod
    def from_matrices(cls, matrices, center: BallPoint, base: BallPoint, words=None,
                      spec: LatticeSpec | None = None) -> "Orbit":
        """Wrap an explicit element list (identity must be included as word ``()``)."""
        mats = np.asarray(matrices, dtype=complex).reshape(-1, 3, 3)
        if words is None:
            eye = np.all(np.abs(mats - np.eye(3)) <= DEDUP_TOL, axis=(1, 2))
            words = [() if e else (k,) for k, e in enumerate(eye)]
        return _finish(spec, center, base, 0, list(words), mats, math.inf, True, {})


def _images(mats: np.ndarray, w: BallPoint) -> np.ndarray:
    wt = np.array([w.z1, w.z2, 1.0], dtype=complex)
    v = mats @ wt
    return v[:, :2] / v[:, 2:3]


def _finish(spec, center, base, length, words, mats, radius, exhaustive, meta) -> Orbit:
    images = _images(mats, base)
    dists = hyp_distance_many(center, images[:, 0], images[:, 1])
    order = np.argsort(dists, kind="stable")
    return Orbit(
        spec=spec, center=center, base=base, max_word_length=length,
        words=[words[i] for i in order], matrices=mats[order], images=images[order],
        dists=dists[order], truncation_radius=radius, exhaustive=exhaustive, meta=meta)


def enumerate_orbit(spec: LatticeSpec, z: BallPoint, w: BallPoint, max_word_length: int,
                    budget: int = DEFAULT_BUDGET, prune_radius: float | None = None) -> Orbit:
    """All products of at most ``max_word_length`` letters, deduplicated as matrices.

    Two matrices are the same element when they agree entrywise to
    ``DEDUP_TOL`` times the larger of 1 and the candidate's largest entry. With ``prune_radius`` set, elements whose image of ``w``
    lies farther than that from ``z`` are dropped and not extended; the
    result is then flagged non-exhaustive.
    """
    if max_word_length < 0:
        raise ValueError("max_word_length must be nonnegative")
    letters = spec.letters()
    letter_ids = np.array([c for c, _ in letters])
    letter_mats = np.stack([m for _, m in letters])

    words: list[tuple] = [()]
    mats = np.eye(3, dtype=complex)[None].copy()
    frontier = np.array([0])
    pruned = False
    completed = 0
    radius = float(hyp_distance_many(z, np.array([w.z1]), np.array([w.z2]))[0])

    for length in range(1, max_word_length + 1):
        cand = (mats[frontier][:, None] @ letter_mats[None]).reshape(-1, 3, 3)
        cand = _reproject_stack(cand)
        parent = np.repeat(frontier, len(letters))
        letter = np.tile(letter_ids, len(frontier))

        keep = np.flatnonzero(~_duplicates(cand, mats))

        if prune_radius is not None and keep.size:
            im = _images(cand[keep], w)
            d = hyp_distance_many(z, im[:, 0], im[:, 1])
            far = d > prune_radius
            if np.any(far):
                pruned = True
                keep = keep[~far]

        if keep.size == 0:
            radius = math.inf
            completed = length
            break

        new_words = [words[parent[k]] + (int(letter[k]),) for k in keep]
        start = len(words)
        if start + keep.size > budget:
            partial = _finish(spec, z, w, completed, words, mats, radius, False,
                              {"budget": budget})
            raise PartialOrbitError(completed, partial)
        words.extend(new_words)
        mats = np.concatenate([mats, cand[keep]])
        frontier = np.arange(start, len(words))
        im = _images(mats[frontier], w)
        radius = float(np.min(hyp_distance_many(z, im[:, 0], im[:, 1])))
        completed = length

    exhaustive = not pruned
    return _finish(spec, z, w, max_word_length, words, mats, radius, exhaustive,
                   {"pruned": pruned, "completed_length": completed})


class CountResult(NamedTuple):
    count: int
    exact: bool


def counting_function(orbit: Orbit, delta: float) -> CountResult:
    """Number of orbit elements at distance at most ``delta`` from the centre.

    ``exact`` is False when ``delta`` exceeds the truncation radius or the
    orbit was pruned, in which case ``count`` is only a lower bound.
    """
    n = int(np.searchsorted(orbit.dists, delta + _COUNT_TOL, side="right"))
    exact = orbit.exhaustive and delta <= orbit.truncation_radius
    return CountResult(n, exact)


def injectivity_radius_estimate(spec: LatticeSpec, samples: Sequence[BallPoint],
                                max_word_length: int) -> float:
    """Smallest displacement ``d(z, g z)`` over samples and non-identity words.

    This bounds the injectivity radius from above. A displacement below
    ``1e-9`` means some element fixes a sample point; a ``TorsionWarning``
    is issued and the estimate is 0.
    """
    if not samples:
        raise ValueError("need at least one sample point")
    best = math.inf
    for z in samples:
        orb = enumerate_orbit(spec, z, z, max_word_length)
        mask = np.array([wd != () for wd in orb.words])
        if np.any(mask):
            best = min(best, float(np.min(orb.dists[mask])))
    if not math.isfinite(best):
        raise UndefinedEstimateError("no non-identity element was enumerated")
    if best < _TORSION_TOL:
        warnings.warn(f"spec {spec.name!r} has an element fixing a sample point",
                      TorsionWarning, stacklevel=2)
    return best


def dirichlet_membership(z: BallPoint, w: BallPoint, orbit: Orbit) -> bool:
    """Whether ``w`` is strictly closer to ``z`` than every other explored orbit point."""
    if orbit.center != z or orbit.base != w:
        raise ValueError("orbit was enumerated for a different (center, base) pair")
    idx = orbit.identity_index
    d0 = orbit.dists[idx]
    others = np.delete(orbit.dists, idx)
    return bool(np.all(others > d0 + _TIE_TOL))


def word_to_str(word: tuple) -> str:
    if not word:
        return "e"
    return " ".join(str(c) for c in word)


def word_from_str(text: str) -> tuple:
    text = text.strip()
    if text in ("", "e"):
        return ()
    return tuple(int(tok) for tok in text.split())

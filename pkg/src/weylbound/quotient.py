"""Points of the glued bundle (K x boundary)/~ and their equivalence.

A quotient point is a rotation together with a chamber point (interior or
ideal). Two pairs (k, x) and (k', x') name the same point when x = x' and
k' = k s for a stabilizer element s of the maximal face of x: exactly the
rotations that are block-diagonal for the face partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chamber import ChamberPoint, Interior, maxface, points_equal
from .errors import DimensionMismatchError, IdealPointError, NotOrthogonalError
from .liecore import (
    DEFAULT_TOL,
    Rotation,
    SpdPoint,
    in_stab,
    realize_point,
)


@dataclass(frozen=True, eq=False)
class QuotientPoint:
    k: Rotation
    x: ChamberPoint

    def __post_init__(self):
        if self.k.n != self.x.n:
            raise DimensionMismatchError(
                f"rotation is {self.k.n}x{self.k.n} but the chamber point "
                f"lives in dimension {self.x.n}")

    @property
    def n(self) -> int:
        return self.k.n

    @property
    def variant(self) -> str:
        return self.x.variant

    @property
    def is_interior(self) -> bool:
        return isinstance(self.x, Interior)


def equivalent(p: QuotientPoint, q: QuotientPoint, tol: float = DEFAULT_TOL,
               literal: bool = False) -> bool:
    """Same point of the quotient: equal chamber data, K-parts differing by
    a stabilizer element of the maximal face."""
    if p.n != q.n:
        raise DimensionMismatchError("points have different dimensions")
    if not points_equal(p.x, q.x, tol):
        return False
    rel = p.k.transpose() @ q.k
    return in_stab(rel, maxface(p.x, tol, literal), tol)


def realize(p: QuotientPoint) -> SpdPoint:
    """The symmetric matrix an interior quotient point names."""
    if not isinstance(p.x, Interior):
        raise IdealPointError(f"cannot realize a {p.variant} ideal point")
    return realize_point(p.k, p.x.h)


def k_act(g: Rotation, p: QuotientPoint) -> QuotientPoint:
    """Left action of a rotation on the bundle: (k, x) -> (g k, x)."""
    return QuotientPoint(g @ p.k, p.x)


def spd_act(g: np.ndarray, p: SpdPoint, tol: float = DEFAULT_TOL) -> SpdPoint:
    """Congruence action x -> g x g^T of a unimodular matrix on the space."""
    g = np.asarray(g, dtype=float)
    if g.shape != (p.n, p.n):
        raise DimensionMismatchError(f"expected a {p.n}x{p.n} matrix")
    det = float(np.linalg.det(g))
    if abs(abs(det) - 1.0) > max(tol, 1e-9) * p.n:
        raise NotOrthogonalError(f"action matrix must have |det| = 1, got {det!r}")
    return SpdPoint(g @ p.mat @ g.T, tol=max(tol, 1e-9))

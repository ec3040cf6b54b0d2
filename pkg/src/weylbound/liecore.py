"""Points of SL(n,R)/SO(n), Weyl chamber vectors, faces and their stabilizers.

A point of X = SL(n,R)/SO(n) is a symmetric positive-definite matrix P = g g^T
of determinant one. The closed Weyl chamber is the set of trace-zero vectors in
weakly decreasing order; simple roots are the consecutive differences
alpha_i(H) = h_i - h_{i+1} for i = 1..n-1 (1-based indices everywhere in the
public API). A face index I is the set of simple roots that vanish; it glues
consecutive coordinates into the blocks of a partition of {1..n}, and Stab(I)
is the group of block-diagonal special orthogonal matrices for that partition,
i.e. the rotations fixing every diagonal exp(2H) with H in the face.

Cartan decomposition P = k exp(2H) k^T and the generalized radius r(x,y) =
(1/2) log eig(S^-1 y S^-1) (S the SPD square root of x, eigenvalues in weakly
decreasing order) are computed with numpy's symmetric eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DetNotOneError,
    DimensionMismatchError,
    FaceIndexError,
    NotChamberError,
    NotOrthogonalError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

DEFAULT_TOL = 1e-8


def _as_float_array(values, shape_kind: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if shape_kind == "vector" and arr.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {arr.shape}")
    if shape_kind == "matrix" and (arr.ndim != 2 or arr.shape[0] != arr.shape[1]):
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError("entries must be finite")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class FaceIndex:
    """Subset of the simple root index set {1..n-1}; empty and full are valid."""

    roots: tuple[int, ...]

    def __init__(self, roots: Iterable[int] = ()):
        items = sorted({int(i) for i in roots})
        if items and items[0] < 1:
            raise FaceIndexError(f"root indices must be >= 1, got {items}")
        object.__setattr__(self, "roots", tuple(items))

    @classmethod
    def empty(cls) -> "FaceIndex":
        return cls(())

    @classmethod
    def full(cls, n: int) -> "FaceIndex":
        return cls(range(1, n))

    def validate_for(self, n: int) -> "FaceIndex":
        if self.roots and self.roots[-1] > n - 1:
            raise FaceIndexError(f"face {self.roots} out of range for n={n}")
        return self

    def __contains__(self, i: int) -> bool:
        return i in self.roots

    def __iter__(self):
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __eq__(self, other) -> bool:
        return isinstance(other, FaceIndex) and self.roots == other.roots

    def __hash__(self) -> int:
        return hash(self.roots)

    def __le__(self, other: "FaceIndex") -> bool:
        return set(self.roots) <= set(other.roots)

    def issubset(self, other: "FaceIndex") -> bool:
        return self <= other

    def union(self, other: "FaceIndex") -> "FaceIndex":
        return FaceIndex(self.roots + other.roots)

    def is_full(self, n: int) -> bool:
        return len(self.roots) == n - 1

    def __repr__(self) -> str:
        return f"FaceIndex({set(self.roots) if self.roots else '{}'})"


@dataclass(frozen=True, eq=False)
class Partition:
    """Consecutive blocks of {1..n} (1-based), as produced by face_partition."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.blocks[-1][-1]

    def __repr__(self) -> str:
        return "Partition(" + "|".join(
            ",".join(str(i) for i in b) for b in self.blocks) + ")"


@dataclass(frozen=True, eq=False)
class ChamberVector:
    """Trace-zero vector with weakly decreasing entries (log eigenvalue units)."""

    h: np.ndarray

    def __init__(self, h, tol: float = DEFAULT_TOL):
        arr = _as_float_array(h, "vector")
        if arr.size < 2:
            raise DimensionMismatchError("chamber vectors need n >= 2")
        scale = 1.0 + float(np.abs(arr).sum())
        if abs(float(arr.sum())) > tol * scale:
            raise NotChamberError(f"entries must sum to zero, got {float(arr.sum())!r}")
        diffs = arr[:-1] - arr[1:]
        if np.any(diffs < -tol * scale):
            raise NotChamberError(f"entries must be weakly decreasing, got {arr!r}")
        object.__setattr__(self, "h", _freeze(arr))

    @property
    def n(self) -> int:
        return self.h.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.h))

    def __repr__(self) -> str:
        return f"ChamberVector({np.array2string(self.h, precision=6)})"


@dataclass(frozen=True, eq=False)
class SpdPoint:
    """Point of X: symmetric positive-definite matrix with determinant one.

    The determinant check runs in the log domain (sum of log eigenvalues) so
    that well-conditioned validation survives large radii.
    """

    mat: np.ndarray

    def __init__(self, mat, tol: float = DEFAULT_TOL):
        arr = _as_float_array(mat, "matrix")
        if arr.shape[0] < 2:
            raise DimensionMismatchError("points need n >= 2")
        scale = 1.0 + float(np.linalg.norm(arr))
        if np.linalg.norm(arr - arr.T) > tol * scale:
            raise NotSymmetricError("matrix is not symmetric")
        arr = 0.5 * (arr + arr.T)
        eigs = np.linalg.eigvalsh(arr)
        if eigs[0] <= 0:
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite (min eigenvalue {float(eigs[0])!r})")
        logs = np.log(eigs)
        # eigenvalues carry absolute error ~ eps * lambda_max, so the log-det
        # cannot be certified beyond eps * kappa; widen the bound accordingly
        n = arr.shape[0]
        slack = 8.0 * n * np.finfo(float).eps * float(eigs[-1] / eigs[0])
        if abs(float(logs.sum())) > tol * n * (1.0 + float(np.abs(logs).max())) + slack:
            raise DetNotOneError(f"log det = {float(logs.sum())!r}, expected 0")
        object.__setattr__(self, "mat", _freeze(arr))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def __repr__(self) -> str:
        return f"SpdPoint(n={self.n})"


@dataclass(frozen=True, eq=False)
class Rotation:
    """Element of SO(n)."""

    mat: np.ndarray

    def __init__(self, mat, tol: float = DEFAULT_TOL):
        arr = _as_float_array(mat, "matrix")
        n = arr.shape[0]
        if n < 2:
            raise DimensionMismatchError("rotations need n >= 2")
        if np.linalg.norm(arr.T @ arr - np.eye(n)) > tol * n:
            raise NotOrthogonalError("matrix is not orthogonal")
        if np.linalg.det(arr) < 0:
            raise NotOrthogonalError("determinant is negative, not in SO(n)")
        object.__setattr__(self, "mat", _freeze(arr))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, n: int) -> "Rotation":
        return cls(np.eye(n))

    def transpose(self) -> "Rotation":
        return Rotation(self.mat.T)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        if self.n != other.n:
            raise DimensionMismatchError("rotation dimensions differ")
        return Rotation(self.mat @ other.mat)

    def __repr__(self) -> str:
        return f"Rotation(n={self.n})"


def origin(n: int) -> SpdPoint:
    """Base point o = identity coset."""
    return SpdPoint(np.eye(n))


def root_values(H: ChamberVector) -> np.ndarray:
    """Simple root values (alpha_1(H), ..., alpha_{n-1}(H)), all >= 0."""
    return H.h[:-1] - H.h[1:]


def root_values_of(h: np.ndarray) -> np.ndarray:
    """Root values of a raw vector (no chamber membership assumed)."""
    h = np.asarray(h, dtype=float)
    return h[..., :-1] - h[..., 1:]


def root_matrix(n: int) -> np.ndarray:
    """(n-1) x n matrix whose rows are the simple root gradients e_i - e_{i+1}."""
    A = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    A[idx, idx] = 1.0
    A[idx, idx + 1] = -1.0
    return A


def vector_from_root_values(values, n: int) -> np.ndarray:
    """The unique trace-zero vector with the given n-1 simple root values."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != n - 1:
        raise DimensionMismatchError(
            f"expected {n - 1} root values, got {values.shape[-1]}")
    return values @ np.linalg.pinv(root_matrix(n)).T


def face_of(H: ChamberVector, tol: float = DEFAULT_TOL) -> FaceIndex:
    """Indices of the simple roots vanishing on H, relative tolerance."""
    vals = root_values(H)
    bound = tol * (1.0 + H.norm())
    return FaceIndex(i + 1 for i in range(vals.size) if vals[i] <= bound)


def face_partition(I: FaceIndex, n: int) -> Partition:
    """Blocks of {1..n} glued by the roots in I (root i glues i and i+1)."""
    I.validate_for(n)
    blocks: list[list[int]] = [[1]]
    for j in range(2, n + 1):
        if (j - 1) in I:
            blocks[-1].append(j)
        else:
            blocks.append([j])
    return Partition(tuple(tuple(b) for b in blocks))


def _cut_positions(q: np.ndarray, tol: float) -> list[bool]:
    # cut at i (1-based, between coords i and i+1) iff q vanishes across it
    n = q.shape[0]
    cuts = []
    for i in range(1, n):
        off = max(float(np.abs(q[:i, i:]).max()), float(np.abs(q[i:, :i]).max()))
        cuts.append(off <= tol)
    return cuts


def in_stab(k: Rotation, I: FaceIndex, tol: float = DEFAULT_TOL) -> bool:
    """Whether k is block-diagonal for the partition of I, i.e. fixes the face pointwise."""
    I.validate_for(k.n)
    cuts = _cut_positions(k.mat, tol)
    return all(cuts[i - 1] for i in range(1, k.n) if i not in I)


def minimal_face(q: Rotation, tol: float = DEFAULT_TOL) -> FaceIndex:
    """Smallest I with q in Stab(I), from the finest block structure of q."""
    cuts = _cut_positions(q.mat, tol)
    return FaceIndex(i for i in range(1, q.n) if not cuts[i - 1])


def _eig_descending(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh(mat)
    return lam[::-1], vec[:, ::-1]


def _canonical_sign_fix(vec: np.ndarray) -> np.ndarray:
    """Deterministic eigenvector signs: largest-magnitude entry positive, then
    determinant +1 restored by flipping the smallest-eigenvalue column."""
    vec = vec.copy()
    for j in range(vec.shape[1]):
        col = vec[:, j]
        lead = col[np.argmax(np.abs(col))]
        if lead < 0:
            vec[:, j] = -col
    if np.linalg.det(vec) < 0:
        vec[:, -1] = -vec[:, -1]
    return vec


def cartan_decompose(P: SpdPoint, tol: float = DEFAULT_TOL) -> tuple[Rotation, ChamberVector]:
    """Factor P = k exp(2H) k^T with H in the closed chamber.

    Under eigenvalue ties k is well defined only modulo Stab of the face of H;
    the sign convention above picks one representative deterministically.
    """
    lam, vec = _eig_descending(P.mat)
    if lam[-1] <= 0:
        raise NotPositiveDefiniteError("eigenvalues must be positive")
    H = ChamberVector(_project_chamber(0.5 * np.log(lam)), tol=1e-6)
    k = Rotation(_canonical_sign_fix(vec), tol=1e-6)
    recon = k.mat @ (np.exp(2.0 * H.h)[:, None] * k.mat.T)
    err = np.linalg.norm(recon - P.mat)
    # normalizing H to exact zero sum shifts the reconstruction by the log-det
    # rounding error, which grows like eps * kappa; keep the bound honest
    kappa = float(lam[0] / lam[-1])
    scale = 1.0 + float(np.linalg.norm(P.mat))
    if err > (tol + 4.0 * P.n * np.finfo(float).eps * kappa) * scale:
        raise NotPositiveDefiniteError(
            f"eigendecomposition failed to reconstruct (error {float(err)!r})")
    return k, H


def _project_chamber(h: np.ndarray) -> np.ndarray:
    # kill float junk: exact zero sum, exact weak ordering
    h = h - h.mean()
    diffs = h[:-1] - h[1:]
    tiny = diffs < 0
    if np.any(tiny):
        # only rounding-level inversions are expected here
        order = np.sort(h)[::-1]
        h = order - order.mean()
    return h


def realize_point(k: Rotation, H: ChamberVector) -> SpdPoint:
    """The point k exp(2H) k^T."""
    if k.n != H.n:
        raise DimensionMismatchError("rotation and chamber vector dimensions differ")
    return SpdPoint(k.mat @ (np.exp(2.0 * H.h)[:, None] * k.mat.T))


def inv_sqrt(x: SpdPoint) -> np.ndarray:
    """Inverse of the SPD square root of x."""
    lam, vec = np.linalg.eigh(x.mat)
    if lam[0] <= 0:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return vec @ ((1.0 / np.sqrt(lam))[:, None] * vec.T)


def radius_from_inv_sqrt(Si: np.ndarray, y: SpdPoint) -> ChamberVector:
    M = Si @ y.mat @ Si
    lam = np.linalg.eigvalsh(0.5 * (M + M.T))
    if lam[0] <= 0:
        raise NotPositiveDefiniteError("radius eigenvalues must be positive")
    return ChamberVector(_project_chamber(0.5 * np.log(lam[::-1])), tol=1e-6)


def generalized_radius(x: SpdPoint, y: SpdPoint) -> ChamberVector:
    """r(x,y) = (1/2) log of the weakly decreasing eigenvalues of S^-1 y S^-1.

    Invariant under the G-action P -> g P g^T and zero iff x = y.
    """
    if x.n != y.n:
        raise DimensionMismatchError("points have different dimensions")
    return radius_from_inv_sqrt(inv_sqrt(x), y)


def distance(x: SpdPoint, y: SpdPoint) -> float:
    """Euclidean norm of the generalized radius (Killing constant dropped)."""
    return generalized_radius(x, y).norm()

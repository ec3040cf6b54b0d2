"""Random and structured generators for chamber data, rotations and sequences.

Everything takes an explicit numpy Generator; nothing reads global state.
Matrix-valued sequences keep eigenvalue spreads small enough for float64
round trips, so scales here are deliberately modest.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .chamber import (
    DualCellIdeal,
    Interior,
    IterLevel,
    IteratedIdeal,
    MartinIdeal,
    VisualIdeal,
    ChamberPoint,
    finite_part_from,
)
from .errors import FaceIndexError, ModelMismatchError
from .liecore import (
    ChamberVector,
    FaceIndex,
    Rotation,
    SpdPoint,
    face_partition,
    realize_point,
    root_values_of,
    vector_from_root_values,
)


def random_rotation(n: int, rng: np.random.Generator) -> Rotation:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))  # make the factorization unique
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Rotation(q)


def givens_rotation(n: int, i: int, j: int, theta: float) -> Rotation:
    """Rotation in the (i, j) coordinate plane, positions 1-based."""
    if not (1 <= i < j <= n):
        raise FaceIndexError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    q = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    q[i - 1, i - 1] = c
    q[j - 1, j - 1] = c
    q[i - 1, j - 1] = -s
    q[j - 1, i - 1] = s
    return Rotation(q)


def random_stab_element(face: FaceIndex, n: int, rng: np.random.Generator) -> Rotation:
    """Block-diagonal element of the face stabilizer, total determinant one.

    Individual blocks may have determinant -1 as long as the product is +1.
    """
    blocks = face_partition(face, n).blocks
    q = np.zeros((n, n))
    for blk in blocks:
        idx = [b - 1 for b in blk]
        m = len(idx)
        if m == 1:
            q[idx[0], idx[0]] = rng.choice([-1.0, 1.0])
        else:
            b, r = np.linalg.qr(rng.standard_normal((m, m)))
            b = b * np.sign(np.diag(r))
            if rng.random() < 0.5:
                b[:, 0] = -b[:, 0]
            q[np.ix_(idx, idx)] = b
    if np.linalg.det(q) < 0:
        blk = max(blocks, key=len)
        col = blk[0] - 1
        q[:, col] = -q[:, col]
    return Rotation(q)


def random_chamber_vector(n: int, rng: np.random.Generator,
                          face: FaceIndex | None = None,
                          scale: float = 1.0, floor: float = 0.3) -> ChamberVector:
    """Chamber vector with exact zeros on the face roots, others >= floor."""
    face = FaceIndex.empty() if face is None else face
    face.validate_for(n)
    vals = rng.uniform(floor, 1.0, size=n - 1) * scale
    for i in face:
        vals[i - 1] = 0.0
    return ChamberVector(vector_from_root_values(vals, n))


def random_unit_direction(n: int, rng: np.random.Generator,
                          face: FaceIndex | None = None) -> ChamberVector:
    if face is not None and face.is_full(n):
        raise FaceIndexError("unit directions need at least one positive root")
    h = random_chamber_vector(n, rng, face=face).h
    return ChamberVector(h / np.linalg.norm(h))


def random_finite_part(face: FaceIndex, n: int, rng: np.random.Generator,
                       lo: float = 0.15, hi: float = 0.45,
                       zero_chance: float = 0.0) -> np.ndarray:
    """Finite part orthogonal to the face kernel with root values in [lo, hi].

    With zero_chance, individual root values are zeroed, which moves the
    refined maximal face around.
    """
    vals = rng.uniform(lo, hi, size=len(face))
    if zero_chance > 0.0:
        vals[rng.random(len(face)) < zero_chance] = 0.0
    return finite_part_from(face, vals, n)


def random_spd(n: int, rng: np.random.Generator, scale: float = 1.0) -> SpdPoint:
    k = random_rotation(n, rng)
    h = random_chamber_vector(n, rng, scale=scale, floor=0.1)
    return realize_point(k, h)


def spd_sequence(k: Rotation, hs: Sequence[ChamberVector]) -> list[SpdPoint]:
    return [realize_point(k, h) for h in hs]


def probes(n: int, rng: np.random.Generator, count: int,
           radius: float = 1.5) -> list[SpdPoint]:
    """Base points scattered in a ball around the origin coset."""
    out = []
    for _ in range(count):
        k = random_rotation(n, rng)
        h = random_chamber_vector(n, rng, scale=radius * rng.uniform(0.2, 1.0),
                                  floor=0.05)
        hn = h.h * (radius * rng.uniform(0.1, 1.0) / max(h.norm(), 1e-12))
        out.append(realize_point(k, ChamberVector(hn)))
    return out


def profile_sequence(n: int, ms: Sequence[float],
                     slopes: Sequence[float],
                     sqrts: Sequence[float] | None = None,
                     consts: Sequence[float] | None = None,
                     decay: Sequence[float] | None = None,
                     tau: float = 40.0) -> list[ChamberVector]:
    """Chamber sequence with root values slope*m + sqrt*sqrt(m) + const
    plus an exponentially decaying term. Shifts m so every term is valid."""
    ms = np.asarray(ms, dtype=float)
    slopes = np.asarray(slopes, dtype=float)
    zeros = np.zeros(n - 1)
    sqrts = zeros if sqrts is None else np.asarray(sqrts, dtype=float)
    consts = zeros if consts is None else np.asarray(consts, dtype=float)
    decay = zeros if decay is None else np.asarray(decay, dtype=float)
    for arr in (slopes, sqrts, consts, decay):
        if arr.size != n - 1:
            raise ModelMismatchError(f"profiles need {n - 1} root coefficients")
    shift = 0.0
    grid = np.concatenate([ms, [ms.min(), ms.max()]])
    for _ in range(64):
        vals = (np.outer(grid + shift, slopes)
                + np.outer(np.sqrt(np.maximum(grid + shift, 0.0)), sqrts)
                + consts + np.outer(np.exp(-(grid + shift) / tau), decay))
        worst = float(vals.min())
        if worst >= 0.0:
            break
        shift += max(1.0, -worst)
    out = []
    for m in ms + shift:
        v = (slopes * m + sqrts * np.sqrt(max(m, 0.0)) + consts
             + decay * np.exp(-m / tau))
        out.append(ChamberVector(vector_from_root_values(np.maximum(v, 0.0), n),
                                 tol=1e-6))
    return out


def chamber_ray(direction: ChamberVector, ms: Sequence[float],
                finite: np.ndarray | None = None) -> list[ChamberVector]:
    """Sequence m * L + a, with m shifted so every term stays in the chamber."""
    L = direction.h
    a = np.zeros(L.size) if finite is None else np.asarray(finite, dtype=float)
    rl, ra = root_values_of(L), root_values_of(a)
    shift = 0.0
    for j in range(L.size - 1):
        if rl[j] > 1e-12 and ra[j] < 0.0:
            shift = max(shift, -ra[j] / rl[j] + 1.0)
    return [ChamberVector((m + shift) * L + a, tol=1e-6) for m in ms]


def _decaying_wobble(n: int, ms: np.ndarray, rng: np.random.Generator,
                     size: float, tau: float = 40.0) -> np.ndarray:
    # nonnegative root-space jitter keeps terms inside the chamber
    r = rng.uniform(0.0, 1.0, size=n - 1) * size
    return np.outer(np.exp(-ms / tau), r)


def approach_sequence(point: ChamberPoint, ms: Sequence[float],
                      rng: np.random.Generator,
                      wobble: float = 0.5) -> list[ChamberVector]:
    """Chamber sequence converging to the given boundary point in its model.

    Divergent roots get random slopes, bounded roots decay onto their limits,
    so the sequence is a generic representative rather than a straight ray.
    """
    ms = np.asarray(ms, dtype=float)
    n = point.n
    if isinstance(point, Interior):
        base = np.tile(root_values_of(point.h.h), (ms.size, 1))
        vals = base + _decaying_wobble(n, ms, rng, wobble)
        return [ChamberVector(vector_from_root_values(v, n), tol=1e-6) for v in vals]
    if isinstance(point, VisualIdeal):
        slopes = root_values_of(point.direction.h)
        return profile_sequence(n, ms, slopes,
                                decay=rng.uniform(0.0, wobble, n - 1))
    if isinstance(point, DualCellIdeal):
        slopes = np.zeros(n - 1)
        off = [j for j in range(1, n) if j not in point.face]
        for j in off:
            slopes[j - 1] = rng.uniform(0.5, 1.5)
        consts = root_values_of(point.finite_part)
        for j in off:
            consts[j - 1] = 0.0  # divergent roots carry no meaningful offset
        return profile_sequence(n, ms, slopes, consts=consts,
                                decay=rng.uniform(0.0, wobble, n - 1))
    if isinstance(point, MartinIdeal):
        slopes = root_values_of(point.direction.h) * rng.uniform(0.8, 1.2)
        consts = root_values_of(point.finite_part)
        return profile_sequence(n, ms, slopes, consts=consts,
                                decay=rng.uniform(0.0, wobble, n - 1))
    if isinstance(point, IteratedIdeal):
        if len(point.levels) != 1:
            raise ModelMismatchError(
                "approach sequences are only generated for single-level points")
        lv = point.levels[0]
        finite = point.final_part
        return chamber_ray(ChamberVector(lv.direction, tol=1e-6), ms, finite)
    raise ModelMismatchError(f"not a chamber point: {point!r}")


def random_boundary_point(model: str, n: int, rng: np.random.Generator,
                          face: FaceIndex | None = None) -> ChamberPoint:
    """Random ideal point of the requested model, optionally on a given face."""
    if face is None:
        proper = [FaceIndex(c) for c in _proper_subsets(n)]
        face = proper[rng.integers(len(proper))]
    if model == "visual":
        return VisualIdeal(random_unit_direction(n, rng, face=face))
    if model == "dualcell":
        return DualCellIdeal(face, random_finite_part(face, n, rng,
                                                      zero_chance=0.3))
    if model == "martin":
        a = random_finite_part(face, n, rng, zero_chance=0.3)
        L = random_unit_direction(n, rng, face=face)
        return MartinIdeal(face, a, L)
    if model == "iterated":
        L = random_unit_direction(n, rng, face=face)
        a = random_finite_part(face, n, rng, zero_chance=0.3)
        finite = a - (a @ L.h) * L.h
        lev = IterLevel(face, finite_part_from(
            face, [root_values_of(finite)[i - 1] for i in face], n), L.h)
        return IteratedIdeal([lev], finite)
    raise ModelMismatchError(f"unknown model {model!r}")


def _proper_subsets(n: int) -> list[tuple[int, ...]]:
    full = list(range(1, n))
    out: list[tuple[int, ...]] = []
    for mask in range(1 << len(full)):
        sub = tuple(full[j] for j in range(len(full)) if mask >> j & 1)
        if len(sub) < len(full):
            out.append(sub)
    return out


def all_faces(n: int) -> list[FaceIndex]:
    """Every subset of the simple roots, the full set included."""
    full = list(range(1, n))
    return [FaceIndex(tuple(full[j] for j in range(len(full)) if mask >> j & 1))
            for mask in range(1 << len(full))]


SequenceBuilder = Callable[[np.ndarray], list[ChamberVector]]

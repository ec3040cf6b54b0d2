"""Boundary models for the closed Weyl chamber and finite-window classifiers.

Four models of chamber limits coexist:

- Interior(h): an ordinary chamber point.
- VisualIdeal(L): a unit direction, the limit of H_m / ||H_m||.
- DualCellIdeal(I, a): the roots in I stay bounded with limit vector a (the
  unique vector orthogonal to the face kernel realizing those limits), all
  others diverge.
- MartinIdeal(I, a, L): dual-cell data refined by the visual direction, which
  must lie in the closure of the face (alpha_i(L) = 0 for i in I).
- IteratedIdeal(levels, final): repeatedly peel the leading direction off and
  reclassify the orthogonal residual until it settles; levels carry
  (face, finite part, direction) triples with pairwise orthogonal directions.
  This is a defined iterative refinement, not a verified classical model.

Classification is honest about finite data: a scalar sequence is Cauchy when
the trailing-window oscillation is below cauchy_tol * (1 + |last|), diverges
when the trailing window clears divergence_threshold with an increasing
windowed extremum, and is otherwise inconclusive. Limits are estimated by
trailing-window means.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .config import Config
from .errors import (
    DimensionMismatchError,
    FaceIndexError,
    MaxDepthExceededError,
    ModelMismatchError,
    NotChamberError,
    TooShortError,
)
from .liecore import (
    DEFAULT_TOL,
    ChamberVector,
    FaceIndex,
    face_of,
    root_matrix,
    root_values_of,
    vector_from_root_values,
)

CONVERGED = "converged"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"


def finite_part_from(face: FaceIndex, values, n: int) -> np.ndarray:
    """Minimum-norm trace-zero vector with alpha_i = values[i] for i in face.

    The result lies in the span of the face's root gradients, i.e. orthogonal
    to the face kernel, where the root map is an isomorphism.
    """
    face.validate_for(n)
    values = np.asarray(values, dtype=float)
    if values.size != len(face):
        raise DimensionMismatchError(
            f"expected {len(face)} root values for face {face!r}")
    if not len(face):
        return np.zeros(n)
    rows = root_matrix(n)[[i - 1 for i in face], :]
    return np.linalg.pinv(rows) @ values


def _face_kernel_basis(face: FaceIndex, n: int) -> np.ndarray:
    """Orthonormal basis of {h : sum h = 0, alpha_i(h) = 0 for i in face}."""
    rows = [np.ones(n)]
    rows.extend(root_matrix(n)[i - 1] for i in face)
    _, _, vt = np.linalg.svd(np.asarray(rows))
    return vt[len(rows):]


@dataclass(frozen=True, eq=False)
class Interior:
    h: ChamberVector

    @property
    def variant(self) -> str:
        return "interior"

    @property
    def n(self) -> int:
        return self.h.n


@dataclass(frozen=True, eq=False)
class VisualIdeal:
    direction: ChamberVector

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > 1e-6:
            raise NotChamberError("visual directions must be unit vectors")

    @property
    def variant(self) -> str:
        return "visual"

    @property
    def n(self) -> int:
        return self.direction.n


def _validate_finite_part(face: FaceIndex, a: np.ndarray, n: int, tol: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.size != n:
        raise DimensionMismatchError(f"finite part must have length {n}")
    scale = 1.0 + float(np.abs(a).sum())
    if abs(float(a.sum())) > tol * scale:
        raise NotChamberError("finite part must be trace-zero")
    vals = root_values_of(a)
    for i in face:
        if vals[i - 1] < -tol * scale:
            raise NotChamberError(
                f"finite part has negative root value at {i}: {vals[i - 1]!r}")
    kernel = _face_kernel_basis(face, n)
    if kernel.size and float(np.abs(kernel @ a).max()) > tol * scale:
        raise NotChamberError("finite part must be orthogonal to the face kernel")
    out = a.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class DualCellIdeal:
    face: FaceIndex
    finite_part: np.ndarray

    def __init__(self, face: FaceIndex, finite_part, n: int | None = None,
                 tol: float = DEFAULT_TOL):
        a = np.asarray(finite_part, dtype=float)
        n = a.size if n is None else n
        face.validate_for(n)
        if face.is_full(n):
            raise FaceIndexError("dual-cell face must be a proper subset")
        object.__setattr__(self, "face", face)
        object.__setattr__(self, "finite_part", _validate_finite_part(face, a, n, tol))

    @property
    def variant(self) -> str:
        return "dualcell"

    @property
    def n(self) -> int:
        return self.finite_part.size


@dataclass(frozen=True, eq=False)
class MartinIdeal:
    face: FaceIndex
    finite_part: np.ndarray
    direction: ChamberVector

    def __init__(self, face: FaceIndex, finite_part, direction: ChamberVector,
                 tol: float = DEFAULT_TOL):
        n = direction.n
        face.validate_for(n)
        if face.is_full(n):
            raise FaceIndexError("martin face must be a proper subset")
        if abs(direction.norm() - 1.0) > 1e-6:
            raise NotChamberError("martin directions must be unit vectors")
        dvals = root_values_of(direction.h)
        for i in face:
            if abs(dvals[i - 1]) > 2.0 * tol:
                raise NotChamberError(
                    f"direction must lie in the face closure (alpha_{i} != 0)")
        object.__setattr__(self, "face", face)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "finite_part",
                           _validate_finite_part(face, np.asarray(finite_part, float), n, tol))

    @property
    def variant(self) -> str:
        return "martin"

    @property
    def n(self) -> int:
        return self.direction.n


@dataclass(frozen=True, eq=False)
class IterLevel:
    """One stage of the iterated refinement: the Cauchy roots of the residual,
    their limit vector and the residual's unit direction."""

    face: FaceIndex
    finite_part: np.ndarray
    direction: np.ndarray

    def __init__(self, face: FaceIndex, finite_part, direction):
        d = np.asarray(direction, dtype=float)
        if abs(float(np.linalg.norm(d)) - 1.0) > 1e-6:
            raise NotChamberError("iterated level directions must be unit vectors")
        a = np.asarray(finite_part, dtype=float).copy()
        a.flags.writeable = False
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "face", face)
        object.__setattr__(self, "finite_part", a)
        object.__setattr__(self, "direction", d)

    @property
    def n(self) -> int:
        return self.direction.size


@dataclass(frozen=True, eq=False)
class IteratedIdeal:
    levels: tuple[IterLevel, ...]
    final_part: np.ndarray

    def __init__(self, levels: Sequence[IterLevel], final_part):
        levels = tuple(levels)
        if not levels:
            raise NotChamberError("iterated points need at least one level")
        dirs = np.stack([lv.direction for lv in levels])
        gram = dirs @ dirs.T - np.eye(len(levels))
        if float(np.abs(gram).max()) > 1e-6:
            raise NotChamberError("level directions must be orthonormal")
        f = np.asarray(final_part, dtype=float).copy()
        f.flags.writeable = False
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "final_part", f)

    @property
    def variant(self) -> str:
        return "iterated"

    @property
    def n(self) -> int:
        return self.levels[0].n


ChamberPoint = Union[Interior, VisualIdeal, DualCellIdeal, MartinIdeal, IteratedIdeal]


@dataclass(frozen=True)
class Trend:
    kind: str  # "cauchy" | "diverges" | "oscillates"
    limit: float | None = None
    sign: int | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "limit": self.limit, "sign": self.sign}


@dataclass(frozen=True)
class RootDiag:
    root: int
    trend: Trend

    def to_json(self) -> dict:
        return {"root": self.root, **self.trend.to_json()}


@dataclass(frozen=True, eq=False)
class Verdict:
    outcome: str
    point: ChamberPoint | None
    diagnostics: tuple[RootDiag, ...]
    norm_trend: Trend
    note: str = ""

    @property
    def converged(self) -> bool:
        return self.outcome == CONVERGED


def scalar_trend(values: np.ndarray, cfg: Config) -> Trend:
    """Trailing-window trend of a real sequence; divergence needs two windows."""
    values = np.asarray(values, dtype=float)
    w = cfg.window
    if values.size < w:
        raise TooShortError(f"need at least {w} samples, got {values.size}")
    tail = values[-w:]
    osc = float(tail.max() - tail.min())
    if osc <= cfg.cauchy_tol * (1.0 + abs(float(values[-1]))):
        return Trend("cauchy", limit=float(tail.mean()))
    if values.size >= 2 * w:
        prev = values[-2 * w:-w]
        if tail.min() > cfg.divergence_threshold and tail.min() > prev.min():
            return Trend("diverges", sign=1)
        if tail.max() < -cfg.divergence_threshold and tail.max() < prev.max():
            return Trend("diverges", sign=-1)
    return Trend("oscillates")


def _vector_tail(vecs: np.ndarray, cfg: Config) -> tuple[bool, np.ndarray]:
    w = cfg.window
    if vecs.shape[0] < w:
        raise TooShortError(f"need at least {w} samples, got {vecs.shape[0]}")
    tail = vecs[-w:]
    osc = float(np.linalg.norm(tail - vecs[-1], axis=1).max())
    ok = osc <= cfg.cauchy_tol * (1.0 + float(np.linalg.norm(vecs[-1])))
    return ok, tail.mean(axis=0)


def _stack(seq: Sequence[ChamberVector]) -> np.ndarray:
    if not len(seq):
        raise TooShortError("empty sequence")
    n = seq[0].n
    for x in seq:
        if x.n != n:
            raise DimensionMismatchError("sequence mixes dimensions")
    return np.stack([x.h for x in seq])


def _root_diagnostics(H: np.ndarray, cfg: Config) -> tuple[RootDiag, ...]:
    rv = root_values_of(H)
    return tuple(RootDiag(j + 1, scalar_trend(rv[:, j], cfg))
                 for j in range(rv.shape[1]))


def classify_visual(seq: Sequence[ChamberVector], cfg: Config) -> Verdict:
    """Interior limit for bounded Cauchy sequences, unit direction otherwise."""
    H = _stack(seq)
    diags = _root_diagnostics(H, cfg)
    norms = np.linalg.norm(H, axis=1)
    nt = scalar_trend(norms, cfg)
    if nt.kind == "cauchy":
        ok, mean = _vector_tail(H, cfg)
        if ok:
            return Verdict(CONVERGED, Interior(ChamberVector(mean, tol=1e-6)), diags, nt)
        return Verdict(INCONCLUSIVE, None, diags, nt,
                       "norms settle but the vectors oscillate")
    if nt.kind == "diverges":
        tail = H[-2 * cfg.window:]
        tnorms = np.linalg.norm(tail, axis=1)
        dirs = tail / tnorms[:, None]
        ok, mean = _vector_tail(dirs, cfg)
        if ok:
            L = mean / np.linalg.norm(mean)
            return Verdict(CONVERGED, VisualIdeal(ChamberVector(L, tol=1e-6)), diags, nt)
        return Verdict(DIVERGED, None, diags, nt,
                       "norms diverge but the direction oscillates")
    return Verdict(INCONCLUSIVE, None, diags, nt, "norms neither settle nor diverge")


def classify_dualcell(seq: Sequence[ChamberVector], cfg: Config) -> Verdict:
    """Split roots into Cauchy and divergent; the Cauchy limits fix the cell."""
    H = _stack(seq)
    n = H.shape[1]
    diags = _root_diagnostics(H, cfg)
    norms = np.linalg.norm(H, axis=1)
    nt = scalar_trend(norms, cfg)
    bad = [d.root for d in diags if d.trend.kind == "oscillates"
           or (d.trend.kind == "diverges" and d.trend.sign == -1)]
    if bad:
        return Verdict(INCONCLUSIVE, None, diags, nt,
                       f"roots {bad} neither settle nor diverge")
    cauchy = [d for d in diags if d.trend.kind == "cauchy"]
    I = FaceIndex(d.root for d in cauchy)
    if I.is_full(n):
        ok, mean = _vector_tail(H, cfg)
        if ok:
            return Verdict(CONVERGED, Interior(ChamberVector(mean, tol=1e-6)), diags, nt)
        return Verdict(INCONCLUSIVE, None, diags, nt,
                       "all roots settle but the vectors oscillate")
    a = finite_part_from(I, [d.trend.limit for d in cauchy], n)
    a[np.abs(a) <= cfg.cauchy_tol * 1e-3] = 0.0  # exact zeros for exact-zero limits
    return Verdict(CONVERGED, DualCellIdeal(I, a, tol=1e-6), diags, nt)


def classify_martin(seq: Sequence[ChamberVector], cfg: Config) -> Verdict:
    """Dual-cell data plus the visual direction, which must respect the face."""
    dc = classify_dualcell(seq, cfg)
    if not dc.converged or isinstance(dc.point, Interior):
        return dc
    assert isinstance(dc.point, DualCellIdeal)
    H = _stack(seq)
    norms = np.linalg.norm(H, axis=1)
    nt = scalar_trend(norms, cfg)
    if nt.kind != "diverges":
        return Verdict(INCONCLUSIVE, None, dc.diagnostics, nt,
                       "divergent roots without certified norm divergence")
    # removing the settled finite part cancels its 1/m contamination of the
    # normalized tail, so short windows still see the clean direction
    tail = H[-2 * cfg.window:] - dc.point.finite_part
    tnorms = np.linalg.norm(tail, axis=1)
    if float(tnorms.min()) <= 0.0:
        return Verdict(INCONCLUSIVE, None, dc.diagnostics, nt,
                       "tail is dominated by the finite part")
    dirs = tail / tnorms[:, None]
    ok, mean = _vector_tail(dirs, cfg)
    if not ok:
        return Verdict(INCONCLUSIVE, None, dc.diagnostics, nt,
                       "dual-cell part converges but the direction oscillates")
    L = mean / np.linalg.norm(mean)
    rv = root_values_of(L).copy()
    drift = max((abs(rv[i - 1]) for i in dc.point.face), default=0.0)
    if drift > max(10.0 * cfg.cauchy_tol, 1e-6):
        return Verdict(INCONCLUSIVE, None, dc.diagnostics, nt,
                       "direction does not vanish on the bounded roots")
    # snap the face roots of the direction to zero so the point sits on the wall
    for i in dc.point.face:
        rv[i - 1] = 0.0
    L = vector_from_root_values(rv, L.size)
    L = L / np.linalg.norm(L)
    point = MartinIdeal(dc.point.face, dc.point.finite_part,
                        ChamberVector(L, tol=1e-6), tol=1e-6)
    return Verdict(CONVERGED, point, dc.diagnostics, nt)


def _increment_direction(R: np.ndarray, cfg: Config) -> np.ndarray | None:
    """Unit direction from trailing successive increments.

    Differencing removes settled components exactly, so peeling along this
    estimate leaves the residual's own growth visible instead of anchoring
    the residual to zero inside the observation window. When the sequence is
    long enough the window estimates at a quarter, half and full length are
    combined by geometric extrapolation, which cancels a power-law drift of
    the increment direction (the signature of a slower secondary growth rate).
    """
    diffs = R[1:] - R[:-1]
    w = cfg.window

    def window_dir(end: int) -> np.ndarray | None:
        blk = diffs[end - w:end]
        norms = np.linalg.norm(blk, axis=1)
        if norms.min() <= 1e-300:
            return None
        mean = (blk / norms[:, None]).mean(axis=0)
        nrm = float(np.linalg.norm(mean))
        return None if nrm == 0.0 else mean / nrm

    tail = diffs[-2 * w:]
    norms = np.linalg.norm(tail, axis=1)
    if norms.min() <= 1e-300:
        return None
    dirs = tail / norms[:, None]
    ok, _ = _vector_tail(dirs, cfg)
    if not ok:
        return None
    T = diffs.shape[0]
    d3 = window_dir(T)
    if d3 is None:
        return None
    if T // 4 < w:
        return d3
    d2, d1 = window_dir(T // 2), window_dir(T // 4)
    if d1 is None or d2 is None:
        return d3
    e1, e2 = d2 - d1, d3 - d2
    n1, n2 = float(np.linalg.norm(e1)), float(np.linalg.norm(e2))
    if n2 < 1e-9 or n1 <= n2:
        return d3
    rho = n2 / n1
    boost = rho / (1.0 - rho)
    if n2 * boost > 0.2:  # drift too slow to trust the extrapolation
        return d3
    out = d3 + boost * e2
    return out / np.linalg.norm(out)


def classify_iterated(seq: Sequence[ChamberVector], cfg: Config) -> Verdict:
    """Peel leading directions off until the orthogonal residual settles."""
    H = _stack(seq)
    n = H.shape[1]
    diags = _root_diagnostics(H, cfg)
    cap = cfg.max_depth if cfg.max_depth is not None else n
    levels: list[IterLevel] = []
    R = H
    norm_trend0 = scalar_trend(np.linalg.norm(H, axis=1), cfg)
    while True:
        norms = np.linalg.norm(R, axis=1)
        nt = scalar_trend(norms, cfg)
        if nt.kind == "cauchy":
            ok, mean = _vector_tail(R, cfg)
            if not ok:
                return Verdict(INCONCLUSIVE, None, diags, norm_trend0,
                               "residual norms settle but the vectors oscillate")
            if not levels:
                return Verdict(CONVERGED, Interior(ChamberVector(mean, tol=1e-6)),
                               diags, norm_trend0)
            return Verdict(CONVERGED, IteratedIdeal(levels, mean), diags, norm_trend0)
        if nt.kind != "diverges":
            return Verdict(INCONCLUSIVE, None, diags, norm_trend0,
                           f"residual at depth {len(levels)} neither settles nor diverges")
        if len(levels) >= cap:
            raise MaxDepthExceededError(
                f"iterated classification exceeded depth cap {cap}")
        rv = root_values_of(R)
        trends = [scalar_trend(rv[:, j], cfg) for j in range(rv.shape[1])]
        if any(t.kind == "oscillates" for t in trends):
            return Verdict(INCONCLUSIVE, None, diags, norm_trend0,
                           f"residual roots oscillate at depth {len(levels)}")
        I = FaceIndex(j + 1 for j, t in enumerate(trends) if t.kind == "cauchy")
        a = finite_part_from(I, [t.limit for t in trends if t.kind == "cauchy"], n)
        a[np.abs(a) <= cfg.cauchy_tol * 1e-3] = 0.0
        L = _increment_direction(R, cfg)
        if L is None:
            return Verdict(INCONCLUSIVE, None, diags, norm_trend0,
                           f"residual direction oscillates at depth {len(levels)}")
        for lv in levels:  # exact orthogonality against earlier directions
            L = L - (L @ lv.direction) * lv.direction
        L = L / np.linalg.norm(L)
        levels.append(IterLevel(I, a, L))
        R = R - np.outer(R @ L, L)


def maxface(p: ChamberPoint, tol: float = DEFAULT_TOL, literal: bool = False) -> FaceIndex:
    """Largest face J with a sequence inside C_J converging to p.

    For dual-cell and Martin data the refined rule keeps the face roots whose
    finite limit is zero; literal=True applies the two-case rule (all of I for
    a = 0, empty otherwise) instead.
    """
    if isinstance(p, Interior):
        return face_of(p.h, tol)
    if isinstance(p, VisualIdeal):
        return face_of(p.direction, tol)
    if isinstance(p, (DualCellIdeal, MartinIdeal)):
        return _maxface_cell(p.face, p.finite_part, tol, literal)
    if isinstance(p, IteratedIdeal):
        lv = p.levels[0]
        return _maxface_cell(lv.face, lv.finite_part, tol, literal)
    raise ModelMismatchError(f"not a chamber point: {p!r}")


def _maxface_cell(face: FaceIndex, a: np.ndarray, tol: float, literal: bool) -> FaceIndex:
    scale = 1.0 + float(np.abs(a).sum())
    if literal:
        return face if float(np.abs(a).max(initial=0.0)) <= tol * scale else FaceIndex.empty()
    vals = root_values_of(a)
    return FaceIndex(i for i in face if abs(vals[i - 1]) <= tol * scale)


def _close(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    return float(np.linalg.norm(np.asarray(u) - np.asarray(v))) <= tol * (
        1.0 + float(np.linalg.norm(v)))


def points_equal(p: ChamberPoint, q: ChamberPoint, tol: float = DEFAULT_TOL) -> bool:
    """Equality within tol; interior vs ideal is False, distinct ideal models raise."""
    if p.n != q.n:
        raise DimensionMismatchError("points have different dimensions")
    p_int, q_int = isinstance(p, Interior), isinstance(q, Interior)
    if p_int != q_int:
        return False
    if p.variant != q.variant:
        raise ModelMismatchError(
            f"cannot compare {p.variant} ideal with {q.variant} ideal")
    if isinstance(p, Interior):
        return _close(p.h.h, q.h.h, tol)
    if isinstance(p, VisualIdeal):
        return _close(p.direction.h, q.direction.h, tol)
    if isinstance(p, DualCellIdeal):
        return p.face == q.face and _close(p.finite_part, q.finite_part, tol)
    if isinstance(p, MartinIdeal):
        return (p.face == q.face
                and _close(p.finite_part, q.finite_part, tol)
                and _close(p.direction.h, q.direction.h, tol))
    if isinstance(p, IteratedIdeal):
        if len(p.levels) != len(q.levels):
            return False
        for a, b in zip(p.levels, q.levels):
            if a.face != b.face:
                return False
            if not (_close(a.finite_part, b.finite_part, tol)
                    and _close(a.direction, b.direction, tol)):
                return False
        return _close(p.final_part, q.final_part, tol)
    raise ModelMismatchError(f"not a chamber point: {p!r}")


CLASSIFIERS = {
    "visual": classify_visual,
    "dualcell": classify_dualcell,
    "martin": classify_martin,
    "iterated": classify_iterated,
}


def classify(seq: Sequence[ChamberVector], model: str, cfg: Config) -> Verdict:
    try:
        fn = CLASSIFIERS[model]
    except KeyError:
        raise ModelMismatchError(f"unknown model {model!r}") from None
    return fn(seq, cfg)

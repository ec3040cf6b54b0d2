"""Fundamental sequences: polar recovery, convergence filters, quotient limits.

A sequence of positive matrices is fundamental for a boundary model when some
polar-style decomposition P_m = k_m exp(2 H_m) k_m^T has Cauchy rotation part
and chamber part classified convergent by that model. The pair (limit of k_m,
limit of H_m) then names a point of the quotient bundle.

Eigenvector bases are only defined up to sign (and up to an orthogonal mix on
tied eigenvalues), so polar recovery aligns each term against the previous
one: singleton eigenvalues get a sign flip, tied clusters an orthogonal
Procrustes fit inside their eigenspace, and a leftover determinant flip lands
on the least-confident column. A sequence whose K-part genuinely alternates
between separated rotations is still detected through subsequence filters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chamber import Verdict, classify, CONVERGED
from .config import Config
from .errors import (
    DimensionMismatchError,
    MaxDepthExceededError,
    SequenceTermError,
    TooShortError,
)
from .liecore import (
    ChamberVector,
    Rotation,
    SpdPoint,
    _canonical_sign_fix,
    _eig_descending,
    _project_chamber,
)
from .quotient import QuotientPoint, equivalent


@dataclass(frozen=True, eq=False)
class FundamentalDecomposition:
    ks: tuple[Rotation, ...]
    hs: tuple[ChamberVector, ...]

    def __post_init__(self):
        if len(self.ks) != len(self.hs):
            raise DimensionMismatchError("rotation and chamber parts differ in length")
        if not self.ks:
            raise TooShortError("empty decomposition")
        n = self.ks[0].n
        for i, (k, h) in enumerate(zip(self.ks, self.hs)):
            if k.n != n or h.n != n:
                raise SequenceTermError(i, "dimension mismatch inside decomposition")

    def __len__(self) -> int:
        return len(self.ks)

    @property
    def n(self) -> int:
        return self.ks[0].n

    def subsample(self, indices: Sequence[int]) -> "FundamentalDecomposition":
        idx = list(indices)
        return FundamentalDecomposition(tuple(self.ks[i] for i in idx),
                                        tuple(self.hs[i] for i in idx))


def _cluster_slices(eigs: np.ndarray, rel_tol: float = 1e-6) -> list[slice]:
    """Consecutive runs of eigenvalues equal up to a relative gap."""
    n = eigs.size
    scale = float(np.abs(eigs).max()) + 1.0
    out, start = [], 0
    for i in range(1, n):
        if abs(eigs[i] - eigs[i - 1]) > rel_tol * scale:
            out.append(slice(start, i))
            start = i
    out.append(slice(start, n))
    return out


def _align_columns(vec: np.ndarray, prev: np.ndarray, eigs: np.ndarray) -> np.ndarray:
    """Rotate/flip eigenvector columns to track the previous basis."""
    out = vec.copy()
    for sl in _cluster_slices(eigs):
        if sl.stop - sl.start == 1:
            j = sl.start
            if float(out[:, j] @ prev[:, j]) < 0.0:
                out[:, j] = -out[:, j]
        else:
            # best orthogonal map of the tied блок onto the previous columns
            u, _, wt = np.linalg.svd(out[:, sl].T @ prev[:, sl])
            out[:, sl] = out[:, sl] @ (u @ wt)
    if np.linalg.det(out) < 0.0:
        scores = np.abs(np.einsum("ij,ij->j", out, prev))
        j = int(np.argmin(scores))
        out[:, j] = -out[:, j]
    return out


def polar_sequence(points: Sequence[SpdPoint], tol: float = 1e-8) -> FundamentalDecomposition:
    """Eigen-decompose each term, keeping the rotation part continuous where
    the eigenvalue structure allows."""
    if not len(points):
        raise TooShortError("empty sequence")
    n = points[0].n
    ks: list[Rotation] = []
    hs: list[ChamberVector] = []
    prev: np.ndarray | None = None
    for i, p in enumerate(points):
        if p.n != n:
            raise SequenceTermError(i, "dimension mismatch in matrix sequence")
        eigs, vec = _eig_descending(p.mat)
        if eigs[-1] <= 0.0:
            raise SequenceTermError(i, "matrix term is not positive definite")
        if prev is None:
            vec = _canonical_sign_fix(vec)
        else:
            vec = _align_columns(vec, prev, eigs)
        prev = vec
        ks.append(Rotation(vec, tol=1e-6))
        hs.append(ChamberVector(_project_chamber(0.5 * np.log(eigs)), tol=1e-6))
    return FundamentalDecomposition(tuple(ks), tuple(hs))


def _k_stack(dec: FundamentalDecomposition) -> np.ndarray:
    return np.stack([k.mat for k in dec.ks])


def _k_window_cauchy(dec: FundamentalDecomposition, cfg: Config) -> bool:
    K = _k_stack(dec)
    w = cfg.window
    if K.shape[0] < w:
        raise TooShortError(f"need at least {w} terms, got {K.shape[0]}")
    tail = K[-w:]
    osc = float(np.linalg.norm((tail - K[-1]).reshape(w, -1), axis=1).max())
    return osc <= cfg.cauchy_tol * (1.0 + float(np.linalg.norm(K[-1])))


def _k_hat(dec: FundamentalDecomposition, cfg: Config) -> Rotation:
    """Nearest rotation to the trailing mean of the K-parts."""
    mean = _k_stack(dec)[-cfg.window:].mean(axis=0)
    u, _, vt = np.linalg.svd(mean)
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return Rotation(r, tol=1e-6)


@dataclass(frozen=True, eq=False)
class FundamentalReport:
    fundamental: bool
    k_cauchy: bool
    verdict: Verdict
    limit: QuotientPoint | None


def is_fundamental(dec: FundamentalDecomposition, model: str,
                   cfg: Config) -> FundamentalReport:
    kc = _k_window_cauchy(dec, cfg)
    verdict = classify(dec.hs, model, cfg)
    ok = kc and verdict.outcome == CONVERGED
    limit = QuotientPoint(_k_hat(dec, cfg), verdict.point) if ok else None
    return FundamentalReport(ok, kc, verdict, limit)


def _stride_filters(length: int, min_len: int) -> list[tuple[str, list[int]]]:
    out = []
    for stride in range(1, 5):
        for offset in range(stride):
            idx = list(range(offset, length, stride))
            if len(idx) >= min_len:
                out.append((f"stride{stride}+{offset}", idx))
    return out


def _cluster_filters(dec: FundamentalDecomposition, cfg: Config,
                     min_len: int, max_clusters: int = 4) -> list[tuple[str, list[int]]]:
    """Greedy grouping of terms by K-part proximity; catches alternating
    rotation parts that stride filters happen to miss."""
    K = _k_stack(dec)
    reps: list[np.ndarray] = []
    members: list[list[int]] = []
    for i in range(K.shape[0]):
        for c, rep in enumerate(reps):
            if float(np.linalg.norm(K[i] - rep)) <= cfg.cluster_radius:
                members[c].append(i)
                break
        else:
            if len(reps) >= max_clusters:
                return []  # rotation part too scattered to group
            reps.append(K[i])
            members.append([i])
    return [(f"cluster{c}", idx) for c, idx in enumerate(members)
            if len(idx) >= min_len]


@dataclass(frozen=True, eq=False)
class FilterReport:
    name: str
    size: int
    fundamental: bool
    k_cauchy: bool
    outcome: str
    note: str = ""


@dataclass(frozen=True, eq=False)
class LimitResult:
    status: str  # "converged" | "no_limit" | "inconclusive"
    limit: QuotientPoint | None
    filters: tuple[FilterReport, ...]
    note: str = ""


def limit_in_quotient(points: Sequence[SpdPoint], model: str,
                      cfg: Config) -> LimitResult:
    """Limit of a matrix sequence in the glued quotient, if one exists.

    The full sequence and a family of subsequence filters (strides with all
    offsets, plus greedy rotation-part clusters) are each tested for
    fundamentality. All convergent filters must land in one equivalence
    class; two distinct classes witness genuine non-convergence.
    """
    dec = polar_sequence(points)
    return limit_of_decomposition(dec, model, cfg)


def limit_of_decomposition(dec: FundamentalDecomposition, model: str,
                           cfg: Config) -> LimitResult:
    min_len = 2 * cfg.window
    filters = _stride_filters(len(dec), min_len)
    filters += _cluster_filters(dec, cfg, min_len)
    reports: list[FilterReport] = []
    limits: list[tuple[str, QuotientPoint]] = []
    for name, idx in filters:
        sub = dec.subsample(idx)
        try:
            rep = is_fundamental(sub, model, cfg)
        except MaxDepthExceededError as exc:
            reports.append(FilterReport(name, len(idx), False, False,
                                        "inconclusive", str(exc)))
            continue
        reports.append(FilterReport(name, len(idx), rep.fundamental, rep.k_cauchy,
                                    rep.verdict.outcome, rep.verdict.note))
        if rep.fundamental:
            limits.append((name, rep.limit))
    if not limits:
        return LimitResult("inconclusive", None, tuple(reports),
                           "no subsequence filter reached a limit")
    ref_name, ref = limits[0]
    for name, other in limits[1:]:
        if not equivalent(ref, other, tol=cfg.limit_tol):
            return LimitResult(
                "no_limit", None, tuple(reports),
                f"filters {ref_name} and {name} converge to different classes")
    return LimitResult("converged", ref, tuple(reports))

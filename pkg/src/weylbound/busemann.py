"""Generalized Busemann kernels over families of root subsets.

A kernel family picks subsets I of the simple roots; the component of the
kernel at I is the euclidean norm of the radius root values restricted to I,
so delta(x, y) is a nonnegative vector indexed by the family. The difference
b_x(y) = delta(x, y) - delta(x, o) plays the role of a vector-valued Busemann
function; its entries can have either sign.

Families:
  F: the singletons {1}, ..., {n-1}
  M: every subset of size one or two
  K: every nonempty subset
  custom: caller-provided components
Components are ordered by size, then lexicographically.

Property harnesses estimate the kernel's metric compatibility constants from
deterministic structured configurations plus a nested random stream (sample i
is a fixed function of (seed, i), so enlarging the budget extends the stream
instead of reshuffling it, and estimates grow monotonically with budget).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import generators as gen
from .chamber import MartinIdeal, maxface
from .config import Config, subrng
from .errors import DimensionMismatchError, FaceIndexError, ModelMismatchError
from .liecore import (
    FaceIndex,
    Rotation,
    SpdPoint,
    distance,
    generalized_radius,
    origin,
    root_matrix,
    root_values_of,
    vector_from_root_values,
)
from .quotient import QuotientPoint, equivalent

# numeric task codes for nested sample streams
_TASK_COND1 = 102
_TASK_LIPSCHITZ = 101
_TASK_COND3 = 103
_TASK_CONJECTURE = 104


def family_components(family: str, n: int) -> tuple[FaceIndex, ...]:
    roots = range(1, n)
    if family == "F":
        subs = [(i,) for i in roots]
    elif family == "M":
        subs = [c for size in (1, 2) for c in combinations(roots, size)]
    elif family == "K":
        subs = [c for size in range(1, n) for c in combinations(roots, size)]
    else:
        raise ModelMismatchError(f"unknown kernel family {family!r}")
    return tuple(FaceIndex(c) for c in sorted(subs, key=lambda c: (len(c), c)))


@dataclass(frozen=True, eq=False)
class KernelSpec:
    n: int
    family: str
    components: tuple[FaceIndex, ...]

    def __init__(self, n: int, family: str = "F",
                 components: Sequence[FaceIndex] | None = None):
        if n < 2:
            raise DimensionMismatchError("kernels need n >= 2")
        if family == "custom":
            if not components:
                raise FaceIndexError("custom kernels need explicit components")
            comps = []
            for I in components:
                I.validate_for(n)
                if not len(I):
                    raise FaceIndexError("kernel components must be nonempty")
                comps.append(I)
            if len({tuple(I) for I in comps}) != len(comps):
                raise FaceIndexError("kernel components must be distinct")
            comps = tuple(sorted(comps, key=lambda I: (len(I), tuple(I))))
        else:
            if components is not None:
                raise FaceIndexError(
                    "components are derived for the named families")
            comps = family_components(family, n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "components", comps)

    @property
    def size(self) -> int:
        return len(self.components)

    def labels(self) -> tuple[str, ...]:
        return tuple("{" + ",".join(str(i) for i in I) + "}"
                     for I in self.components)

    def __repr__(self) -> str:
        return f"KernelSpec(n={self.n}, family={self.family!r}, {list(self.labels())})"


def _component_rows(spec: KernelSpec) -> list[np.ndarray]:
    A = root_matrix(spec.n)
    return [A[[i - 1 for i in I], :] for I in spec.components]


def stacked_matrix(spec: KernelSpec) -> np.ndarray:
    """Vertical stack of the component root rows; its operator norm bounds
    every kernel difference ratio."""
    return np.vstack(_component_rows(spec))


def component_values(spec: KernelSpec, h: np.ndarray) -> np.ndarray:
    """Kernel components of a radius vector: per-subset root-value norms."""
    rv = root_values_of(np.asarray(h, dtype=float))
    return np.array([float(np.linalg.norm(rv[[i - 1 for i in I]]))
                     for I in spec.components])


def kernel_eval(spec: KernelSpec, x: SpdPoint, y: SpdPoint) -> np.ndarray:
    """delta(x, y): nonnegative component vector; exactly zero when x == y."""
    if x.n != spec.n or y.n != spec.n:
        raise DimensionMismatchError(f"kernel is for n = {spec.n}")
    if x is y or np.array_equal(x.mat, y.mat):
        return np.zeros(spec.size)
    return component_values(spec, generalized_radius(x, y).h)


def busemann_value(spec: KernelSpec, x: SpdPoint, y: SpdPoint,
                   o: SpdPoint | None = None) -> np.ndarray:
    """b_x(y) = delta(x, y) - delta(x, o), a plain signed vector."""
    o = origin(spec.n) if o is None else o
    return kernel_eval(spec, x, y) - kernel_eval(spec, x, o)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A function known through its values at a fixed probe list."""
    values: np.ndarray  # (probes, components)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def sup_distance(self, other: "SampledFunction") -> float:
        if self.values.shape != other.values.shape:
            raise DimensionMismatchError("sampled functions use different probes")
        return float(np.abs(self.values - other.values).max())


def busemann_profile(spec: KernelSpec, x: SpdPoint, probes: Sequence[SpdPoint],
                     o: SpdPoint | None = None) -> SampledFunction:
    o = origin(spec.n) if o is None else o
    base = kernel_eval(spec, x, o)
    return SampledFunction(np.stack([kernel_eval(spec, x, p) - base
                                     for p in probes]))


def flat_point(k: Rotation, v: np.ndarray) -> SpdPoint:
    """k exp(2v) k^T for an arbitrary trace-zero exponent (not sorted)."""
    v = np.asarray(v, dtype=float)
    return SpdPoint(k.mat @ (np.exp(2.0 * v)[:, None] * k.mat.T), tol=1e-9)


def _corner_directions(n: int) -> list[np.ndarray]:
    """Extreme rays of the chamber plus pairwise blends, unit length."""
    corners = []
    for j in range(1, n):
        c = np.zeros(n - 1)
        c[j - 1] = 1.0
        corners.append(c)
    blends = [a + b for a, b in combinations(corners, 2)]
    out = []
    for c in corners + blends + [np.ones(n - 1)]:
        u = vector_from_root_values(c, n)
        out.append(u / np.linalg.norm(u))
    return out


def _simplex_grid(dim: int, budget: int = 400) -> list[np.ndarray]:
    """Deterministic grid on the root-value simplex (coords >= 0, sum 1)."""
    if dim == 1:
        return [np.array([1.0])]
    steps = 2
    while True:
        count = 1
        for j in range(dim - 1):  # compositions of `steps` into `dim` parts
            count = count * (steps + dim - 1 - j) // (j + 1)
        if count > budget:
            break
        steps += 1
    steps = max(steps - 1, 1)
    out: list[np.ndarray] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            out.append(np.array(prefix + [left], dtype=float) / steps)
            return
        for v in range(left + 1):
            rec(prefix + [v], left - v, slots - 1)

    rec([], steps, dim)
    return out


def _chamber_grid_directions(n: int, budget: int = 400) -> list[np.ndarray]:
    dirs = []
    for c in _simplex_grid(n - 1, budget):
        u = vector_from_root_values(c, n)
        nu = float(np.linalg.norm(u))
        if nu > 1e-12:
            dirs.append(u / nu)
    return dirs


def _growth_rate(spec: KernelSpec, u: np.ndarray) -> float:
    """||delta||-rate along the unit chamber direction u (exactly linear)."""
    return float(np.linalg.norm(component_values(spec, u)))


@dataclass(frozen=True)
class ViolationSample:
    kind: str
    d_near: float
    norm_near: float
    d_far: float
    norm_far: float


@dataclass(frozen=True, eq=False)
class Condition1Report:
    holds: bool
    checked: int
    violations: tuple[ViolationSample, ...]
    rate_spread: tuple[float, float]  # (min, max) of ||delta|| per unit distance
    note: str = ""


def check_condition1(spec: KernelSpec, cfg: Config,
                     rng: np.random.Generator | None = None) -> Condition1Report:
    """Distance monotonicity of ||delta||: a strictly nearer point must not
    have a strictly larger kernel norm. Random ball pairs plus a targeted
    two-ray search; any hit is re-verified end to end on realized matrices."""
    n = spec.n
    rng = subrng(cfg.seed, _TASK_COND1) if rng is None else rng
    margin = cfg.margin
    violations: list[ViolationSample] = []
    checked = 0
    x = origin(n)
    for _ in range(cfg.samples):
        y = gen.random_spd(n, rng, scale=cfg.sample_radius)
        z = gen.random_spd(n, rng, scale=cfg.sample_radius)
        dy, dz = distance(x, y), distance(x, z)
        ny = float(np.linalg.norm(kernel_eval(spec, x, y)))
        nz = float(np.linalg.norm(kernel_eval(spec, x, z)))
        checked += 1
        if dy <= dz - margin and ny >= nz + margin:
            violations.append(ViolationSample("random", dy, ny, dz, nz))
    # two-ray search: rates differ iff some direction pair violates monotonicity
    dirs = _corner_directions(n)
    rates = [_growth_rate(spec, u) for u in dirs]
    lo, hi = min(rates), max(rates)
    if hi - lo > margin:
        u = dirs[int(np.argmax(rates))]
        v = dirs[int(np.argmin(rates))]
        # near point on the fast ray, farther point on the slow ray
        s = max(1.0, 2.0 * margin * (1.0 + lo) / (hi - lo))
        t = (s * hi + s * lo) / (2.0 * lo)  # between s and s*hi/lo
        k = Rotation.identity(n)
        y, z = flat_point(k, s * u), flat_point(k, t * v)
        dy, dz = distance(x, y), distance(x, z)
        ny = float(np.linalg.norm(kernel_eval(spec, x, y)))
        nz = float(np.linalg.norm(kernel_eval(spec, x, z)))
        checked += 1
        if dy <= dz - margin and ny >= nz + margin:
            violations.append(ViolationSample("two-ray", dy, ny, dz, nz))
    return Condition1Report(not violations, checked,
                            tuple(violations[:10]), (lo, hi))


def _local_ratio_matrix(spec: KernelSpec, base: np.ndarray) -> np.ndarray:
    """Linearization of v -> delta-components at a radius vector `base`:
    active components contribute their gradient row, components vanishing at
    base contribute their full root block (the one-sided kink rate)."""
    rows = []
    for A in _component_rows(spec):
        Ab = A @ base
        nb = float(np.linalg.norm(Ab))
        if nb > 1e-9 * (1.0 + float(np.abs(base).max())):
            rows.append(((Ab / nb) @ A)[None, :])
        else:
            rows.append(A)
    return np.vstack(rows)


def _measured_ratio(spec: KernelSpec, base: np.ndarray, u: np.ndarray,
                    eps: float) -> float:
    """End-to-end kernel difference ratio for a perturbative colinear pair."""
    k = Rotation.identity(spec.n)
    y, z = flat_point(k, base + eps * u), flat_point(k, base)
    den = distance(y, z)
    if den < 1e-12:
        return 0.0
    num = float(np.linalg.norm(kernel_eval(spec, origin(spec.n), y)
                               - kernel_eval(spec, origin(spec.n), z)))
    return num / den


def _lipschitz_heads(spec: KernelSpec, cfg: Config) -> list[float]:
    """Structured configurations aimed at the supremum ratio.

    Candidate base points run over a deterministic grid of chamber directions
    (walls included); at each base the locally extremal perturbation is the
    top singular direction of the linearized component map, and the reported
    number is the measured kernel ratio, not the linear model."""
    n = spec.n
    k = Rotation.identity(n)
    ratios: list[float] = []
    for u in _corner_directions(n):
        y = flat_point(k, 2.0 * cfg.sample_radius * u)
        z = flat_point(k, cfg.sample_radius * u)
        num = float(np.linalg.norm(kernel_eval(spec, origin(n), y)
                                   - kernel_eval(spec, origin(n), z)))
        ratios.append(num / distance(y, z))
    eps = 1e-4 * cfg.sample_radius
    for w in _chamber_grid_directions(n) + _corner_directions(n):
        base = cfg.sample_radius * w
        local = _local_ratio_matrix(spec, base)
        _, _, vt = np.linalg.svd(local)
        u = vt[0] - vt[0].mean()
        nu = float(np.linalg.norm(u))
        if nu < 1e-12:
            continue
        ratios.append(_measured_ratio(spec, base, u / nu, eps))
    return ratios


@dataclass(frozen=True, eq=False)
class RatioReport:
    estimate: float
    budget: int
    head_count: int
    best_kind: str
    upper_bound: float
    note: str = ""


def check_lipschitz(spec: KernelSpec, cfg: Config,
                    budget: int | None = None) -> RatioReport:
    """Estimate of s = sup ||delta(x,y) - delta(x,z)|| / d(y,z).

    Deterministic heads cover the colinear and perturbative extremal
    configurations; a nested random stream fills in generic triples. The
    operator norm of the stacked component matrix is an a priori upper bound.
    """
    budget = cfg.kernel_samples if budget is None else budget
    n = spec.n
    heads = _lipschitz_heads(spec, cfg)
    best = max(heads)
    kind = "head"
    for i in range(budget):
        r = subrng(cfg.seed, _TASK_LIPSCHITZ, i)
        x = gen.random_spd(n, r, scale=1.0)
        y = gen.random_spd(n, r, scale=cfg.sample_radius)
        z = gen.random_spd(n, r, scale=cfg.sample_radius)
        den = distance(y, z)
        if den < cfg.min_dist:
            continue
        num = float(np.linalg.norm(kernel_eval(spec, x, y) - kernel_eval(spec, x, z)))
        if num / den > best:
            best, kind = num / den, f"stream[{i}]"
    bound = float(np.linalg.svd(stacked_matrix(spec), compute_uv=False)[0])
    return RatioReport(best, budget, len(heads), kind, bound)


def check_condition3(spec: KernelSpec, cfg: Config, budget: int | None = None,
                     literal: bool | None = None) -> RatioReport:
    """Kernel growth constant along common rays.

    Default form: sup of ||delta(x,z) - delta(x,z')|| / d(z,z') over colinear
    triples (z, z' on one chamber ray from x); along a ray the ratio equals
    the direction's growth rate exactly. The literal variant divides by the
    base distance d(x,z) instead, which couples the ratio to the gap size; it
    is reported for fidelity when requested.
    """
    budget = cfg.kernel_samples if budget is None else budget
    literal = cfg.literal_condition3 if literal is None else literal
    n = spec.n
    x = origin(n)
    k = Rotation.identity(n)
    ratios: list[tuple[float, str]] = []
    heads = _corner_directions(n) + _chamber_grid_directions(n)
    for u in heads:
        s, t = 1.0, 2.5
        z1, z2 = flat_point(k, s * u), flat_point(k, t * u)
        num = float(np.linalg.norm(kernel_eval(spec, x, z1) - kernel_eval(spec, x, z2)))
        den = distance(x, z1) if literal else distance(z1, z2)
        if den > 1e-12:
            ratios.append((num / den, "head"))
    for i in range(budget):
        r = subrng(cfg.seed, _TASK_COND3, i)
        frame = gen.random_rotation(n, r)
        u = gen.random_unit_direction(n, r).h
        s = r.uniform(0.5, 2.0)
        t = s + r.uniform(0.5, 2.0)
        base = gen.random_chamber_vector(n, r, scale=0.4, floor=0.05).h
        xx = flat_point(frame, base)
        z1 = flat_point(frame, base + s * u)
        z2 = flat_point(frame, base + t * u)
        num = float(np.linalg.norm(kernel_eval(spec, xx, z1)
                                   - kernel_eval(spec, xx, z2)))
        den = distance(xx, z1) if literal else distance(z1, z2)
        if den < cfg.min_dist:
            continue
        ratios.append((num / den, f"stream[{i}]"))
    best, kind = max(ratios, key=lambda p: p[0])
    bound = float(np.linalg.svd(stacked_matrix(spec), compute_uv=False)[0])
    return RatioReport(best, budget, len(heads), kind, bound)


@dataclass(frozen=True, eq=False)
class ConjectureReport:
    """Observed agreement between quotient equality and b-limit equality.

    confusion[i][j] counts pairs with kernel-side prediction i and observed
    b-limit verdict j (0 = distinct, 1 = equal). Exploratory: recorded, never
    asserted.
    """
    confusion: tuple[tuple[int, int], tuple[int, int]]
    pairs: int
    skipped: int
    func_tol: float
    max_tail_drift: float
    note: str = ""

    @property
    def agreement(self) -> float:
        total = sum(sum(row) for row in self.confusion)
        return (self.confusion[0][0] + self.confusion[1][1]) / total if total else 1.0


def _ray_profile(spec: KernelSpec, k: Rotation, direction: np.ndarray,
                 finite: np.ndarray, probes: Sequence[SpdPoint],
                 cfg: Config) -> tuple[SampledFunction | None, float]:
    """Tail-stabilized b-profile along y_m = k exp(2(m L + a)) k^T.

    The eigenvalue spread of the realized terms stays near 11, inside the
    float64 round-trip envelope."""
    rv_dir = root_values_of(direction)
    spread_rate = float(rv_dir.sum())
    m_max = (11.0 - float(np.abs(root_values_of(finite)).sum())) / max(spread_rate, 1e-9)
    # start late enough that every root of mL + a is nonnegative
    m_min = 0.0
    rv_fin = root_values_of(finite)
    for j in range(direction.size - 1):
        if rv_dir[j] > 1e-9 and rv_fin[j] < 0.0:
            m_min = max(m_min, -rv_fin[j] / rv_dir[j])
    ms = np.linspace(max(0.8 * m_max, min(m_min * 1.1, 0.9 * m_max)), m_max, 24)
    o = origin(spec.n)
    vals = []
    for m in ms:
        y = flat_point(k, m * direction + finite)
        base = kernel_eval(spec, y, o)
        vals.append(np.stack([kernel_eval(spec, y, p) - base for p in probes]))
    stack = np.stack(vals)  # (m, probes, comps)
    # multi-root components approach their limit like c/m; fit and extrapolate
    design = np.stack([np.ones_like(ms), 1.0 / ms], axis=1)
    flat = stack.reshape(len(ms), -1)
    coef, *_ = np.linalg.lstsq(design, flat, rcond=None)
    resid = float(np.abs(flat - design @ coef).max())
    if resid > cfg.stab_tol:
        return None, resid
    return SampledFunction(coef[0].reshape(stack.shape[1:])), resid


def conjecture_experiment(spec: KernelSpec, cfg: Config,
                          rng: np.random.Generator | None = None) -> ConjectureReport:
    """Compare quotient equality of boundary points against equality of their
    limiting b-profiles on a fixed probe set."""
    n = spec.n
    rng = subrng(cfg.seed, _TASK_CONJECTURE) if rng is None else rng
    probe_set = gen.probes(n, rng, cfg.probe_count, cfg.probe_radius)
    entries = []  # (quotient point, K-part, direction, finite part)
    for _ in range(max(4, cfg.probe_count // 2)):
        k = gen.random_rotation(n, rng)
        face = FaceIndex.empty()
        if n >= 3 and rng.random() < 0.5:
            face = FaceIndex([int(rng.integers(1, n))])  # singletons are proper for n >= 3
        L = gen.random_unit_direction(n, rng, face=face)
        if rng.random() < 0.5:
            a = gen.random_finite_part(face, n, rng, lo=0.2, hi=0.6)
        else:
            a = np.zeros(n)
        # one model for every entry so all pairs are comparable
        pt = QuotientPoint(k, MartinIdeal(face, a, L))
        entries.append((pt, k, L.h, a))
        # stabilizer dressing: same class, different K-part
        s = gen.random_stab_element(maxface(pt.x), n, rng)
        entries.append((QuotientPoint(k @ s, pt.x), k @ s, L.h, a))
    confusion = [[0, 0], [0, 0]]
    skipped = 0
    worst_drift = 0.0
    profiles: list[SampledFunction | None] = []
    for pt, k, L, a in entries:
        prof, drift = _ray_profile(spec, k, L, a, probe_set, cfg)
        worst_drift = max(worst_drift, drift)
        profiles.append(prof)
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            pi, pj = profiles[i], profiles[j]
            if pi is None or pj is None:
                skipped += 1
                continue
            pred = equivalent(entries[i][0], entries[j][0], tol=1e-6)
            obs = pi.sup_distance(pj) <= cfg.func_tol
            confusion[int(pred)][int(obs)] += 1
    return ConjectureReport(
        (tuple(confusion[0]), tuple(confusion[1])),
        sum(sum(r) for r in confusion), skipped, cfg.func_tol, worst_drift)

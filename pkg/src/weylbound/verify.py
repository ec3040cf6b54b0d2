"""Property harnesses tying the pieces together.

Each suite samples randomized instances of one structural claim and returns a
report object with counts and failures; the CLI `verify` command serializes
these. Sampling is deterministic in (cfg.seed, task code).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import busemann as bu
from . import generators as gen
from .chamber import (
    Interior,
    MartinIdeal,
    VisualIdeal,
    classify,
    finite_part_from,
    maxface,
    points_equal,
)
from .config import MODELS, Config, subrng
from .errors import InputFormatError, ModelMismatchError
from .fundseq import (
    FundamentalDecomposition,
    is_fundamental,
    limit_in_quotient,
)
from .liecore import (
    ChamberVector,
    FaceIndex,
    Rotation,
    cartan_decompose,
    distance,
    face_of,
    in_stab,
    minimal_face,
    realize_point,
    root_values_of,
    vector_from_root_values,
)
from .quotient import QuotientPoint, equivalent, realize

_TASK_STRATIFIED = 201
_TASK_INTERSECT = 202
_TASK_REFINE = 203
_TASK_CLASS = 204
_TASK_RANK1 = 205
_TASK_KAK = 206
_TASK_STAB = 207

# Chamber-vector sequences need no exponentiation, so root values may reach
# the thousands; secondary sqrt growth must clear the divergence threshold
# inside the window while its direction drift stays under the Cauchy gate.
_CHAMBER_CFG = dict(cauchy_tol=1e-3, divergence_threshold=50.0)
_CHAMBER_MS = np.linspace(120.0, 4000.0, 420)

# Matrix-valued sequences exponentiate, so root values stay single-digit.
_MATRIX_CFG = dict(cauchy_tol=1e-3, divergence_threshold=3.0, limit_tol=0.08)
_MATRIX_MS = np.linspace(0.5, 5.2, 240)


def chamber_harness_config(cfg: Config) -> Config:
    return cfg.replace(**_CHAMBER_CFG)


def matrix_harness_config(cfg: Config) -> Config:
    return cfg.replace(**_MATRIX_CFG)


@dataclass(frozen=True, eq=False)
class SuiteReport:
    name: str
    holds: bool
    checked: int
    failures: tuple[str, ...]
    details: dict

    def summary(self) -> str:
        state = "ok" if self.holds else "FAILED"
        return f"{self.name}: {state} ({self.checked} checks)"


def stratified_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """Every boundary point is recovered from a generic approach sequence in
    its own model, and zeroing more roots moves deeper into a face closure."""
    rng = subrng(cfg.seed, _TASK_STRATIFIED)
    ccfg = chamber_harness_config(cfg)
    failures: list[str] = []
    checked = 0
    for model in MODELS:
        for trial in range(cfg.stratified_points):
            point = gen.random_boundary_point(model, n, rng)
            seq = gen.approach_sequence(point, _CHAMBER_MS, rng)
            verdict = classify(seq, model, ccfg)
            checked += 1
            if not verdict.converged:
                failures.append(f"{model}[{trial}]: {verdict.outcome} ({verdict.note})")
                continue
            if not points_equal(verdict.point, point, tol=ccfg.limit_tol):
                failures.append(f"{model}[{trial}]: wrong limit")
    for face in gen.all_faces(n):
        if face.is_full(n):
            continue
        h = gen.random_chamber_vector(n, rng, face=face)
        checked += 1
        if face_of(h, tol=1e-9) != face:
            failures.append(f"face_of on open face {face!r}")
        for extra in (i for i in range(1, n) if i not in face):
            hh = gen.random_chamber_vector(n, rng, face=face.union(FaceIndex([extra])))
            checked += 1
            if not face.issubset(face_of(hh, tol=1e-9)):
                failures.append(f"closure of {face!r} misses root {extra}")
    return SuiteReport("stratified", not failures, checked, tuple(failures[:10]),
                       {"models": list(MODELS), "n": n})


@dataclass(frozen=True, eq=False)
class IntersectionReport:
    i_min: FaceIndex
    holds: bool
    shared_checked: int
    disjoint_checked: int
    witness_checked: int
    failures: tuple[str, ...]

    def summary(self) -> str:
        state = "ok" if self.holds else "FAILED"
        return (f"intersection: {state} (I_min={self.i_min!r}, "
                f"{self.shared_checked} shared, {self.disjoint_checked} disjoint, "
                f"{self.witness_checked} witnesses)")


def intersection_check(k: Rotation, r: Rotation, cfg: Config,
                       rng: np.random.Generator | None = None) -> IntersectionReport:
    """Which boundary classes the compactified chambers of two frames share.

    The relation q = k^T r fixes a minimal face I_min, and a class whose
    maximal face is J is shared exactly when J contains I_min. Sampled points
    on both sides of that divide check the two inclusions; realized matrix
    sequences then witness that a shared class really is reached from inside
    both chambers.
    """
    n = k.n
    rng = subrng(cfg.seed, _TASK_INTERSECT) if rng is None else rng
    mcfg = matrix_harness_config(cfg)
    q = k.transpose() @ r
    i_min = minimal_face(q, tol=1e-7)
    failures: list[str] = []
    shared = disjoint = witnesses = 0
    candidates = [J for J in gen.all_faces(n) if not J.is_full(n)]
    for J in candidates:
        expect_shared = i_min.issubset(J)
        for _ in range(max(1, cfg.intersection_samples // len(candidates))):
            L = gen.random_unit_direction(n, rng, face=J)
            if rng.random() < 0.5:
                x = VisualIdeal(L)
            else:
                # zero finite part keeps the refined maximal face at J itself
                x = MartinIdeal(J, np.zeros(n), L)
            got = equivalent(QuotientPoint(k, x), QuotientPoint(r, x), tol=1e-7)
            if expect_shared:
                shared += 1
                if not got:
                    failures.append(f"shared point over {J!r} not glued")
            else:
                disjoint += 1
                if got:
                    failures.append(f"point over {J!r} glued despite I_min")
    if not i_min.is_full(n):
        for trial in range(3):
            # a point over a superset of I_min whose finite part vanishes
            # exactly on I_min, so the refined maximal face is I_min itself
            extras = [i for i in range(1, n)
                      if i not in i_min and rng.random() < 0.5]
            J = i_min.union(FaceIndex(extras))
            if J.is_full(n):
                J = i_min
            vals = [0.0 if i in i_min else float(rng.uniform(0.25, 0.45))
                    for i in J]
            finite = finite_part_from(J, vals, n)
            # root slopes >= 0.8 so every divergent root clears the threshold
            # well inside the short matrix-scale window
            L = gen.random_chamber_vector(n, rng, face=J, floor=0.8)
            hs = gen.chamber_ray(L, _MATRIX_MS, finite)
            res_k = limit_in_quotient(gen.spd_sequence(k, hs), "martin", mcfg)
            res_r = limit_in_quotient(gen.spd_sequence(r, hs), "martin", mcfg)
            witnesses += 1
            if res_k.status != "converged" or res_r.status != "converged":
                failures.append(f"witness[{trial}] did not converge")
                continue
            if not equivalent(res_k.limit, res_r.limit, tol=mcfg.limit_tol):
                failures.append(f"witness[{trial}] limits in different classes")
    return IntersectionReport(i_min, not failures, shared, disjoint,
                              witnesses, tuple(failures[:10]))


def intersection_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """intersection_check for a stabilizer dressing of every proper face, plus
    one generic pair of frames that should share nothing."""
    rng = subrng(cfg.seed, _TASK_INTERSECT, 1)
    failures: list[str] = []
    checked = 0
    cases = []
    for face in gen.all_faces(n):
        if face.is_full(n):
            continue
        k = gen.random_rotation(n, rng)
        s = gen.random_stab_element(face, n, rng)
        rep = intersection_check(k, k @ s, cfg, rng=rng)
        cases.append((repr(face), repr(rep.i_min), rep.holds))
        checked += rep.shared_checked + rep.disjoint_checked + rep.witness_checked
        if not rep.holds:
            failures.extend(f"stab {face!r}: {f}" for f in rep.failures[:3])
        if not rep.i_min.issubset(face):
            failures.append(f"I_min {rep.i_min!r} exceeds dressing face {face!r}")
    k = gen.random_rotation(n, rng)
    rep = intersection_check(k, gen.random_rotation(n, rng), cfg, rng=rng)
    cases.append(("generic", repr(rep.i_min), rep.holds))
    checked += rep.shared_checked + rep.disjoint_checked + rep.witness_checked
    if not rep.holds:
        failures.extend(f"generic: {f}" for f in rep.failures[:3])
    if not rep.i_min.is_full(n):
        failures.append("generic frames glued along a proper face")
    return SuiteReport("intersections", not failures, checked,
                       tuple(failures[:10]), {"cases": cases})


def refinement_pair_pool(cfg: Config, n: int = 3) -> list[tuple[FundamentalDecomposition,
                                                                FundamentalDecomposition]]:
    """Decomposition pairs engineered around the refinement relations.

    Six archetypes cycle: equal Martin data under stabilizer dressing, equal
    visual direction with different dual cells (sqrt growth vs an exact wall),
    equal dual cell with different directions, equal single-level iterated
    data, unrelated pairs, and equal chamber data under an unrelated rotation.
    Built at chamber scale; nothing here is exponentiated.
    """
    if n < 3:
        raise InputFormatError("the refinement corpus needs n >= 3")
    rng = subrng(cfg.seed, _TASK_REFINE)
    ms = _CHAMBER_MS
    pairs: list[tuple[FundamentalDecomposition, FundamentalDecomposition]] = []

    def dec(kk: Rotation, hs) -> FundamentalDecomposition:
        return FundamentalDecomposition(tuple([kk] * len(hs)), tuple(hs))

    kinds = ("martin-equal", "visual-not-dualcell", "dualcell-not-visual",
             "iterated-equal", "unrelated", "same-data-generic-k")
    while len(pairs) < cfg.refinement_pairs:
        kind = kinds[len(pairs) % len(kinds)]
        k = gen.random_rotation(n, rng)
        if kind == "martin-equal":
            face = FaceIndex([int(rng.integers(1, n))])
            L = gen.random_unit_direction(n, rng, face=face)
            a = gen.random_finite_part(face, n, rng, lo=0.2, hi=0.6,
                                       zero_chance=0.5)
            slopes = root_values_of(L.h)
            consts = root_values_of(a)
            A = gen.profile_sequence(n, ms, slopes, consts=consts,
                                     decay=rng.uniform(0.0, 0.4, n - 1))
            B = gen.profile_sequence(n, ms, slopes * float(rng.uniform(1.2, 1.8)),
                                     consts=consts,
                                     decay=rng.uniform(0.0, 0.4, n - 1))
            s = gen.random_stab_element(maxface(MartinIdeal(face, a, L)), n, rng)
            pairs.append((dec(k, A), dec(k @ s, B)))
        elif kind == "visual-not-dualcell":
            # same ray; sqrt growth on one side, an exact wall on the other
            A = gen.profile_sequence(n, ms, np.r_[1.0, np.zeros(n - 2)],
                                     sqrts=np.r_[0.0, 1.5, np.zeros(n - 3)])
            B = gen.profile_sequence(n, ms, np.r_[3.0, np.zeros(n - 2)])
            u = vector_from_root_values(np.r_[1.0, np.zeros(n - 2)], n)
            wall = face_of(ChamberVector(u / np.linalg.norm(u)), tol=1e-9)
            s = gen.random_stab_element(wall, n, rng)
            pairs.append((dec(k, A), dec(k @ s, B)))
        elif kind == "dualcell-not-visual":
            # fixed slope patterns keep the two directions ~0.19 apart
            base = np.ones(n - 1)
            other = np.where(np.arange(n - 1) % 2 == 0, 1.0, 0.45)
            A = gen.profile_sequence(n, ms, base * float(rng.uniform(0.8, 1.2)))
            B = gen.profile_sequence(n, ms, other * float(rng.uniform(0.8, 1.2)))
            pairs.append((dec(k, A), dec(k, B)))
        elif kind == "iterated-equal":
            L = gen.random_unit_direction(n, rng)
            f = rng.standard_normal(n) * 0.3
            f -= f.mean()
            f -= (f @ L.h) * L.h
            A = gen.chamber_ray(L, ms, f)
            B = gen.chamber_ray(L, ms + float(rng.uniform(3.0, 9.0)), f)
            pairs.append((dec(k, A), dec(k, B)))
        elif kind == "unrelated":
            A = gen.profile_sequence(n, ms, rng.uniform(0.3, 1.5, n - 1))
            B = gen.profile_sequence(n, ms, rng.uniform(0.3, 1.5, n - 1))
            pairs.append((dec(k, A), dec(gen.random_rotation(n, rng), B)))
        else:  # same chamber data, rotation parts not glued
            L = gen.random_unit_direction(n, rng)
            A = gen.chamber_ray(L, ms)
            pairs.append((dec(k, A), dec(gen.random_rotation(n, rng), A)))
    return pairs[:cfg.refinement_pairs]


@dataclass(frozen=True, eq=False)
class RefinementReport:
    pairs: int
    implications: dict  # name -> (applicable, violations)
    counterexamples: dict  # name -> count
    holds: bool

    def summary(self) -> str:
        state = "ok" if self.holds else "FAILED"
        imp = ", ".join(f"{k} {a}/{v}" for k, (a, v) in self.implications.items())
        return f"refinement: {state} ({self.pairs} pairs; applicable/violated {imp})"


def refinement_report(pairs, cfg: Config) -> RefinementReport:
    """Martin equality refines visual and dual-cell equality, and iterated
    equality refines Martin equality; visual and dual-cell equality do not
    refine each other, witnessed by counterexamples in both directions."""
    ccfg = chamber_harness_config(cfg)
    limits: dict[tuple[int, str], QuotientPoint | None] = {}

    def limit(d: FundamentalDecomposition, model: str):
        key = (id(d), model)
        if key not in limits:
            limits[key] = is_fundamental(d, model, ccfg).limit
        return limits[key]

    def equal(a, b, model) -> bool | None:
        la, lb = limit(a, model), limit(b, model)
        if la is None or lb is None:
            return None
        try:
            return equivalent(la, lb, tol=ccfg.limit_tol)
        except ModelMismatchError:
            # one side interior, or distinct ideal variants: different points
            return False

    implication_defs = (
        ("martin->visual", "martin", "visual"),
        ("martin->dualcell", "martin", "dualcell"),
        ("iterated->martin", "iterated", "martin"),
    )
    implications = {name: [0, 0] for name, _, _ in implication_defs}
    counterexamples = {"visual-not-dualcell": 0, "dualcell-not-visual": 0}
    for a, b in pairs:
        verdicts = {m: equal(a, b, m) for m in MODELS}
        for name, fine, coarse in implication_defs:
            if verdicts[fine] is True and verdicts[coarse] is not None:
                implications[name][0] += 1
                if verdicts[coarse] is False:
                    implications[name][1] += 1
        if verdicts["visual"] is True and verdicts["dualcell"] is False:
            counterexamples["visual-not-dualcell"] += 1
        if verdicts["dualcell"] is True and verdicts["visual"] is False:
            counterexamples["dualcell-not-visual"] += 1
    holds = (all(v == 0 for _, v in implications.values())
             and all(c > 0 for c in counterexamples.values())
             and all(a > 0 for a, _ in implications.values()))
    return RefinementReport(len(pairs),
                            {k: tuple(v) for k, v in implications.items()},
                            dict(counterexamples), holds)


def refinement_suite(cfg: Config, n: int = 3) -> SuiteReport:
    rep = refinement_report(refinement_pair_pool(cfg, n), cfg)
    failures = []
    for name, (app, vio) in rep.implications.items():
        if vio:
            failures.append(f"{name}: {vio} violations in {app} cases")
        if app == 0:
            failures.append(f"{name}: never applicable")
    for name, count in rep.counterexamples.items():
        if count == 0:
            failures.append(f"no {name} counterexample found")
    return SuiteReport("refinement", rep.holds and not failures, rep.pairs,
                       tuple(failures), {"implications": rep.implications,
                                         "counterexamples": rep.counterexamples})


def class_structure_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """The class of (k, x) is k Stab(maxface x) x {x}: stabilizer dressing
    never leaves the class, generic rotations do, and for interior points
    class equality coincides with equality of the realized matrices."""
    rng = subrng(cfg.seed, _TASK_CLASS)
    failures: list[str] = []
    checked = 0
    for trial in range(cfg.class_samples):
        model = MODELS[trial % len(MODELS)]
        x = gen.random_boundary_point(model, n, rng)
        k = gen.random_rotation(n, rng)
        p = QuotientPoint(k, x)
        s = gen.random_stab_element(maxface(x), n, rng)
        checked += 1
        if not equivalent(p, QuotientPoint(k @ s, x), tol=1e-7):
            failures.append(f"{model}[{trial}]: stabilizer dressing left the class")
        g = gen.random_rotation(n, rng)
        if not in_stab(g, maxface(x), tol=1e-7):
            checked += 1
            if equivalent(p, QuotientPoint(k @ g, x), tol=1e-7):
                failures.append(f"{model}[{trial}]: generic rotation stayed in class")
    for trial in range(cfg.class_samples // 2):
        h = gen.random_chamber_vector(n, rng)
        k = gen.random_rotation(n, rng)
        dress = (gen.random_stab_element(face_of(h, tol=1e-9), n, rng)
                 if trial % 2 == 0 else gen.random_rotation(n, rng))
        p = QuotientPoint(k, Interior(h))
        q = QuotientPoint(k @ dress, Interior(h))
        checked += 1
        same_class = equivalent(p, q, tol=1e-7)
        gap = float(np.abs(realize(p).mat - realize(q).mat).max())
        same_matrix = gap < 1e-7 * (1.0 + float(np.abs(realize(p).mat).max()))
        if same_class != same_matrix:
            failures.append(f"interior[{trial}]: class/matrix equality disagree")
    return SuiteReport("class-structure", not failures, checked,
                       tuple(failures[:10]), {"n": n})


@dataclass(frozen=True, eq=False)
class Rank1Report:
    distinct_classes: int
    samples: int
    glued_pairs: int
    one_point_boundary: bool

    def summary(self) -> str:
        kind = "one-point" if self.one_point_boundary else "not a one-point"
        return (f"rank1: {self.distinct_classes} distinct boundary classes from "
                f"{self.samples} samples -> {kind} compactification")


def rank_one_report(cfg: Config) -> Rank1Report:
    """For n = 2 the boundary is a circle of classes (k, L) with k taken
    modulo diagonal signs; multiple distinct classes rule out collapsing to
    the one-point compactification."""
    rng = subrng(cfg.seed, _TASK_RANK1)
    L = ChamberVector(np.array([1.0, -1.0]) / np.sqrt(2.0))
    thetas = np.linspace(0.0, np.pi, 9)[:-1] + float(rng.uniform(0.0, 0.05))
    points = [QuotientPoint(gen.givens_rotation(2, 1, 2, float(t)), VisualIdeal(L))
              for t in thetas]
    distinct = 0
    glued = 0
    seen: list[QuotientPoint] = []
    for p in points:
        if any(equivalent(p, q, tol=1e-7) for q in seen):
            glued += 1
        else:
            distinct += 1
            seen.append(p)
    return Rank1Report(distinct, len(points), glued, distinct <= 1)


def rank_one_suite(cfg: Config) -> SuiteReport:
    rep = rank_one_report(cfg)
    ok = rep.distinct_classes > 1 and not rep.one_point_boundary
    failures = () if ok else ("boundary collapsed to a point",)
    return SuiteReport("rank1", ok, rep.samples, failures,
                       {"distinct_classes": rep.distinct_classes})


def kak_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """Decomposition round trips and distance symmetry on random points."""
    rng = subrng(cfg.seed, _TASK_KAK)
    failures: list[str] = []
    checked = 0
    for trial in range(cfg.samples):
        P = gen.random_spd(n, rng, scale=2.0)
        k, h = cartan_decompose(P)
        back = realize_point(k, h)
        checked += 1
        if float(np.abs(back.mat - P.mat).max()) > 1e-9 * (1.0 + float(np.abs(P.mat).max())):
            failures.append(f"roundtrip[{trial}]")
        y = gen.random_spd(n, rng, scale=1.5)
        checked += 1
        d = distance(P, y)
        if abs(distance(y, P) - d) > 1e-9 * (1.0 + d):
            failures.append(f"symmetry[{trial}]")
    return SuiteReport("kak", not failures, checked, tuple(failures[:10]), {"n": n})


def stab_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """Stabilizer monotonicity plus the minimal-face characterization against
    an exhaustive scan over all faces."""
    rng = subrng(cfg.seed, _TASK_STAB)
    failures: list[str] = []
    checked = 0
    faces = gen.all_faces(n)
    for small, large in combinations(faces, 2):
        if not small.issubset(large):
            continue
        for _ in range(8):
            s = gen.random_stab_element(small, n, rng)
            checked += 1
            if not in_stab(s, large, tol=1e-8):
                failures.append(f"monotonicity {small!r} <= {large!r}")
    for trial in range(cfg.samples // 2):
        q = gen.random_stab_element(faces[int(rng.integers(len(faces)))], n, rng)
        containing = [J for J in faces if in_stab(q, J, tol=1e-8)]
        got = minimal_face(q, tol=1e-8)
        checked += 1
        if got not in containing:
            failures.append(f"minimal_face[{trial}]: not in its own stabilizer")
        if any(not got.issubset(J) for J in containing):
            failures.append(f"minimal_face[{trial}]: not minimal")
    return SuiteReport("stab", not failures, checked, tuple(failures[:10]), {"n": n})


def kernel_conditions_suite(cfg: Config, n: int = 3) -> SuiteReport:
    """Condition harnesses for the configured kernel family: the distance
    splitting sign check, the Lipschitz estimate against its operator-norm
    bound, and the ray-pair constant against the Lipschitz constant."""
    spec = bu.KernelSpec(n, cfg.kernel)
    c1 = bu.check_condition1(spec, cfg)
    lip = bu.check_lipschitz(spec, cfg)
    c3 = bu.check_condition3(spec, cfg)
    failures: list[str] = []
    if lip.estimate > lip.upper_bound * (1.0 + 1e-9):
        failures.append("lipschitz estimate exceeds the operator-norm bound")
    if not cfg.literal_condition3 and c3.estimate > lip.estimate * (1.0 + 1e-9):
        failures.append("ray-pair constant exceeds the lipschitz constant")
    details = {
        "family": cfg.kernel,
        "n": n,
        "condition1_holds": c1.holds,
        "lipschitz": lip.estimate,
        "lipschitz_bound": lip.upper_bound,
        "condition3": c3.estimate,
    }
    checked = c1.checked + lip.budget + c3.budget
    return SuiteReport("kernel-conditions", not failures, checked,
                       tuple(failures), details)


SUITES = {
    "stratified": stratified_suite,
    "intersections": intersection_suite,
    "refinement": refinement_suite,
    "class-structure": class_structure_suite,
    "rank1": rank_one_suite,
    "kak": kak_suite,
    "stab": stab_suite,
    "kernel-conditions": kernel_conditions_suite,
}


def run_suite(name: str, cfg: Config, n: int = 3) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise InputFormatError(
            f"unknown property {name!r}; choose from {sorted(SUITES)}") from None
    return fn(cfg) if name == "rank1" else fn(cfg, n=n)

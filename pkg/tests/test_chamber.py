"""Boundary models and limit classifiers on constructed chamber sequences."""

import numpy as np
import pytest

from weylbound import (
    ChamberVector,
    Config,
    DualCellIdeal,
    FaceIndex,
    Interior,
    IterLevel,
    IteratedIdeal,
    MartinIdeal,
    VisualIdeal,
    classify,
    face_of,
    finite_part_from,
    maxface,
    points_equal,
    root_values_of,
    vector_from_root_values,
)
from weylbound import generators as gen
from weylbound.chamber import scalar_trend
from weylbound.errors import ModelMismatchError, TooShortError

CHAMBER_MS = np.linspace(120.0, 4000.0, 420)


def unit_direction(vals, n=3):
    h = vector_from_root_values(vals, n)
    return ChamberVector(h / np.linalg.norm(h))


def test_finite_part_from_roots():
    # minimal-norm solution: face roots hit their values, the rest follows
    a = finite_part_from(FaceIndex([2]), [0.7], 3)
    np.testing.assert_allclose(root_values_of(a), [-0.35, 0.7], atol=1e-12)
    np.testing.assert_allclose(a, [0.0, 0.35, -0.35], atol=1e-12)
    assert abs(a.sum()) < 1e-12
    assert abs(a @ np.array([2.0, -1.0, -1.0])) < 1e-12  # face kernel
    full = finite_part_from(FaceIndex([1, 2]), [0.3, 0.5], 3)
    np.testing.assert_allclose(root_values_of(full), [0.3, 0.5], atol=1e-12)


def test_scalar_trend_kinds(cfg):
    settled = scalar_trend(2.0 + np.exp(-np.arange(40.0)), cfg)
    assert settled.kind == "cauchy"
    assert abs(settled.limit - 2.0) < 1e-9
    div = scalar_trend(100.0 * np.arange(1, 41), cfg)
    assert div.kind == "diverges" and div.sign == 1
    div = scalar_trend(-100.0 * np.arange(1, 41), cfg)
    assert div.kind == "diverges" and div.sign == -1
    osc = np.resize([0.0, 2500.0], 40)
    assert scalar_trend(osc, cfg).kind == "oscillates"
    with pytest.raises(TooShortError):
        scalar_trend(np.ones(5), cfg)


def test_classify_visual_exact_ray(cfg):
    L = unit_direction([2.0, 1.0])
    seq = gen.chamber_ray(L, CHAMBER_MS)
    v = classify(seq, "visual", cfg)
    assert v.converged
    assert isinstance(v.point, VisualIdeal)
    np.testing.assert_allclose(v.point.direction.h, L.h, atol=1e-9)


def test_classify_visual_with_secondary_growth(cfg):
    # sqrt-order drift biases the finite-window direction by O(1/sqrt(m))
    ccfg = cfg.replace(cauchy_tol=1e-3)
    seq = gen.profile_sequence(3, CHAMBER_MS, [1.0, 0.8], sqrts=[0.5, 0.3])
    v = classify(seq, "visual", ccfg)
    assert v.converged
    expected = VisualIdeal(unit_direction([1.0, 0.8]))
    assert points_equal(v.point, expected, tol=ccfg.limit_tol)


def test_classify_visual_on_face_ray(cfg):
    L = unit_direction([0.0, 1.5])
    seq = gen.chamber_ray(L, CHAMBER_MS)
    v = classify(seq, "visual", cfg)
    assert v.converged
    assert face_of(v.point.direction) == FaceIndex([1])


def test_classify_dualcell_frozen(cfg):
    seq = gen.profile_sequence(3, CHAMBER_MS, [1.0, 0.0], consts=[0.0, 0.7])
    v = classify(seq, "dualcell", cfg)
    assert v.converged
    expected = DualCellIdeal(FaceIndex([2]), finite_part_from(FaceIndex([2]), [0.7], 3))
    assert points_equal(v.point, expected, tol=1e-6)


def test_classify_martin_frozen(cfg):
    seq = gen.profile_sequence(3, CHAMBER_MS, [1.0, 0.0], consts=[0.0, 0.7])
    v = classify(seq, "martin", cfg)
    assert v.converged
    expected = MartinIdeal(FaceIndex([2]),
                           finite_part_from(FaceIndex([2]), [0.7], 3),
                           unit_direction([1.0, 0.0]))
    assert points_equal(v.point, expected, tol=1e-6)


def test_classify_martin_direction_unbiased_by_finite_part(cfg):
    # the finite part is removed before normalizing, so the recovered
    # direction is exact on a shifted ray
    L = unit_direction([1.0, 0.0])
    a = finite_part_from(FaceIndex([2]), [0.9], 3)
    seq = gen.chamber_ray(L, np.linspace(30.0, 2500.0, 300), finite=a)
    v = classify(seq, "martin", cfg)
    assert v.converged
    np.testing.assert_allclose(v.point.direction.h, L.h, atol=1e-8)
    np.testing.assert_allclose(v.point.finite_part, a, atol=1e-8)


def test_classify_iterated_two_scales():
    # alpha_1 ~ m while alpha_2 ~ sqrt(m): two peeled directions, no residue
    cfg = Config(cauchy_tol=1e-3, divergence_threshold=40.0)
    seq = gen.profile_sequence(3, np.linspace(400.0, 10000.0, 320),
                               [1.0, 0.0], sqrts=[0.0, 1.0])
    v = classify(seq, "iterated", cfg)
    assert v.converged
    assert isinstance(v.point, IteratedIdeal)
    assert len(v.point.levels) == 2
    u1 = np.array([2.0, -1.0, -1.0]) / np.sqrt(6.0)
    u2 = np.array([0.0, 1.0, -1.0]) / np.sqrt(2.0)
    np.testing.assert_allclose(v.point.levels[0].direction, u1, atol=1e-3)
    np.testing.assert_allclose(v.point.levels[1].direction, u2, atol=5e-2)
    assert float(np.linalg.norm(v.point.final_part)) < 5e-2
    expected = IteratedIdeal([IterLevel(FaceIndex.empty(), np.zeros(3), u1),
                              IterLevel(FaceIndex.empty(), np.zeros(3), u2)],
                             np.zeros(3))
    assert points_equal(v.point, expected, tol=5e-2)


def test_classify_bounded_sequence_is_interior(cfg):
    h = ChamberVector(np.array([0.8, 0.1, -0.9]))
    seq = [h] * 30
    for model in ("visual", "dualcell", "martin", "iterated"):
        v = classify(seq, model, cfg)
        assert v.converged, model
        assert isinstance(v.point, Interior)
        np.testing.assert_allclose(v.point.h.h, h.h, atol=1e-9)


def test_classify_oscillating_is_inconclusive(cfg):
    a = ChamberVector(vector_from_root_values([2000.0, 1.0], 3))
    b = ChamberVector(vector_from_root_values([1.0, 2000.0], 3))
    seq = [a, b] * 25
    for model in ("visual", "dualcell", "martin"):
        v = classify(seq, model, cfg)
        assert not v.converged, model


def test_maxface_refined_and_literal():
    a = finite_part_from(FaceIndex([1, 3]), [0.0, 0.4], 4)
    p = DualCellIdeal(FaceIndex([1, 3]), a)
    assert maxface(p) == FaceIndex([1])
    assert maxface(p, literal=True) == FaceIndex.empty()
    z = DualCellIdeal(FaceIndex([1, 3]), np.zeros(4))
    assert maxface(z) == FaceIndex([1, 3])
    assert maxface(z, literal=True) == FaceIndex([1, 3])


def test_maxface_visual_and_interior():
    L = unit_direction([0.0, 1.0])
    assert maxface(VisualIdeal(L)) == FaceIndex([1])
    h = ChamberVector(np.array([0.5, 0.5, -1.0]))
    assert maxface(Interior(h)) == FaceIndex([1])


def test_points_equal_semantics():
    L = unit_direction([1.0, 1.0])
    vis = VisualIdeal(L)
    mar = MartinIdeal(FaceIndex.empty(), np.zeros(3), L)
    with pytest.raises(ModelMismatchError):
        points_equal(vis, mar)
    h = Interior(ChamberVector(np.array([1.0, 0.0, -1.0])))
    assert not points_equal(h, vis)
    assert points_equal(vis, VisualIdeal(L))


def test_martin_ideal_validates_direction_face():
    # the direction must vanish on the bounded roots
    L = unit_direction([1.0, 1.0])
    with pytest.raises(Exception):
        MartinIdeal(FaceIndex([2]), finite_part_from(FaceIndex([2]), [0.3], 3), L)


def test_classify_rejects_short_sequences(cfg):
    h = ChamberVector(np.array([1.0, 0.0, -1.0]))
    with pytest.raises(TooShortError):
        classify([h] * 4, "visual", cfg)

"""Glued-quotient equivalence, group actions and class structure."""

import numpy as np
import pytest

from weylbound import (
    ChamberVector,
    FaceIndex,
    Interior,
    MartinIdeal,
    QuotientPoint,
    Rotation,
    VisualIdeal,
    distance,
    equivalent,
    face_of,
    in_stab,
    k_act,
    maxface,
    realize,
    realize_point,
    spd_act,
    vector_from_root_values,
)
from weylbound import generators as gen
from weylbound.errors import (
    DimensionMismatchError,
    IdealPointError,
    ModelMismatchError,
)


def interior_point(k, vals, n=3):
    return QuotientPoint(k, Interior(ChamberVector(vector_from_root_values(vals, n))))


def test_equivalent_under_stab_dressing(rng):
    for _ in range(30):
        face = gen.all_faces(3)[int(rng.integers(4))]
        h = gen.random_chamber_vector(3, rng, face=face)
        k = gen.random_rotation(3, rng)
        p = QuotientPoint(k, Interior(h))
        s = gen.random_stab_element(face_of(h), 3, rng)
        q = QuotientPoint(k @ s, Interior(h))
        assert equivalent(p, q, tol=1e-8)
        np.testing.assert_allclose(realize(p).mat, realize(q).mat, atol=1e-9)


def test_generic_rotation_leaves_class(rng):
    h = gen.random_chamber_vector(3, rng)  # regular: trivial stabilizer up to signs
    k = gen.random_rotation(3, rng)
    p = QuotientPoint(k, Interior(h))
    g = gen.random_rotation(3, rng)
    if not in_stab(k.transpose() @ (g @ k), face_of(h), tol=1e-6):
        assert not equivalent(p, QuotientPoint(g @ k, Interior(h)), tol=1e-8)


def test_interior_equivalence_matches_matrix_equality(rng):
    agree = 0
    trials = 60
    for t in range(trials):
        h = gen.random_chamber_vector(3, rng)
        k = gen.random_rotation(3, rng)
        p = QuotientPoint(k, Interior(h))
        if t % 2 == 0:
            q = QuotientPoint(k @ gen.random_stab_element(face_of(h), 3, rng),
                              Interior(h))
        else:
            q = QuotientPoint(gen.random_rotation(3, rng),
                              Interior(gen.random_chamber_vector(3, rng)))
        same_class = equivalent(p, q, tol=1e-8)
        same_matrix = float(np.abs(realize(p).mat - realize(q).mat).max()) <= 1e-8
        agree += same_class == same_matrix
    assert agree == trials


def test_k_act_composition_and_equivariance(rng):
    p = interior_point(gen.random_rotation(3, rng), [0.6, 1.1])
    g1, g2 = gen.random_rotation(3, rng), gen.random_rotation(3, rng)
    lhs = k_act(g1, k_act(g2, p))
    rhs = k_act(g1 @ g2, p)
    np.testing.assert_allclose(lhs.k.mat, rhs.k.mat, atol=1e-12)
    # the action preserves class equality
    q = QuotientPoint(p.k @ gen.random_stab_element(maxface(p.x), 3, rng), p.x)
    assert equivalent(k_act(g1, p), k_act(g1, q), tol=1e-8)


def test_realize_matches_realize_point(rng):
    k = gen.random_rotation(3, rng)
    h = gen.random_chamber_vector(3, rng)
    p = QuotientPoint(k, Interior(h))
    np.testing.assert_allclose(realize(p).mat, realize_point(k, h).mat, atol=1e-12)
    ideal = QuotientPoint(k, VisualIdeal(gen.random_unit_direction(3, rng)))
    with pytest.raises(IdealPointError):
        realize(ideal)


def test_spd_act_is_isometric(rng):
    for _ in range(20):
        x, y = gen.random_spd(3, rng), gen.random_spd(3, rng)
        v = rng.normal(size=3)
        v -= v.mean()
        g = (gen.random_rotation(3, rng).mat
             @ np.diag(np.exp(v)) @ gen.random_rotation(3, rng).mat)
        d0 = distance(x, y)
        d1 = distance(spd_act(g, x), spd_act(g, y))
        assert abs(d1 - d0) < 1e-8 * (1.0 + d0)


def test_spd_act_rejects_non_unimodular(rng):
    x = gen.random_spd(3, rng)
    with pytest.raises(Exception):
        spd_act(2.0 * np.eye(3), x)


def test_equivalent_error_paths(rng):
    L = gen.random_unit_direction(3, rng)
    k = gen.random_rotation(3, rng)
    vis = QuotientPoint(k, VisualIdeal(L))
    mar = QuotientPoint(k, MartinIdeal(FaceIndex.empty(), np.zeros(3), L))
    with pytest.raises(ModelMismatchError):
        equivalent(vis, mar)
    with pytest.raises(DimensionMismatchError):
        equivalent(vis, interior_point(Rotation.identity(4), [1.0, 1.0, 1.0], 4))
    with pytest.raises(DimensionMismatchError):
        QuotientPoint(Rotation.identity(4), VisualIdeal(L))


def test_rank_one_circle_identifications():
    L = ChamberVector(np.array([1.0, -1.0]) / np.sqrt(2.0))
    p = QuotientPoint(gen.givens_rotation(2, 1, 2, 0.3), VisualIdeal(L))
    antipode = QuotientPoint(gen.givens_rotation(2, 1, 2, 0.3 + np.pi), VisualIdeal(L))
    quarter = QuotientPoint(gen.givens_rotation(2, 1, 2, 0.3 + np.pi / 2), VisualIdeal(L))
    assert equivalent(p, antipode, tol=1e-9)  # rotation by pi is -Id, a sign matrix
    assert not equivalent(p, quarter, tol=1e-9)


def test_ideal_class_dressing_uses_maxface(rng):
    # visual class on a wall: dressing by the wall stabilizer glues
    L = gen.random_unit_direction(3, rng, face=FaceIndex([1]))
    k = gen.random_rotation(3, rng)
    p = QuotientPoint(k, VisualIdeal(L))
    s = gen.random_stab_element(FaceIndex([1]), 3, rng)
    assert equivalent(p, QuotientPoint(k @ s, VisualIdeal(L)), tol=1e-8)
    g = gen.givens_rotation(3, 2, 3, 0.4)  # stabilizes {2}, not {1}
    if not in_stab(k.transpose() @ (g @ k), FaceIndex([1]), tol=1e-6):
        assert not equivalent(p, QuotientPoint(g @ k, VisualIdeal(L)), tol=1e-8)

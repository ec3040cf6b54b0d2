"""Core decomposition, chamber geometry and stabilizer tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylbound import (
    ChamberVector,
    FaceIndex,
    Rotation,
    SpdPoint,
    cartan_decompose,
    distance,
    face_of,
    face_partition,
    generalized_radius,
    in_stab,
    minimal_face,
    origin,
    realize_point,
    root_values,
    root_values_of,
    vector_from_root_values,
)
from weylbound import generators as gen
from weylbound.errors import DetNotOneError, NotChamberError, NotOrthogonalError


def test_chamber_vector_validation():
    ChamberVector(np.array([1.0, 0.0, -1.0]))
    with pytest.raises(NotChamberError):
        ChamberVector(np.array([0.0, 1.0, -1.0]))  # not weakly decreasing
    with pytest.raises(NotChamberError):
        ChamberVector(np.array([1.0, 0.0, 0.0]))  # trace not zero


def test_spd_point_validation():
    with pytest.raises(DetNotOneError):
        SpdPoint(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(NotOrthogonalError):
        Rotation(np.array([[1.0, 0.2], [0.0, 1.0]]))


def test_root_values_frozen():
    h = ChamberVector(np.array([1.0, 0.0, -1.0]))
    np.testing.assert_allclose(root_values(h), [1.0, 1.0])
    assert face_of(h) == FaceIndex.empty()
    hw = ChamberVector(np.array([1.0, 1.0, -2.0]))
    np.testing.assert_allclose(root_values(hw), [0.0, 3.0])
    assert face_of(hw) == FaceIndex([1])
    assert face_of(ChamberVector(np.zeros(3))) == FaceIndex.full(3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 50.0), min_size=1, max_size=7))
def test_root_coordinates_roundtrip(vals):
    n = len(vals) + 1
    h = vector_from_root_values(vals, n)
    assert abs(h.sum()) < 1e-9 * (1.0 + np.abs(h).max())
    np.testing.assert_allclose(root_values_of(h), vals, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_cartan_roundtrip_property(n, seed):
    r = np.random.default_rng(seed)
    P = gen.random_spd(n, r, scale=2.0)
    k, h = cartan_decompose(P)
    back = realize_point(k, h)
    scale = 1.0 + float(np.abs(P.mat).max())
    assert float(np.abs(back.mat - P.mat).max()) < 1e-9 * scale


def test_cartan_radius_independent_of_frame(rng):
    # the chamber part is an invariant of the matrix, whatever k dressed it
    for _ in range(50):
        h = gen.random_chamber_vector(4, rng, scale=1.5)
        k1, k2 = gen.random_rotation(4, rng), gen.random_rotation(4, rng)
        _, h1 = cartan_decompose(realize_point(k1, h))
        _, h2 = cartan_decompose(realize_point(k2, h))
        np.testing.assert_allclose(h1.h, h2.h, atol=1e-9)
        np.testing.assert_allclose(h1.h, h.h, atol=1e-9)


def test_generalized_radius_frozen_example():
    x = origin(3)
    y = SpdPoint(np.diag([np.exp(2.0), 1.0, np.exp(-2.0)]))
    r = generalized_radius(x, y)
    np.testing.assert_allclose(r.h, [1.0, 0.0, -1.0], atol=1e-12)
    assert abs(distance(x, y) - np.sqrt(2.0)) < 1e-12


def test_distance_axioms(rng):
    for _ in range(25):
        x = gen.random_spd(3, rng)
        y = gen.random_spd(3, rng)
        z = gen.random_spd(3, rng)
        dxy = distance(x, y)
        assert dxy >= 0.0
        assert abs(distance(y, x) - dxy) < 1e-9 * (1.0 + dxy)
        assert distance(x, z) <= dxy + distance(y, z) + 1e-9
    x = gen.random_spd(3, rng)
    assert distance(x, x) < 1e-7


def test_generalized_radius_antisymmetry(rng):
    # swapping the arguments flips and reverses the radius vector
    for _ in range(20):
        x, y = gen.random_spd(3, rng), gen.random_spd(3, rng)
        rxy = generalized_radius(x, y).h
        ryx = generalized_radius(y, x).h
        np.testing.assert_allclose(ryx, -rxy[::-1], atol=1e-8)


def test_face_partition_blocks():
    part = face_partition(FaceIndex([1, 3]), 4)
    assert part.blocks == ((1, 2), (3, 4))
    part = face_partition(FaceIndex.empty(), 3)
    assert part.blocks == ((1,), (2,), (3,))
    part = face_partition(FaceIndex.full(4), 4)
    assert part.blocks == ((1, 2, 3, 4),)


def test_in_stab_block_examples():
    # a rotation inside the {2,3} block stabilizes exactly the faces with 2
    q = gen.givens_rotation(3, 2, 3, 0.7)
    assert in_stab(q, FaceIndex([2]))
    assert in_stab(q, FaceIndex.full(3))
    assert not in_stab(q, FaceIndex([1]))
    assert not in_stab(q, FaceIndex.empty())
    assert minimal_face(q) == FaceIndex([2])

    flip = Rotation(np.diag([1.0, -1.0, -1.0]))
    assert in_stab(flip, FaceIndex([2]))
    assert in_stab(flip, FaceIndex.empty())
    assert minimal_face(flip) == FaceIndex.empty()


def test_minimal_face_matches_exhaustive_scan(rng):
    faces = gen.all_faces(3)
    for _ in range(60):
        q = gen.random_stab_element(faces[int(rng.integers(len(faces)))], 3, rng)
        containing = [J for J in faces if in_stab(q, J)]
        got = minimal_face(q)
        assert got in containing
        assert all(got.issubset(J) for J in containing)


def test_stab_monotonicity(rng):
    faces = gen.all_faces(4)
    for small in faces:
        for large in faces:
            if not small.issubset(large):
                continue
            for _ in range(5):
                s = gen.random_stab_element(small, 4, rng)
                assert in_stab(s, large)


def test_face_index_set_operations():
    a, b = FaceIndex([1, 3]), FaceIndex([3])
    assert b.issubset(a)
    assert not a.issubset(b)
    assert a.union(FaceIndex([2])) == FaceIndex.full(4)
    assert list(FaceIndex([3, 1])) == [1, 3]
    with pytest.raises(Exception):
        FaceIndex([0]).validate_for(3)

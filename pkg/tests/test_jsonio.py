"""JSON encoding and parsing round-trips."""

import json

import numpy as np
import pytest

from weylbound import (
    ChamberVector,
    DualCellIdeal,
    FaceIndex,
    Interior,
    IterLevel,
    IteratedIdeal,
    MartinIdeal,
    QuotientPoint,
    VisualIdeal,
    equivalent,
    finite_part_from,
    points_equal,
)
from weylbound import generators as gen
from weylbound import jsonio
from weylbound.errors import InputFormatError


def unit(vals, n=3):
    h = np.asarray(vals, dtype=float)
    return ChamberVector(h / np.linalg.norm(h))


def all_variant_points():
    L = unit([1.0, 0.0, -1.0])
    face = FaceIndex([2])
    a = finite_part_from(face, [0.4], 3)
    wall = unit([2.0, -1.0, -1.0])
    u2 = np.array([0.0, 1.0, -1.0]) / np.sqrt(2.0)
    return [
        Interior(ChamberVector(np.array([0.7, 0.1, -0.8]))),
        VisualIdeal(L),
        DualCellIdeal(face, a),
        MartinIdeal(face, a, wall),
        IteratedIdeal([IterLevel(FaceIndex.empty(), np.zeros(3), wall.h),
                       IterLevel(FaceIndex.empty(), np.zeros(3), u2)],
                      np.zeros(3)),
    ]


def test_chamber_point_roundtrip_all_variants():
    for p in all_variant_points():
        payload = json.loads(jsonio.dumps(jsonio.encode_chamber_point(p)))
        q = jsonio.parse_chamber_point(payload, "test")
        assert points_equal(p, q, tol=1e-12), p.variant


def test_quotient_point_roundtrip(rng):
    k = gen.random_rotation(3, rng)
    for p in all_variant_points():
        qp = QuotientPoint(k, p)
        payload = json.loads(jsonio.dumps(jsonio.encode_quotient_point(qp)))
        back = jsonio.parse_quotient_point(payload, "test")
        assert equivalent(qp, back, tol=1e-9), p.variant


def test_to_plain_preserves_scalar_types():
    plain = jsonio.to_plain({
        "flag": np.True_,
        "count": np.int64(3),
        "x": np.float64(0.5),
        "vec": np.arange(3.0),
        "face": FaceIndex([1, 2]),
        "ok": False,
    })
    assert plain["flag"] is True
    assert plain["ok"] is False
    assert isinstance(plain["count"], int) and not isinstance(plain["count"], bool)
    assert plain["vec"] == [0.0, 1.0, 2.0]
    assert plain["face"] == [1, 2]


def test_dumps_is_sorted_and_stable():
    a = jsonio.dumps({"b": 1, "a": [1, 2]})
    b = jsonio.dumps({"a": [1, 2], "b": 1})
    assert a == b
    assert a.endswith("\n")


def test_write_json_atomic_and_identical(tmp_path):
    target = tmp_path / "out.json"
    payload = {"values": list(range(5)), "name": "x"}
    jsonio.write_json(str(target), payload)
    first = target.read_bytes()
    jsonio.write_json(str(target), payload)
    assert target.read_bytes() == first
    assert json.loads(first) == payload
    leftovers = [p for p in tmp_path.iterdir() if p.name != "out.json"]
    assert leftovers == []


def test_load_json_error_reporting(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"a\": [1,\n 2,,]}\n")
    with pytest.raises(InputFormatError) as exc:
        jsonio.load_json(str(bad))
    assert "line" in str(exc.value)
    with pytest.raises(InputFormatError):
        jsonio.load_json(str(tmp_path / "missing.json"))
    top = tmp_path / "top.json"
    top.write_text("[1, 2]\n")
    with pytest.raises(InputFormatError):
        jsonio.load_json(str(top))


def test_parse_spd_rejects_bad_matrices():
    with pytest.raises(InputFormatError):
        jsonio.parse_spd({"matrix": [[2.0, 0.0], [0.0, 1.0]]}, "test")
    with pytest.raises(InputFormatError):
        jsonio.parse_spd({"matrix": [[1.0, 0.5], [0.4, 1.0]]}, "test")
    with pytest.raises(InputFormatError):
        jsonio.parse_spd({}, "test")
    with pytest.raises(InputFormatError):
        jsonio.parse_spd({"matrix": [[np.inf, 0.0], [0.0, 1.0]]}, "test")


def test_parse_chamber_sequence_reports_term_context():
    payload = {"vectors": [[1.0, 0.0, -1.0], [0.0, 1.0, -1.0]]}
    with pytest.raises(InputFormatError) as exc:
        jsonio.parse_chamber_sequence(payload, "seq")
    assert "1" in str(exc.value)  # the offending index is named


def test_parse_chamber_point_rejects_unknown_variant():
    with pytest.raises(InputFormatError):
        jsonio.parse_chamber_point({"variant": "polar"}, "test")
    with pytest.raises(InputFormatError):
        jsonio.parse_chamber_point({"variant": "iterated", "levels": [17],
                                    "final_part": [0.0, 0.0, 0.0]}, "test")

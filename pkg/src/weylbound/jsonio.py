"""JSON encoding and parsing for CLI payloads.

Encoders produce plain dicts of python scalars and lists; `dumps` renders
them with sorted keys so identical inputs give byte-identical output files.
Parsers raise InputFormatError with the offending file and key in the message.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .chamber import (
    ChamberPoint,
    DualCellIdeal,
    Interior,
    IterLevel,
    IteratedIdeal,
    MartinIdeal,
    Verdict,
    VisualIdeal,
)
from .errors import InputFormatError, InvariantViolation
from .fundseq import FundamentalReport, LimitResult
from .liecore import ChamberVector, FaceIndex, Rotation, SpdPoint
from .quotient import QuotientPoint


def to_plain(obj):
    """Recursively convert numpy scalars/arrays and domain atoms to JSON types."""
    if isinstance(obj, (bool, np.bool_)):  # before int: bool subclasses int
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, FaceIndex):
        return list(obj.roots)
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    return obj


def encode_matrix(mat: np.ndarray) -> list:
    return to_plain(np.asarray(mat, dtype=float))


def encode_chamber_point(p: ChamberPoint) -> dict:
    if isinstance(p, Interior):
        return {"variant": "interior", "h": to_plain(p.h.h)}
    if isinstance(p, VisualIdeal):
        return {"variant": "visual", "direction": to_plain(p.direction.h)}
    if isinstance(p, DualCellIdeal):
        return {"variant": "dualcell", "face": to_plain(p.face),
                "finite_part": to_plain(p.finite_part)}
    if isinstance(p, MartinIdeal):
        return {"variant": "martin", "face": to_plain(p.face),
                "finite_part": to_plain(p.finite_part),
                "direction": to_plain(p.direction.h)}
    if isinstance(p, IteratedIdeal):
        return {"variant": "iterated",
                "levels": [{"face": to_plain(lv.face),
                            "finite_part": to_plain(lv.finite_part),
                            "direction": to_plain(lv.direction)}
                           for lv in p.levels],
                "final_part": to_plain(p.final_part)}
    raise InputFormatError(f"cannot encode {type(p).__name__} as a chamber point")


def encode_quotient_point(p: QuotientPoint) -> dict:
    return {"k": encode_matrix(p.k.mat), "x": encode_chamber_point(p.x)}


def encode_verdict(v: Verdict) -> dict:
    return {
        "outcome": v.outcome,
        "point": None if v.point is None else encode_chamber_point(v.point),
        "diagnostics": [d.to_json() for d in v.diagnostics],
        "norm_trend": v.norm_trend.to_json(),
        "note": v.note,
    }


def encode_limit_result(res: LimitResult) -> dict:
    return {
        "status": res.status,
        "limit": None if res.limit is None else encode_quotient_point(res.limit),
        "filters": [{"name": f.name, "size": f.size, "fundamental": f.fundamental,
                     "k_cauchy": f.k_cauchy, "outcome": f.outcome, "note": f.note}
                    for f in res.filters],
        "note": res.note,
    }


def encode_fundamental_report(rep: FundamentalReport) -> dict:
    return {
        "fundamental": rep.fundamental,
        "k_cauchy": rep.k_cauchy,
        "verdict": encode_verdict(rep.verdict),
        "limit": None if rep.limit is None else encode_quotient_point(rep.limit),
    }


def dumps(payload: dict) -> str:
    return json.dumps(to_plain(payload), indent=2, sort_keys=True) + "\n"


def write_json(path: str, payload: dict) -> None:
    """Atomic write: a temp file in the target directory, then rename."""
    text = dumps(payload)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc.strerror or exc}") from exc
    if not isinstance(payload, dict):
        raise InputFormatError(f"{path}: top level must be a JSON object")
    return payload


def _require(payload: dict, key: str, where: str):
    if key not in payload:
        raise InputFormatError(f"{where}: missing key {key!r}")
    return payload[key]


def _as_array(value, where: str, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"{where}: not numeric: {exc}") from exc
    if arr.ndim != ndim or arr.size == 0:
        raise InputFormatError(
            f"{where}: expected a {'vector' if ndim == 1 else 'matrix'}, "
            f"got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputFormatError(f"{where}: entries must be finite")
    return arr


def parse_vector(payload: dict, where: str, key: str = "vector") -> np.ndarray:
    return _as_array(_require(payload, key, where), f"{where}[{key}]", 1)


def parse_matrix(payload: dict, where: str, key: str = "matrix") -> np.ndarray:
    return _as_array(_require(payload, key, where), f"{where}[{key}]", 2)


def parse_spd(payload: dict, where: str, key: str = "matrix") -> SpdPoint:
    mat = parse_matrix(payload, where, key)
    try:
        return SpdPoint(mat)
    except InvariantViolation as exc:
        raise InputFormatError(f"{where}[{key}]: {exc}") from exc


def parse_rotation(payload: dict, where: str, key: str = "matrix") -> Rotation:
    mat = parse_matrix(payload, where, key)
    try:
        return Rotation(mat)
    except InvariantViolation as exc:
        raise InputFormatError(f"{where}[{key}]: {exc}") from exc


def parse_spd_sequence(payload: dict, where: str) -> list[SpdPoint]:
    raw = _require(payload, "matrices", where)
    if not isinstance(raw, list) or not raw:
        raise InputFormatError(f"{where}[matrices]: expected a non-empty list")
    out = []
    for i, item in enumerate(raw):
        mat = _as_array(item, f"{where}[matrices][{i}]", 2)
        try:
            out.append(SpdPoint(mat))
        except InvariantViolation as exc:
            raise InputFormatError(f"{where}[matrices][{i}]: {exc}") from exc
    return out


def parse_chamber_sequence(payload: dict, where: str) -> list[ChamberVector]:
    raw = _require(payload, "vectors", where)
    if not isinstance(raw, list) or not raw:
        raise InputFormatError(f"{where}[vectors]: expected a non-empty list")
    out = []
    for i, item in enumerate(raw):
        vec = _as_array(item, f"{where}[vectors][{i}]", 1)
        try:
            out.append(ChamberVector(vec, tol=1e-6))
        except InvariantViolation as exc:
            raise InputFormatError(f"{where}[vectors][{i}]: {exc}") from exc
    return out


def _parse_face(value, where: str) -> FaceIndex:
    if not isinstance(value, list):
        raise InputFormatError(f"{where}: face must be a list of root indices")
    try:
        return FaceIndex(value)
    except (InvariantViolation, TypeError, ValueError) as exc:
        raise InputFormatError(f"{where}: {exc}") from exc


def parse_chamber_point(payload: dict, where: str) -> ChamberPoint:
    variant = _require(payload, "variant", where)
    try:
        if variant == "interior":
            return Interior(ChamberVector(parse_vector(payload, where, "h"), tol=1e-6))
        if variant == "visual":
            return VisualIdeal(ChamberVector(
                parse_vector(payload, where, "direction"), tol=1e-6))
        if variant == "dualcell":
            return DualCellIdeal(_parse_face(_require(payload, "face", where), where),
                                 parse_vector(payload, where, "finite_part"),
                                 tol=1e-6)
        if variant == "martin":
            return MartinIdeal(_parse_face(_require(payload, "face", where), where),
                               parse_vector(payload, where, "finite_part"),
                               ChamberVector(parse_vector(payload, where, "direction"),
                                             tol=1e-6),
                               tol=1e-6)
        if variant == "iterated":
            raw = _require(payload, "levels", where)
            if not isinstance(raw, list) or not raw:
                raise InputFormatError(f"{where}[levels]: expected a non-empty list")
            levels = []
            for i, lv in enumerate(raw):
                lv_where = f"{where}[levels][{i}]"
                if not isinstance(lv, dict):
                    raise InputFormatError(f"{lv_where}: expected an object")
                levels.append(IterLevel(
                    _parse_face(_require(lv, "face", lv_where), lv_where),
                    parse_vector(lv, lv_where, "finite_part"),
                    parse_vector(lv, lv_where, "direction")))
            return IteratedIdeal(levels, parse_vector(payload, where, "final_part"))
    except InvariantViolation as exc:
        raise InputFormatError(f"{where}: {exc}") from exc
    raise InputFormatError(f"{where}: unknown variant {variant!r}")


def parse_quotient_point(payload: dict, where: str) -> QuotientPoint:
    k = parse_rotation(payload, where, key="k")
    x_payload = _require(payload, "x", where)
    if not isinstance(x_payload, dict):
        raise InputFormatError(f"{where}[x]: expected an object")
    x = parse_chamber_point(x_payload, f"{where}[x]")
    try:
        return QuotientPoint(k, x)
    except InvariantViolation as exc:
        raise InputFormatError(f"{where}: {exc}") from exc

"""Runtime configuration shared by classifiers, harnesses and the CLI.

All limit detection is finite-window and honest about it: a scalar sequence is
"Cauchy" when the oscillation over the trailing `window` samples is below
cauchy_tol * (1 + |last|), and "diverges" when the trailing window sits beyond
divergence_threshold with an increasing windowed extremum. Anything else is
inconclusive.

Two tolerances coexist on purpose. `tol` validates data and compares exactly
constructed objects. `limit_tol` compares classified limits, whose tail
estimates carry a bias of order (secondary growth / primary growth) from the
finite window; harness corpora are sized so that bias stays about an order of
magnitude under limit_tol while genuinely distinct limits stay well above it.

float64 range note: chamber-vector sequences may grow past the default
divergence_threshold = 1e3 freely, but matrix sequences exponentiate (P =
k e^{2H} k^T), so harnesses that classify matrices keep root values <= ~24 and
set a lower threshold. Exactly diagonal matrix sequences are exact at any
representable scale.

Seeding: every randomized task derives its generator as
numpy.random.default_rng((seed, *task_path)) where task_path is a fixed tuple
of small integers per harness; identical config implies identical streams.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .errors import InputFormatError

MODELS = ("visual", "dualcell", "martin", "iterated")
KERNEL_FAMILIES = ("F", "M", "K")


@dataclass(frozen=True)
class Config:
    tol: float = 1e-8
    cauchy_tol: float = 1e-4
    divergence_threshold: float = 1e3
    window: int = 10
    seed: int = 0
    model: str = "visual"
    kernel: str = "F"
    limit_tol: float = 5e-2
    cluster_radius: float = 0.5
    literal_maxface: bool = False
    literal_condition3: bool = False
    max_depth: int | None = None
    min_dist: float = 1e-3
    margin: float = 1e-3
    sample_radius: float = 2.0
    probe_count: int = 12
    probe_radius: float = 1.5
    func_tol: float = 0.1
    stab_tol: float = 2e-3
    samples: int = 200
    intersection_samples: int = 18
    refinement_pairs: int = 320
    class_samples: int = 100
    stratified_points: int = 50
    kernel_samples: int = 300

    def __post_init__(self):
        for name in ("tol", "cauchy_tol", "divergence_threshold", "limit_tol",
                     "cluster_radius", "min_dist", "margin", "sample_radius",
                     "probe_radius", "func_tol", "stab_tol"):
            if getattr(self, name) <= 0:
                raise InputFormatError(f"config field {name!r} must be positive")
        if self.window < 3:
            raise InputFormatError("config field 'window' must be at least 3")
        if self.model not in MODELS:
            raise InputFormatError(
                f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.kernel not in KERNEL_FAMILIES and self.kernel != "custom":
            raise InputFormatError(
                f"unknown kernel family {self.kernel!r}; expected one of "
                f"{KERNEL_FAMILIES + ('custom',)}")

    def replace(self, **kwargs) -> "Config":
        return dataclasses.replace(self, **kwargs)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, payload: dict) -> "Config":
        if not isinstance(payload, dict):
            raise InputFormatError("config payload must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise InputFormatError(f"unknown config fields: {unknown}")
        return cls(**payload)

    @classmethod
    def load(cls, path: str) -> "Config":
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
                f"{exc.msg}") from exc
        except OSError as exc:
            raise InputFormatError(f"{path}: {exc.strerror}") from exc
        return cls.from_json(payload)


def subrng(seed: int, *path: int) -> np.random.Generator:
    """Derived generator for one task; identical (seed, path) gives identical streams."""
    return np.random.default_rng((int(seed),) + tuple(int(p) for p in path))

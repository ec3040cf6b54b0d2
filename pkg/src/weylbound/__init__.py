"""Boundary models for the Weyl chamber of positive-definite unimodular
matrices, the glued quotient compactification over rotation frames, limit
classifiers for matrix sequences, and generalized distance kernels with
property-verification harnesses."""

from .busemann import (
    KernelSpec,
    busemann_profile,
    busemann_value,
    check_condition1,
    check_condition3,
    check_lipschitz,
    conjecture_experiment,
    family_components,
    flat_point,
    kernel_eval,
)
from .chamber import (
    DualCellIdeal,
    Interior,
    IteratedIdeal,
    IterLevel,
    MartinIdeal,
    Verdict,
    VisualIdeal,
    classify,
    finite_part_from,
    maxface,
    points_equal,
)
from .config import Config, subrng
from .fundseq import (
    FundamentalDecomposition,
    is_fundamental,
    limit_in_quotient,
    limit_of_decomposition,
    polar_sequence,
)
from .liecore import (
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
from .quotient import QuotientPoint, equivalent, k_act, realize, spd_act
from .verify import intersection_check, refinement_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "ChamberVector",
    "Config",
    "DualCellIdeal",
    "FaceIndex",
    "FundamentalDecomposition",
    "Interior",
    "IterLevel",
    "IteratedIdeal",
    "KernelSpec",
    "MartinIdeal",
    "QuotientPoint",
    "Rotation",
    "SpdPoint",
    "Verdict",
    "VisualIdeal",
    "busemann_profile",
    "busemann_value",
    "cartan_decompose",
    "check_condition1",
    "check_condition3",
    "check_lipschitz",
    "classify",
    "conjecture_experiment",
    "distance",
    "equivalent",
    "face_of",
    "face_partition",
    "family_components",
    "finite_part_from",
    "flat_point",
    "generalized_radius",
    "in_stab",
    "intersection_check",
    "is_fundamental",
    "k_act",
    "kernel_eval",
    "limit_in_quotient",
    "limit_of_decomposition",
    "maxface",
    "minimal_face",
    "origin",
    "points_equal",
    "polar_sequence",
    "realize",
    "realize_point",
    "refinement_report",
    "root_values",
    "root_values_of",
    "run_suite",
    "spd_act",
    "subrng",
    "vector_from_root_values",
]

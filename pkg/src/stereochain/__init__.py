"""Chained stereographic projection for dimensionality change.

The package moves point sets between dimensions one step at a time:
each downward step normalizes onto the unit sphere and projects from
the pole onto a hyperplane, and each upward step is the inverse
embedding.  Alongside the transforms it ships exact operation
counters, distortion reports, and a small CLI.
"""

from .bench import SweepResult, SweepRow, SweepSpec, compare_counts, run_sweep
from .chain import (
    NEAR_DUPLICATE_RAY_TOL,
    ChainTrace,
    DegeneratePolicy,
    DEFAULT_POLICY,
    OpCounter,
    increase_dataset,
    increase_point,
    itemized_ops_increase,
    predicted_ops_increase,
    predicted_ops_reduce,
    reduce_dataset,
    reduce_point,
)
from .dataio import (
    SCHEMA_VERSION,
    DatasetFileFormat,
    infer_format,
    make_report_doc,
    read_dataset,
    write_dataset,
    write_report_doc,
)
from .dataset import Dataset
from .distortion import (
    AngleDistortionReport,
    CircleImageReport,
    DistanceDistortionReport,
    angle_distortion,
    circle_image_check,
    distance_distortion,
    sample_sphere_circle,
    vertex_angle,
)
from .errors import (
    DatasetFormatError,
    DatasetIoError,
    DegenerateTripleError,
    EmptyCircleError,
    EmptyFileError,
    EmptyResultError,
    InfeasibleGridError,
    NonFiniteValueError,
    NormOverflowError,
    ParseError,
    PoleBandError,
    PoleProximityError,
    PoleRayError,
    RaggedRowsError,
    StereochainError,
    TooFewPointsError,
    ZeroVectorError,
)
from .sphere import (
    DEFAULT_TOLERANCES,
    ConformalityReport,
    SpherePoint,
    ToleranceConfig,
    angle_between,
    as_vector,
    conformality_check,
    inverse_conformality_check,
    normalize,
    stereo_lift,
    stereo_project,
    tangent_basis,
)

__version__ = "0.1.0"

__all__ = [
    "AngleDistortionReport",
    "ChainTrace",
    "CircleImageReport",
    "ConformalityReport",
    "DEFAULT_POLICY",
    "DEFAULT_TOLERANCES",
    "Dataset",
    "DatasetFileFormat",
    "DatasetFormatError",
    "DatasetIoError",
    "DegeneratePolicy",
    "DegenerateTripleError",
    "DistanceDistortionReport",
    "EmptyCircleError",
    "EmptyFileError",
    "EmptyResultError",
    "InfeasibleGridError",
    "NEAR_DUPLICATE_RAY_TOL",
    "NonFiniteValueError",
    "NormOverflowError",
    "OpCounter",
    "ParseError",
    "PoleBandError",
    "PoleProximityError",
    "PoleRayError",
    "RaggedRowsError",
    "SCHEMA_VERSION",
    "SpherePoint",
    "StereochainError",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "ToleranceConfig",
    "TooFewPointsError",
    "ZeroVectorError",
    "angle_between",
    "angle_distortion",
    "as_vector",
    "circle_image_check",
    "compare_counts",
    "conformality_check",
    "distance_distortion",
    "increase_dataset",
    "increase_point",
    "infer_format",
    "inverse_conformality_check",
    "itemized_ops_increase",
    "make_report_doc",
    "normalize",
    "predicted_ops_increase",
    "predicted_ops_reduce",
    "read_dataset",
    "reduce_dataset",
    "reduce_point",
    "run_sweep",
    "sample_sphere_circle",
    "stereo_lift",
    "stereo_project",
    "tangent_basis",
    "vertex_angle",
    "write_dataset",
    "write_report_doc",
]

"""Coupling distance between distributions on finite sets of different sizes,
and order reduction by aggregation."""

from .binpack import (
    OVERFLOW,
    PackingInstance,
    PackingResult,
    best_fit_overflow,
    best_fit_overstuff,
    exact_pack,
    mismatch,
)
from .core import (
    ConditionalMatrix,
    Distribution,
    JointDistribution,
    conditional_entropy,
    conditional_from_joint,
    entropy,
    joint_from_conditional,
    make_distribution,
    mutual_information,
    point_entropy,
    reverse_conditional,
    total_variation,
    uniform,
)
from .errors import (
    DegenerateInput,
    DimensionError,
    DimensionMismatch,
    DomainError,
    EmptyInput,
    EmptyInstance,
    InvalidPartition,
    NegativeComponent,
    NotNormalized,
    OverflowPresent,
    SizeCapExceeded,
    ValidationError,
    VoiError,
)
from .greedy import GreedyMmiTrace, RoundRecord, greedy_metric_bound
from .reduction import (
    Aggregation,
    aggregate,
    exact_reduce,
    greedy_reduce,
    is_aggregation,
    lemma2_profile,
    theorem9_check,
)
from .transport import MetricResult, closed_form_2x2, exact_metric, exact_n_by_2, f_u, vertex_joints

__version__ = "0.1.0"

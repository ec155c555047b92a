"""Sample compression schemes for finite classes: construction, validation and bounds."""
from .core import (
    FiniteClass,
    FiniteDistribution,
    Hypothesis,
    LabelUniverse,
    LossFunction,
    RealSample,
    Sample,
    empirical_risk,
    erm,
    is_realizable,
    true_risk,
)
from .errors import (
    BudgetExhausted,
    EmptySampleError,
    PreconditionError,
    SampleCompressionError,
    SchemeContractError,
    UnsupportedLossError,
    WeakLearnerViolation,
)
from .selection import CompressionOutput, SelectionScheme, apply, observed_size
from .dimensions import graph_dimension, vc_dimension
from .boost_compress import compress_realizable, erm_learner, boost_scheme, to_agnostic

__all__ = [
    "FiniteClass", "FiniteDistribution", "Hypothesis", "LabelUniverse", "LossFunction",
    "RealSample", "Sample", "empirical_risk", "erm", "is_realizable", "true_risk",
    "BudgetExhausted", "EmptySampleError", "PreconditionError", "SampleCompressionError",
    "SchemeContractError", "UnsupportedLossError", "WeakLearnerViolation",
    "CompressionOutput", "SelectionScheme", "apply", "observed_size",
    "graph_dimension", "vc_dimension",
    "compress_realizable", "erm_learner", "boost_scheme", "to_agnostic",
]

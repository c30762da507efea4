"""Non-uniform B-spline bases and dictionaries for sparse signal representation."""
from .adapt import CurvatureVariant, SampledSignal, adapt_partition, curvature_knots
from .bspline import SampledMatrix, SplineBasis, basis, eval_bspline, sample
from .dictionary import SplineDictionary, build_dictionary, cardinal_dictionary, span_rank
from .partition import (
    ExtendedPartition,
    Partition,
    clamped_extension,
    new_partition,
    round_robin_subpartitions,
    subdivide,
    uniform_partition,
    union_partitions,
)
from .pursuit import (
    AtomicDecomposition,
    PursuitProblem,
    boomp_prune,
    oomp,
    reconstruct,
    sparse_approximate,
    swap_refine,
)

__version__ = "0.1.0"

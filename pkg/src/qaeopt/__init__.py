"""Lossy compression of bipartite quantum states via tableau-search encoders.

The reduced state of one subsystem after a unitary encoding carries all but
the mutual information between the two halves of the encoded state; this
package searches regular Young tableaux for the permutation part of an
encoder minimizing that loss, exactly for small grids and with a two-phase
randomized search beyond.
"""

__version__ = "0.1.0"

from .exceptions import (
    CanonicalizationError,
    SearchSpaceTooLargeError,
    StateFileError,
    ValidationError,
)
from .qstate import (
    BipartiteDims,
    DensityMatrix,
    HermitianMatrix,
    Spectrum,
    apply_unitary,
    eigendecompose,
    mutual_information,
    nats_to_bits,
    partial_trace,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .tableau import (
    CanonicalizationResult,
    Permutation,
    ProbabilityTableau,
    YoungTableau,
    arrange,
    canonicalize_decreasing,
    count_regular,
    enumerate_regular,
    is_decreasing,
    is_regular,
    neighbors,
    random_regular,
    sort_within_columns,
    sort_within_rows,
    tableau_mutual_information,
)
from .search import (
    DEFAULT_EXHAUSTIVE_THRESHOLD,
    OptimizationResult,
    SearchConfig,
    breadth_first,
    depth_first,
    exhaustive_search,
    optimize,
)
from .pipeline import (
    CompressionReport,
    EncoderPlan,
    build_encoder,
    compress_reconstruct,
    generate_instance,
    haar_unitary,
    suboptimal_auxiliary_gap,
    theorem1_report,
    verify_theorem1,
)
from .statefile import StateFile, file_digest, load_statefile, save_statefile

__all__ = [
    "__version__",
    "BipartiteDims",
    "CanonicalizationError",
    "CanonicalizationResult",
    "CompressionReport",
    "DEFAULT_EXHAUSTIVE_THRESHOLD",
    "DensityMatrix",
    "EncoderPlan",
    "HermitianMatrix",
    "OptimizationResult",
    "Permutation",
    "ProbabilityTableau",
    "SearchConfig",
    "SearchSpaceTooLargeError",
    "Spectrum",
    "StateFile",
    "StateFileError",
    "ValidationError",
    "YoungTableau",
    "apply_unitary",
    "arrange",
    "breadth_first",
    "build_encoder",
    "canonicalize_decreasing",
    "compress_reconstruct",
    "count_regular",
    "depth_first",
    "eigendecompose",
    "enumerate_regular",
    "exhaustive_search",
    "file_digest",
    "generate_instance",
    "haar_unitary",
    "is_decreasing",
    "is_regular",
    "load_statefile",
    "mutual_information",
    "nats_to_bits",
    "neighbors",
    "optimize",
    "partial_trace",
    "random_regular",
    "relative_entropy",
    "save_statefile",
    "shannon_entropy",
    "sort_within_columns",
    "sort_within_rows",
    "suboptimal_auxiliary_gap",
    "tableau_mutual_information",
    "theorem1_report",
    "verify_theorem1",
    "von_neumann_entropy",
]

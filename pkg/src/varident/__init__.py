"""Generic identifiability of VAR(1) interaction graphs from the stationary covariance."""

from .errors import InputError, PreconditionError, SingularSystemError, VarIdentError
from .graph import (
    DirectedGraph,
    MaximalClassSet,
    SccDecomposition,
    comembership,
    comembership_pair_count,
    has_multi_edge,
    maximal_classes,
    rooted_spanning_tree_check,
    scc_decompose,
    sources,
)
from .identify import IdentifiabilityVerdict, identify_family, identify_pair, matroid_witness_check
from .jacobian import (
    Dimension,
    GenericRankReport,
    JacobianBundle,
    build_B,
    build_B_G,
    build_B_G_prime,
    commutation_matrix,
    dimension,
    extended_jacobian,
    generic_rank,
    matroid_independent,
    project_psi,
)
from .recovery import RecoveryReport, graphs_from_maxclasses, maxclasses_from_support, roundtrip_check
from .sim import (
    SampleBatch,
    empirical_covariance,
    recover_from_samples,
    sample_stationary,
    simulate_trajectory,
)
from .stationary import (
    StationaryCovariance,
    SupportPattern,
    VarParameters,
    sample_generic_parameters,
    solve_stationary,
    spectral_radius,
    support_of,
)

__version__ = "0.1.0"

"""equilift: bounded-degree graphs with a prescribed second eigenvalue of
growing multiplicity, built from random regular factors and 2-lifts, and the
equiangular line systems they induce."""

from ._kernels import BACKEND
from .equiangular import (
    GramEnsemble,
    LineSystem,
    LineVerification,
    SurdObstruction,
    extend_gram,
    extract_lines,
    gram_from_graph,
    surd_obstruction,
    verify_line_system,
)
from .factors import (
    ConcentrationReport,
    CyclePartition,
    FactorSample,
    FactorSearch,
    c_bound,
    concentration_stats,
    cycle_partition,
    decompose_even_into_cycles,
    enumerate_perfect_matchings,
    find_perfect_matching,
    sample_a_factor,
    sample_half_factor,
    select_concentrated_factor,
)
from .graphcore import (
    Graph,
    Signing,
    build_graph,
    check_graph_lift,
    connected_components,
    is_connected,
    read_graph,
    read_signing,
    regularity,
    two_lift,
    write_graph,
    write_signing,
)
from .lifts import (
    IncrementCertificate,
    ResourceCapExceeded,
    SigningCertificate,
    SigningSearchError,
    increment_multiplicity,
    ramanujan_lift_iterate,
    search_ramanujan_signing,
    signed_degree_matrix,
    signing_from_factors,
)
from .pipeline import (
    MatrixTriple,
    PipelineResult,
    PipelineStage,
    TripleReport,
    integer_triple,
    relaxed_integer_triple,
    run_pipeline,
    seed_graph,
    surd_triple,
    validate_triple,
)
from .spectral import (
    CertificationUnavailable,
    SpectralSummary,
    SpectralTarget,
    certify_multiplicity,
    eigen_sym,
    integer_nullity,
    max_quadform_2x2,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "Graph",
    "Signing",
    "build_graph",
    "regularity",
    "two_lift",
    "check_graph_lift",
    "connected_components",
    "is_connected",
    "read_graph",
    "write_graph",
    "read_signing",
    "write_signing",
    "SpectralSummary",
    "SpectralTarget",
    "CertificationUnavailable",
    "eigen_sym",
    "certify_multiplicity",
    "integer_nullity",
    "max_quadform_2x2",
    "CyclePartition",
    "FactorSample",
    "FactorSearch",
    "ConcentrationReport",
    "cycle_partition",
    "decompose_even_into_cycles",
    "find_perfect_matching",
    "enumerate_perfect_matchings",
    "sample_half_factor",
    "sample_a_factor",
    "c_bound",
    "select_concentrated_factor",
    "concentration_stats",
    "SigningCertificate",
    "IncrementCertificate",
    "SigningSearchError",
    "ResourceCapExceeded",
    "search_ramanujan_signing",
    "ramanujan_lift_iterate",
    "signing_from_factors",
    "signed_degree_matrix",
    "increment_multiplicity",
    "MatrixTriple",
    "TripleReport",
    "PipelineStage",
    "PipelineResult",
    "validate_triple",
    "integer_triple",
    "relaxed_integer_triple",
    "surd_triple",
    "seed_graph",
    "run_pipeline",
    "GramEnsemble",
    "LineSystem",
    "LineVerification",
    "SurdObstruction",
    "gram_from_graph",
    "extend_gram",
    "extract_lines",
    "surd_obstruction",
    "verify_line_system",
]

"""Numerical laboratory for finite-dimensional graded spectral triples.

Builds heat-kernel cochains of triples, the boundary and shuffle operations
on entire cyclic chains, and idempotent index pairings, then verifies the
multiplicativity identities tying them together to floating-point accuracy.
"""

from .chains import (
    Chain,
    ElementaryChain,
    TermBudgetError,
    br_operation,
    chain_from_json,
    chain_to_json,
    connes_B,
    cyclic_shuffle_product,
    entire_norm,
    hochschild_b,
    probe_distance,
    probe_functional,
    random_probes,
    shuffle_product,
)
from .jlo import (
    DegreeCapError,
    JLOEvaluator,
    NonConvergentError,
    NonIntegerIndexError,
    PairingReport,
    SimplexOrderError,
    bch_cochain,
    chern_idempotent,
    ddexp_cached,
    delta_perturbation,
    divided_diff_exp,
    get_evaluator,
    index_pairing,
    jlo_cochain,
    jlo_cochain_mc,
    jlo_integrand,
    perturbed_cochain,
    verify_theorem_ainf,
)
from .linalg import (
    GradedSpace,
    NonHermitianError,
    Parity,
    ParityError,
    frob,
    hermitian_eigen,
    kron,
    kron_all,
    matrix_from_json,
    matrix_to_json,
    opnorm,
    parity_of,
    supertrace,
)
from .randomgen import (
    random_chain,
    random_even,
    random_even_projection,
    random_odd_hermitian,
    random_triple,
)
from .shuffles import (
    SignedPermutation,
    SimplexPoint,
    cyclic_region_locate,
    enumerate_cyclic_shuffles,
    enumerate_shuffles,
    is_cyclic_shuffle,
    sample_simplex,
    sample_simplex_batch,
    shuffle_region_contains,
)
from .spectral import (
    Idempotent,
    NotIdempotentError,
    NotSelfAdjointError,
    SpectralGapWarning,
    SpectralTripleFD,
    TripleDiagnostics,
    ampliate,
    commutator_d,
    compress_by_idempotent,
    diagnose,
    idempotent_from_json,
    idempotent_to_json,
    index_of_pair,
    kernel_projection,
    mckean_singer_index,
    product_triple,
    triple_from_json,
    triple_to_json,
    validate_triple,
)
from .suites import (
    IDENTITIES,
    curated_index_pairs,
    format_report_rows,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "DegreeCapError",
    "ElementaryChain",
    "GradedSpace",
    "IDENTITIES",
    "Idempotent",
    "JLOEvaluator",
    "NonConvergentError",
    "NonHermitianError",
    "NonIntegerIndexError",
    "NotIdempotentError",
    "NotSelfAdjointError",
    "PairingReport",
    "Parity",
    "ParityError",
    "SignedPermutation",
    "SimplexOrderError",
    "SimplexPoint",
    "SpectralGapWarning",
    "SpectralTripleFD",
    "TermBudgetError",
    "TripleDiagnostics",
    "ampliate",
    "bch_cochain",
    "br_operation",
    "chain_from_json",
    "chain_to_json",
    "chern_idempotent",
    "commutator_d",
    "compress_by_idempotent",
    "connes_B",
    "curated_index_pairs",
    "cyclic_region_locate",
    "cyclic_shuffle_product",
    "ddexp_cached",
    "delta_perturbation",
    "diagnose",
    "divided_diff_exp",
    "entire_norm",
    "enumerate_cyclic_shuffles",
    "enumerate_shuffles",
    "format_report_rows",
    "frob",
    "get_evaluator",
    "hermitian_eigen",
    "hochschild_b",
    "idempotent_from_json",
    "idempotent_to_json",
    "index_of_pair",
    "index_pairing",
    "is_cyclic_shuffle",
    "jlo_cochain",
    "jlo_cochain_mc",
    "jlo_integrand",
    "kernel_projection",
    "kron",
    "kron_all",
    "matrix_from_json",
    "matrix_to_json",
    "mckean_singer_index",
    "opnorm",
    "parity_of",
    "perturbed_cochain",
    "probe_distance",
    "probe_functional",
    "product_triple",
    "random_chain",
    "random_even",
    "random_even_projection",
    "random_odd_hermitian",
    "random_probes",
    "random_triple",
    "run_suite",
    "sample_simplex",
    "sample_simplex_batch",
    "shuffle_product",
    "shuffle_region_contains",
    "supertrace",
    "triple_from_json",
    "triple_to_json",
    "validate_triple",
    "verify_theorem_ainf",
]

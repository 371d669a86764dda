"""Periodic (f-linked) random matrix ensembles and their complex companions."""

__version__ = "0.1.0"

from .linkfn import LinkFunction, block_circulant, eval_link, f1, f2, f3, parse_link_function
from .classes import (
    EntryClassMap,
    PairCompatibility,
    build_companion_classes,
    build_real_classes,
    pair_compatibility_table,
    wrapped_diagonal_index,
)
from .sampler import derive_stream, sample_companion_matrix, sample_real_matrix
from .spectral import (
    circulant_eigenvalues_oracle,
    hermitian_eigenvalues,
    histogram,
    normalized_spectrum,
    spectral_moment,
)
from .exact import (
    carleman_partial_sums,
    companion_moment_exact,
    enumerate_patterns,
    isserlis_expectation,
    limit_moment_via_matchings,
    moment_bound,
    paper_matching_count,
)

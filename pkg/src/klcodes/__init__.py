"""Robust prefix codes over relative-entropy uncertainty balls."""

from .core import (
    CodeLengths,
    Distribution,
    DivergenceBall,
    PrefixCode,
    binary_divergence,
    entropy,
    kl_divergence,
    kraft_sum,
    pinsker_upper,
    validate_distribution,
)
from .huffman import (
    canonical_codewords,
    exponential_huffman,
    exponential_huffman_log,
    huffman,
    max_huffman,
    shannon_lengths,
)
from .nml import (
    NmlResult,
    nml_distribution,
    nml_tv,
    pointwise_utility,
    robust_huffman_pointwise,
    robust_shannon_pointwise,
    solve_pi_k,
)
from .solver import (
    BetaSolveTrace,
    RobustCodeResult,
    existence_threshold,
    g_of_beta,
    solve_avg_redundancy,
    solve_gg,
)
from .tilted import (
    LimitPoint,
    TiltedPoint,
    avg_redundancy,
    decomposition_terms,
    exact_avg_sup,
    gg_utility,
    nu_circ,
    nu_infinity,
    tilted_root,
    xi,
)

__all__ = [
    "BetaSolveTrace",
    "CodeLengths",
    "Distribution",
    "DivergenceBall",
    "LimitPoint",
    "NmlResult",
    "PrefixCode",
    "RobustCodeResult",
    "TiltedPoint",
    "avg_redundancy",
    "binary_divergence",
    "canonical_codewords",
    "decomposition_terms",
    "entropy",
    "exact_avg_sup",
    "existence_threshold",
    "exponential_huffman",
    "exponential_huffman_log",
    "g_of_beta",
    "gg_utility",
    "huffman",
    "kl_divergence",
    "kraft_sum",
    "max_huffman",
    "nml_distribution",
    "nml_tv",
    "nu_circ",
    "nu_infinity",
    "pinsker_upper",
    "pointwise_utility",
    "robust_huffman_pointwise",
    "robust_shannon_pointwise",
    "shannon_lengths",
    "solve_avg_redundancy",
    "solve_gg",
    "solve_pi_k",
    "tilted_root",
    "validate_distribution",
    "xi",
]

__version__ = "0.1.0"

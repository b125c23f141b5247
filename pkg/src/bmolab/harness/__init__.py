"""Experiment layer: decompositions, decay fits, equivalence sweeps,
pointwise majorant checks, operator-norm probes, and the oscillation
reconstruction built from a reciprocal-kernel Fourier expansion."""

from .corpus import CorpusSpec, build_corpus, log_distance_function
from .czd import (
    CZDecomposition,
    JNDecayFit,
    cz_decompose,
    fit_exponential_decay,
    jn_decay_experiment,
    jn_levels,
    oscillation_distribution,
)
from .equivalence import (
    EQUIVALENCE_PAIRS,
    EquivalenceReport,
    equivalence_experiment,
    weak_embedding_bound,
    weak_embedding_constant,
)
from .opnorm import BilinearOp, commutator_operator, opnorm_lower_bound, plain_operator
from .reconstruction import (
    FourierExpansion,
    ReconstructionResult,
    expand_reciprocal_kernel,
    find_admissible_expansion,
    morrey_route_estimate,
    reconstruct_oscillation,
)
from .sharp import SharpBoundReport, check_pointwise_sharp_bound

__all__ = [
    "CorpusSpec",
    "build_corpus",
    "log_distance_function",
    "CZDecomposition",
    "JNDecayFit",
    "cz_decompose",
    "fit_exponential_decay",
    "jn_decay_experiment",
    "jn_levels",
    "oscillation_distribution",
    "EQUIVALENCE_PAIRS",
    "EquivalenceReport",
    "equivalence_experiment",
    "weak_embedding_bound",
    "weak_embedding_constant",
    "BilinearOp",
    "commutator_operator",
    "opnorm_lower_bound",
    "plain_operator",
    "FourierExpansion",
    "ReconstructionResult",
    "expand_reciprocal_kernel",
    "find_admissible_expansion",
    "morrey_route_estimate",
    "reconstruct_oscillation",
    "SharpBoundReport",
    "check_pointwise_sharp_bound",
]

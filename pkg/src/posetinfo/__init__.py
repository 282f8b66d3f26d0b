"""Information geometry of probability distributions on finite posets."""

from .coordinates import (
    Distribution,
    EtaCoords,
    ThetaCoords,
    check_orthogonality,
    eta_from_p,
    p_from_eta,
    p_from_theta,
    theta_from_p,
)
from .decomposition import (
    DecompositionTerm,
    Subvaluation,
    chain_decompose,
    entropy,
    entropy_decompose,
    information_gain,
    kl,
    poset_distance,
    pythagoras_split,
    subvaluation,
    weighted_covering_graph,
)
from .errors import PosetInfoError, SolverError, ValidationError
from .learning import (
    ClusteredDataset,
    IntVectorDataset,
    LearnedModel,
    TransactionDataset,
    learn_from_clusters,
    learn_from_int_vectors,
    learn_from_transactions,
)
from .mutual_info import (
    JointTable,
    RefinedMI,
    mi_chain_decompose,
    mixed_conditionals,
    mutual_information,
    refined_mi,
)
from .poset import CoveringGraph, Poset, build_poset, chain
from .projection import (
    DEFAULT_CONFIG,
    SolverConfig,
    SolverStats,
    e_project_knockdown,
    mix,
    mix_singleton,
)
from .scan import GainRow, gain_scan
from .significance import GTestResult, chi2_survival, g_test

__version__ = "0.1.0"

__all__ = [
    "ClusteredDataset",
    "CoveringGraph",
    "DEFAULT_CONFIG",
    "DecompositionTerm",
    "Distribution",
    "EtaCoords",
    "GTestResult",
    "GainRow",
    "IntVectorDataset",
    "JointTable",
    "LearnedModel",
    "Poset",
    "PosetInfoError",
    "RefinedMI",
    "SolverConfig",
    "SolverError",
    "SolverStats",
    "Subvaluation",
    "ThetaCoords",
    "TransactionDataset",
    "ValidationError",
    "build_poset",
    "chain",
    "chain_decompose",
    "check_orthogonality",
    "chi2_survival",
    "e_project_knockdown",
    "entropy",
    "entropy_decompose",
    "eta_from_p",
    "g_test",
    "gain_scan",
    "information_gain",
    "kl",
    "learn_from_clusters",
    "learn_from_int_vectors",
    "learn_from_transactions",
    "mi_chain_decompose",
    "mix",
    "mix_singleton",
    "mixed_conditionals",
    "mutual_information",
    "p_from_eta",
    "p_from_theta",
    "poset_distance",
    "pythagoras_split",
    "refined_mi",
    "subvaluation",
    "theta_from_p",
    "weighted_covering_graph",
    "__version__",
]

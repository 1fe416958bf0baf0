"""Local identifiability of discrete undirected graphical models with one
binary hidden node: structural classification, explicit singular-subspace
equations, and an independent numerical Jacobian-rank oracle."""

from .errors import (
    DimensionMismatchError,
    ExponentOverflowError,
    InconsistentSystemError,
    LatentIsolatedError,
    LatidentError,
    NotApplicableError,
    ParseError,
    UnsupportedModelError,
    ValidationError,
)
from .graph import (
    Graph,
    boundary_in,
    complement,
    complete_subsets,
    connected_components,
    induced_subgraph,
    is_connected,
    maximal_cliques,
)
from .identify import (
    SequenceCert,
    Status,
    Verdict,
    anchored_ordering,
    classify,
    find_generalized_sequence,
    find_identifying_sequence,
    latent_class_check,
    latent_partition,
)
from .loglinear import (
    LatentModel,
    ParamEntry,
    ParamIndex,
    build_param_index,
    cell_levels,
    design_matrix,
    marginalization_matrix,
)
from .numeric import (
    RankReport,
    generic_rank,
    jacobian,
    mu_y,
    numeric_rank,
    rank_on_system,
    sample_beta,
)
from .singular import (
    SingularEquation,
    SingularSystem,
    disconnection_equations,
    full_system,
    locus_equations_for_set,
    sample_on_subspace,
)
from .cli import parse_model, serialize_model

__all__ = [
    "DimensionMismatchError",
    "ExponentOverflowError",
    "Graph",
    "InconsistentSystemError",
    "LatentIsolatedError",
    "LatentModel",
    "LatidentError",
    "NotApplicableError",
    "ParamEntry",
    "ParamIndex",
    "ParseError",
    "RankReport",
    "SequenceCert",
    "SingularEquation",
    "SingularSystem",
    "Status",
    "UnsupportedModelError",
    "ValidationError",
    "Verdict",
    "anchored_ordering",
    "boundary_in",
    "build_param_index",
    "cell_levels",
    "classify",
    "complement",
    "complete_subsets",
    "connected_components",
    "design_matrix",
    "disconnection_equations",
    "find_generalized_sequence",
    "find_identifying_sequence",
    "full_system",
    "generic_rank",
    "induced_subgraph",
    "is_connected",
    "jacobian",
    "latent_class_check",
    "latent_partition",
    "locus_equations_for_set",
    "marginalization_matrix",
    "maximal_cliques",
    "mu_y",
    "numeric_rank",
    "parse_model",
    "rank_on_system",
    "sample_beta",
    "sample_on_subspace",
    "serialize_model",
]

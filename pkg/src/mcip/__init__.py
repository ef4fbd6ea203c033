"""Mutual conditional independence in Markov networks.

Graph utilities (maximal independent sets, cliques, separation), symbolic
conditional-independence relations, an exact joint-distribution oracle, and
log-linear and Gaussian inference built on mutual conditional independence.
"""

from .ci import (
    Axiom,
    CIStatement,
    MutualCIStatement,
    apply_axiom,
    global_query,
    local_relations,
    mcip_relations,
    pairwise_from_mcip,
    pairwise_relations,
    weak_union_expand,
)
from .chisquare import chi_square_quantile, chi_square_sf
from .exceptions import DegenerateFitError, InputError, MCIPError, NumericError, SingularMatrixError
from .gaussian import (
    DataMatrix,
    GaussianCITest,
    GaussianMCIPCheck,
    ci_test_gaussian,
    covariance,
    mcip_gaussian_check,
    partial_correlation,
)
from .graph import (
    UndirectedGraph,
    boundary,
    enumerate_maximal_cliques,
    enumerate_maximal_independent_sets,
    is_decomposable,
    is_independent_set,
    reconstruct_from_amis,
    separates,
)
from .loglinear import (
    ContingencyTable,
    FitResult,
    LogLinearModel,
    degrees_of_freedom,
    fit_decomposable,
    fit_ipf,
    fit_mcip,
    g2,
    marginal,
    pearson_x2,
)
from .joint_oracle import CliquePotential, JointTable, check_ci, check_mcip, from_clique_potentials, marginalize

__version__ = "0.1.0"

"""Python bindings for the kgsmile attribution library."""

from ._core import (
    Explanation,
    KgsmileError,
    KnowledgeGraph,
    Triple,
    __version__,
    chain_of_thought,
    classify_similarity,
    composite_similarity,
    cosine,
    embed,
    explain,
    fidelity,
    fit_bayesian_ridge,
    fit_wls,
    jaccard,
    pearson,
    population_stddev,
    roc_auc,
    tokenize,
    wasserstein,
)

__all__ = [
    "Explanation",
    "KgsmileError",
    "KnowledgeGraph",
    "Triple",
    "__version__",
    "chain_of_thought",
    "classify_similarity",
    "composite_similarity",
    "cosine",
    "embed",
    "explain",
    "fidelity",
    "fit_bayesian_ridge",
    "fit_wls",
    "jaccard",
    "pearson",
    "population_stddev",
    "roc_auc",
    "tokenize",
    "wasserstein",
]

"""Citation-based interdisciplinarity indicators for journals.

Core objects: a journal registry plus a sparse citation matrix (corpus),
per-vector inequality/entropy indicators, cosine/co-occurrence network
structures with betweenness centrality, quadratic-entropy diversity, and an
evaluation layer (rank correlations, descriptive statistics, rotated factor
analysis).
"""

from .centrality import (
    CentralityResult,
    betweenness,
    betweenness_all_variants,
    betweenness_variant_arrays,
    degree,
    normalize_betweenness,
)
from .corpus import (
    CitationMatrix,
    Direction,
    JournalRegistry,
    JournalVector,
    SubsetMode,
    load_edge_list,
    load_matrix_market,
    load_metadata,
    subset,
    vector,
)
from .diversity import DiversityResult, diversity_all, diversity_summary, rao_stirling
from .netspace import (
    BinaryGraph,
    SymmetricValueMatrix,
    binarize,
    binarize_directed,
    cooccurrence,
    cosine_matrix,
    distance_matrix,
    export_matrix_market,
    probability_normalize,
)
from .pipeline import RunConfig, compute_indicator_table, load_corpus, ranking
from .stats import (
    IndicatorTable,
    descriptive,
    pca,
    rank_column,
    spearman,
    spearman_matrix,
    varimax,
    varimax_criterion,
)
from .synth import BridgeSpec, GeneralistSpec, SyntheticSpec, generate, uniform_spec
from .vector_indicators import (
    VectorIndicatorResult,
    compute_vector_indicators,
    entropy_normalized,
    gini,
    gini_normalized,
    shannon_entropy,
)

__version__ = "0.1.0"

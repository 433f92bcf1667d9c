"""Geometry-weighted sentence embeddings from pre-trained word vectors.

Sentences are encoded as weighted sums of their word vectors: each word's
weight is derived from the QR geometry of its contextual window and from
its alignment with corpus principal directions, with optional
sentence-dependent removal of those directions from the final vector.
"""

__version__ = "0.1.0"

from .evalharness import (
    RankingCandidate,
    RankingQuery,
    SimilarityPair,
    average_precision,
    cosine,
    map_eval,
    parse_ranking,
    parse_sts,
    sts_eval,
)
from .errors import GembedError, ParseError
from .gemcore import (
    CorpusModel,
    CorpusStats,
    GemConfig,
    SentenceEmbedding,
    SentenceMatrix,
    WordScores,
    build_sentence_matrices,
    coarse_embedding,
    encode_corpus,
    encode_prepared,
    fit_corpus,
    remove_principal,
    rerank_select,
    sentence_embedding,
    window_matrix,
    word_scores,
)
from .linalg import (
    SvdResult,
    pearson,
    qr_decompose,
    residual_basis,
    svd_thin,
    top_left_singular,
)
from .textproc import TokenizerConfig, tokenize
from .vecstore import (
    OovPolicy,
    WordVectorStore,
    concat_stores,
    load_store,
    oov_index,
    resolve,
    save_store,
)

__all__ = [
    "__version__",
    "GembedError",
    "ParseError",
    "OovPolicy",
    "WordVectorStore",
    "concat_stores",
    "load_store",
    "oov_index",
    "resolve",
    "save_store",
    "TokenizerConfig",
    "tokenize",
    "SvdResult",
    "pearson",
    "qr_decompose",
    "residual_basis",
    "svd_thin",
    "top_left_singular",
    "CorpusModel",
    "CorpusStats",
    "GemConfig",
    "SentenceEmbedding",
    "SentenceMatrix",
    "WordScores",
    "build_sentence_matrices",
    "coarse_embedding",
    "encode_corpus",
    "encode_prepared",
    "fit_corpus",
    "remove_principal",
    "rerank_select",
    "sentence_embedding",
    "window_matrix",
    "word_scores",
    "RankingCandidate",
    "RankingQuery",
    "SimilarityPair",
    "average_precision",
    "cosine",
    "map_eval",
    "parse_ranking",
    "parse_sts",
    "sts_eval",
]

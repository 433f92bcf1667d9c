"""The geometric embedding pipeline.

A sentence is encoded as a weighted sum of its word vectors. Each word's
weight combines three geometry-derived scores computed from the QR
factorization of its contextual window matrix (novelty and significance)
and from the alignment of its novel direction with re-ranked corpus
principal directions (uniqueness). Optionally, the projection of the
sentence vector onto per-sentence selected corpus directions is removed.

Encoding is a two-phase computation over a corpus: phase one builds
coarse sentence embeddings and extracts corpus principal directions,
phase two scores words and assembles sentence vectors. Phase two is an
independent map over sentences, so results never depend on worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .linalg import residual_basis, svd_thin, top_left_singular
from .textproc import TokenizerConfig, tokenize
from .vecstore import OovPolicy, WordVectorStore, resolve

RerankMode = Literal["sigma", "plain"]
RemovalMode = Literal["sdr", "sir", "none"]


@dataclass(frozen=True)
class GemConfig:
    """Hyper-parameters of the pipeline.

    m: context window radius; k: number of candidate corpus principal
    directions; h: directions kept per sentence; t: exponent applied to
    singular values in the coarse embedding. ``rerank_mode`` weights the
    per-sentence direction correlation by the corpus singular value
    ("sigma") or not ("plain"); ``removal_mode`` picks sentence-dependent
    removal ("sdr"), sentence-independent removal of the top directions
    ("sir"), or no corpus directions at all ("none").
    """

    m: int = 7
    k: int = 45
    h: int = 17
    t: int = 3
    rerank_mode: RerankMode = "sigma"
    removal_mode: RemovalMode = "sdr"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 1 <= self.h <= self.k:
            raise ValueError(f"h must satisfy 1 <= h <= k, got h={self.h}, k={self.k}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.rerank_mode not in ("sigma", "plain"):
            raise ValueError(f"unknown rerank_mode: {self.rerank_mode!r}")
        if self.removal_mode not in ("sdr", "sir", "none"):
            raise ValueError(f"unknown removal_mode: {self.removal_mode!r}")


@dataclass(frozen=True)
class SentenceMatrix:
    """Resolved tokens of one sentence and the matrix of their vectors.

    Column j of ``matrix`` is exactly the vector of ``tokens[j]``.
    """

    tokens: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        if len(self.tokens) == 0:
            raise ValueError("a sentence needs at least one token")
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.tokens):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match {len(self.tokens)} tokens"
            )

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CorpusModel:
    """Candidate corpus principal directions with their singular values."""

    directions: np.ndarray  # (d, r) orthonormal columns
    values: np.ndarray  # (r,) non-increasing, non-negative

    def __len__(self) -> int:
        return self.directions.shape[1]

    @staticmethod
    def empty(dim: int) -> "CorpusModel":
        return CorpusModel(np.zeros((dim, 0)), np.zeros(0))


@dataclass(frozen=True)
class WordScores:
    """Per-word score breakdown; the word's weight is their sum."""

    novelty: float
    significance: float
    uniqueness: float

    @property
    def weight(self) -> float:
        return self.novelty + self.significance + self.uniqueness


@dataclass(frozen=True)
class SentenceEmbedding:
    """Final sentence vector, optionally with the per-word score breakdown."""

    vector: np.ndarray
    scores: tuple[WordScores, ...] | None = None


@dataclass
class CorpusStats:
    """Counters accumulated while resolving a corpus."""

    sentence_count: int = 0
    token_count: int = 0
    oov_count: int = 0
    empty_sentence_count: int = 0


def coarse_embedding(sentence: SentenceMatrix, t: int) -> np.ndarray:
    """Coarse sentence vector: sum of left singular vectors scaled by sigma^t.

    For sentences longer than the vector dimension the thin SVD yields d
    terms and the sum simply runs over those.
    """
    result = svd_thin(sentence.matrix)
    return result.U @ result.sigma**t


def fit_corpus(sentences: Sequence[SentenceMatrix], cfg: GemConfig) -> CorpusModel:
    """Principal directions of the coarse-embedding matrix of the corpus.

    Returns at most ``cfg.k`` directions; fewer when the coarse matrix has
    lower rank.
    """
    if not sentences:
        raise ValueError("cannot fit an empty corpus")
    coarse = np.column_stack([coarse_embedding(s, cfg.t) for s in sentences])
    directions, values = top_left_singular(coarse, cfg.k)
    return CorpusModel(directions=directions, values=values)


def rerank_select(
    sentence: SentenceMatrix, model: CorpusModel, cfg: GemConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Top-h corpus directions re-ranked by correlation with the sentence.

    The correlation of direction i is ``sigma_i * ||S.T @ d_i||`` in sigma
    mode or ``||S.T @ d_i||`` in plain mode. Ties keep the original model
    order. Returns the selected directions with their model singular
    values, in re-ranked order.
    """
    r = len(model)
    if r == 0:
        return model.directions, model.values
    correlation = np.linalg.norm(sentence.matrix.T @ model.directions, axis=0)
    scores = model.values * correlation if cfg.rerank_mode == "sigma" else correlation
    order = sorted(range(r), key=lambda i: (-scores[i], i))[: cfg.h]
    return model.directions[:, order], model.values[order]


def window_matrix(sentence: SentenceMatrix, index: int, m: int) -> np.ndarray:
    """Contextual window matrix of the word at ``index`` (0-based).

    Columns are the up-to-2m neighbors within the sentence, in sentence
    order, followed by the word's own vector as the last column. Windows
    at sentence boundaries truncate; there is no padding.
    """
    n = sentence.n
    if not 0 <= index < n:
        raise IndexError(f"word index {index} out of range for {n} tokens")
    lo = max(0, index - m)
    hi = min(n, index + m + 1)
    cols = [j for j in range(lo, hi) if j != index] + [index]
    return sentence.matrix[:, cols]


def word_scores(
    window: np.ndarray, directions: np.ndarray, values: np.ndarray, cfg: GemConfig
) -> WordScores:
    """Novelty, significance, and uniqueness of a window's last column.

    The denominators stay fixed at 2m+1 and h even for truncated windows
    or when fewer than h directions exist, keeping scores comparable
    across words. A word whose vector lies in the span of its context has
    zero novel direction, so the scores collapse to (1, 0, 1); a zero word
    vector gets novelty 1 by the exp(0) convention.
    """
    context = window[:, :-1]
    target = window[:, -1]
    q, r = residual_basis(context, target)
    r_last = float(r[-1])
    r_norm = float(np.linalg.norm(r))

    novelty = math.exp(r_last / r_norm) if r_norm > 0.0 else 1.0
    significance = r_last / (2 * cfg.m + 1)
    if directions.shape[1] > 0:
        aligned = values * (q @ directions)
        uniqueness = math.exp(-float(np.linalg.norm(aligned)) / cfg.h)
    else:
        uniqueness = 1.0
    return WordScores(novelty=novelty, significance=significance, uniqueness=uniqueness)


def sentence_embedding(sentence: SentenceMatrix, scores: Sequence[WordScores]) -> np.ndarray:
    """Weighted sum of the sentence's word vectors, in column order."""
    if len(scores) != sentence.n:
        raise ValueError(f"got {len(scores)} scores for {sentence.n} words")
    out = np.zeros(sentence.dim, dtype=np.float64)
    for j, word in enumerate(scores):
        out += word.weight * sentence.matrix[:, j]
    return out


def remove_principal(vector: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Remove the projection of ``vector`` onto each direction column."""
    if directions.shape[1] == 0:
        return vector.copy()
    return vector - directions @ (directions.T @ vector)


def build_sentence_matrices(
    texts: Sequence[str],
    store: WordVectorStore,
    tok_cfg: TokenizerConfig = TokenizerConfig(),
    policy: OovPolicy = OovPolicy.HASH_TO_VOCAB,
) -> tuple[list[SentenceMatrix | None], CorpusStats]:
    """Tokenize and resolve raw sentences against a vector store.

    A sentence that yields no resolvable token maps to None and is counted
    in ``empty_sentence_count``; the encoder turns those into zero vectors.
    """
    stats = CorpusStats(sentence_count=len(texts))
    matrices: list[SentenceMatrix | None] = []
    for text in texts:
        tokens = tokenize(text, tok_cfg)
        kept: list[str] = []
        columns: list[np.ndarray] = []
        for token in tokens:
            stats.token_count += 1
            if token not in store:
                stats.oov_count += 1
            vec = resolve(token, store, policy)
            if vec is None:
                continue
            kept.append(token)
            columns.append(vec)
        if not columns:
            stats.empty_sentence_count += 1
            matrices.append(None)
        else:
            matrices.append(SentenceMatrix(tuple(kept), np.column_stack(columns)))
    return matrices, stats


def _select_directions(
    sentence: SentenceMatrix, model: CorpusModel, cfg: GemConfig
) -> tuple[np.ndarray, np.ndarray]:
    if cfg.removal_mode == "sdr":
        return rerank_select(sentence, model, cfg)
    if cfg.removal_mode == "sir":
        keep = min(cfg.h, len(model))
        return model.directions[:, :keep], model.values[:keep]
    return model.directions[:, :0], model.values[:0]


def encode_prepared(
    matrices: Sequence[SentenceMatrix | None],
    dim: int,
    cfg: GemConfig,
    workers: int = 1,
    with_scores: bool = False,
) -> list[SentenceEmbedding]:
    """Encode already-resolved sentences.

    Phase one fits the corpus model on every non-empty sentence (skipped
    entirely in "none" mode, which uses no corpus directions); phase two
    maps over sentences, optionally across ``workers`` threads. Per-
    sentence arithmetic is self-contained, so the output is identical for
    any worker count.
    """
    valid = [m for m in matrices if m is not None]
    if not valid:
        raise ValueError("no sentence produced a resolvable token")
    if cfg.removal_mode == "none":
        model = CorpusModel.empty(dim)
    else:
        model = fit_corpus(valid, cfg)

    def encode_one(sentence: SentenceMatrix | None) -> SentenceEmbedding:
        if sentence is None:
            return SentenceEmbedding(np.zeros(dim), () if with_scores else None)
        directions, values = _select_directions(sentence, model, cfg)
        scores = [
            word_scores(window_matrix(sentence, i, cfg.m), directions, values, cfg)
            for i in range(sentence.n)
        ]
        vector = sentence_embedding(sentence, scores)
        if cfg.removal_mode != "none":
            vector = remove_principal(vector, directions)
        return SentenceEmbedding(vector, tuple(scores) if with_scores else None)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(encode_one, matrices))
    return [encode_one(m) for m in matrices]


def encode_corpus(
    texts: Sequence[str],
    store: WordVectorStore,
    tok_cfg: TokenizerConfig = TokenizerConfig(),
    policy: OovPolicy = OovPolicy.HASH_TO_VOCAB,
    cfg: GemConfig = GemConfig(),
    workers: int = 1,
    with_scores: bool = False,
) -> list[SentenceEmbedding]:
    """Full pipeline over raw sentences: tokenize, resolve, fit, encode."""
    if not texts:
        raise ValueError("cannot encode an empty corpus")
    matrices, _ = build_sentence_matrices(texts, store, tok_cfg, policy)
    return encode_prepared(matrices, store.dim, cfg, workers=workers, with_scores=with_scores)

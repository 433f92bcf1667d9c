"""High-level runs shared by the CLI and the HTTP service.

Each run loads (or receives) a vector store, encodes a corpus, and
produces a manifest echoing every effective setting plus counters and the
wall-clock encode time, so a run is reconstructible from manifest+inputs.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .evalharness import RankingQuery, SimilarityPair, map_eval, sts_eval
from .gemcore import (
    CorpusStats,
    GemConfig,
    SentenceEmbedding,
    build_sentence_matrices,
    encode_prepared,
)
from .textproc import TokenizerConfig
from .vecstore import OovPolicy, WordVectorStore, concat_stores, load_store

@dataclass
class RunManifest:
    """Echo of one run: configuration, inputs, counters, and timing."""

    command: str
    vectors: list[str]
    m: int
    k: int
    h: int
    t: int
    rerank_mode: str
    removal_mode: str
    oov: str
    lowercase: bool
    threads: int
    dim: int
    vocab_size: int
    sentence_count: int
    token_count: int
    oov_count: int
    empty_sentence_count: int
    duplicate_word_count: int
    encode_seconds: float
    input: str | None = None
    output: str | None = None
    extra_inputs: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class EncodeOutcome:
    embeddings: list[SentenceEmbedding]
    stats: CorpusStats
    seconds: float


def load_vectors(paths: Sequence[str], expected_dim: int | None = None) -> WordVectorStore:
    """Load one or more vector files; several files concatenate in order."""
    if not paths:
        raise ValueError("at least one vector file is required")
    stores = [load_store(path, expected_dim) for path in paths]
    return concat_stores(stores)


def encode_texts(
    store: WordVectorStore,
    texts: Sequence[str],
    cfg: GemConfig,
    tok_cfg: TokenizerConfig,
    policy: OovPolicy,
    threads: int = 1,
    with_scores: bool = False,
) -> EncodeOutcome:
    """Encode raw sentences, timing the encode (store loading excluded)."""
    if not texts:
        raise ValueError("cannot encode an empty corpus")
    start = time.perf_counter()
    matrices, stats = build_sentence_matrices(texts, store, tok_cfg, policy)
    embeddings = encode_prepared(
        matrices, store.dim, cfg, workers=threads, with_scores=with_scores
    )
    return EncodeOutcome(embeddings, stats, time.perf_counter() - start)


def build_manifest(
    command: str,
    vector_paths: Sequence[str],
    store: WordVectorStore,
    cfg: GemConfig,
    tok_cfg: TokenizerConfig,
    policy: OovPolicy,
    threads: int,
    outcome: EncodeOutcome,
    input_path: str | None = None,
    output_path: str | None = None,
    extra_inputs: dict[str, str] | None = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        vectors=list(vector_paths),
        m=cfg.m,
        k=cfg.k,
        h=cfg.h,
        t=cfg.t,
        rerank_mode=cfg.rerank_mode,
        removal_mode=cfg.removal_mode,
        oov=policy.value,
        lowercase=tok_cfg.lowercase,
        threads=threads,
        dim=store.dim,
        vocab_size=len(store),
        sentence_count=outcome.stats.sentence_count,
        token_count=outcome.stats.token_count,
        oov_count=outcome.stats.oov_count,
        empty_sentence_count=outcome.stats.empty_sentence_count,
        duplicate_word_count=store.duplicate_words,
        encode_seconds=outcome.seconds,
        input=input_path,
        output=output_path,
        extra_inputs=extra_inputs or {},
    )


def write_embeddings_tsv(embeddings: Sequence[SentenceEmbedding], dest) -> None:
    """Write embeddings as TSV rows: sentence index, then the components.

    Components use the shortest decimal representation that round-trips
    to the identical float64, so identical runs produce identical bytes.
    """
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            write_embeddings_tsv(embeddings, handle)
        return
    for i, emb in enumerate(embeddings):
        dest.write(str(i) + "\t" + "\t".join(repr(float(x)) for x in emb.vector) + "\n")


def run_sts_pairs(
    store: WordVectorStore,
    pairs: Sequence[SimilarityPair],
    cfg: GemConfig,
    tok_cfg: TokenizerConfig,
    policy: OovPolicy,
    threads: int = 1,
) -> tuple[float, EncodeOutcome]:
    """Pearson x 100 over a pair list; the corpus fit covers both sides."""
    texts = [p.sent_a for p in pairs] + [p.sent_b for p in pairs]
    outcome = encode_texts(store, texts, cfg, tok_cfg, policy, threads=threads)
    half = len(pairs)
    vectors = [e.vector for e in outcome.embeddings]
    score = sts_eval(pairs, vectors[:half], vectors[half:])
    return score, outcome


def run_ranking_queries(
    store: WordVectorStore,
    queries: Sequence[RankingQuery],
    cfg: GemConfig,
    tok_cfg: TokenizerConfig,
    policy: OovPolicy,
    threads: int = 1,
) -> tuple[float, EncodeOutcome]:
    """MAP over ranking queries; the corpus fit covers queries + candidates."""
    texts = [q.text for q in queries]
    for query in queries:
        texts.extend(c.text for c in query.candidates)
    outcome = encode_texts(store, texts, cfg, tok_cfg, policy, threads=threads)
    vectors = [e.vector for e in outcome.embeddings]

    query_embeddings = vectors[: len(queries)]
    candidate_embeddings: list[list[np.ndarray]] = []
    cursor = len(queries)
    for query in queries:
        candidate_embeddings.append(vectors[cursor : cursor + len(query.candidates)])
        cursor += len(query.candidates)
    score = map_eval(queries, query_embeddings, candidate_embeddings)
    return score, outcome


def run_weights(
    store: WordVectorStore,
    sentence: str,
    cfg: GemConfig,
    tok_cfg: TokenizerConfig,
    policy: OovPolicy,
    corpus: Sequence[str] | None = None,
) -> tuple[list[tuple[str, float, float, float, float]], EncodeOutcome]:
    """Per-word score table for one sentence, sorted by weight descending.

    The corpus for direction fitting defaults to just the sentence itself;
    pass ``corpus`` to fit on a larger sentence set (the sentence is
    prepended when missing).
    """
    texts = list(corpus) if corpus else []
    if sentence not in texts:
        texts.insert(0, sentence)
    else:
        texts.insert(0, texts.pop(texts.index(sentence)))
    outcome = encode_texts(store, texts, cfg, tok_cfg, policy, with_scores=True)

    matrices, _ = build_sentence_matrices([sentence], store, tok_cfg, policy)
    target = matrices[0]
    scores = outcome.embeddings[0].scores or ()
    tokens = target.tokens if target is not None else ()
    rows = [
        (token, s.novelty, s.significance, s.uniqueness, s.weight)
        for token, s in zip(tokens, scores)
    ]
    rows.sort(key=lambda row: -row[4])
    return rows, outcome

"""FastAPI service wrapping the embedding pipeline.

Vector stores load once per unique path list and stay cached in memory,
so many clients can encode against the same store without re-parsing the
(large) vector files. All pipeline state is immutable after load; request
handling is thread-safe.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time

from fastapi import FastAPI, HTTPException

from . import __version__
from .errors import GembedError
from .evalharness import RankingCandidate, RankingQuery, SimilarityPair
from .gemcore import build_sentence_matrices, encode_prepared
from .runner import (
    EncodeOutcome,
    build_manifest,
    load_vectors,
    run_ranking_queries,
    run_sts_pairs,
    run_weights,
)
from .schemas import (
    EncodeRequest,
    EncodeResponse,
    HealthResponse,
    LoadStoreRequest,
    RankRequest,
    RankResponse,
    StoreInfo,
    StoreSelector,
    StsRequest,
    StsResponse,
    TokenScores,
    WeightsRequest,
    WeightsResponse,
)
from .vecstore import WordVectorStore


class StoreCache:
    """Loaded stores keyed by their source paths (plus expected dim)."""

    def __init__(self):
        self._stores: dict[str, tuple[WordVectorStore, StoreInfo]] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key_for(paths: list[str], expected_dim: int | None) -> str:
        payload = json.dumps([paths, expected_dim])
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def load(self, paths: list[str], expected_dim: int | None) -> StoreInfo:
        store_id = self.key_for(paths, expected_dim)
        with self._lock:
            if store_id not in self._stores:
                store = load_vectors(paths, expected_dim)
                info = StoreInfo(
                    store_id=store_id,
                    dim=store.dim,
                    vocab_size=len(store),
                    duplicate_words=store.duplicate_words,
                )
                self._stores[store_id] = (store, info)
            return self._stores[store_id][1]

    def get(self, store_id: str) -> tuple[WordVectorStore, StoreInfo]:
        with self._lock:
            if store_id not in self._stores:
                raise KeyError(store_id)
            return self._stores[store_id]


def create_app() -> FastAPI:
    app = FastAPI(title="gembed", version=__version__)
    cache = StoreCache()

    def load_store_checked(paths: list[str], expected_dim: int | None) -> StoreInfo:
        try:
            return cache.load(paths, expected_dim)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=400, detail=f"vector file not found: {exc.filename}")
        except (GembedError, ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    def resolve_store(selector: StoreSelector) -> tuple[WordVectorStore, StoreInfo]:
        if selector.store_id is not None:
            try:
                return cache.get(selector.store_id)
            except KeyError:
                raise HTTPException(
                    status_code=404, detail=f"unknown store_id {selector.store_id!r}"
                )
        info = load_store_checked(selector.vectors or [], selector.expected_dim)
        return cache.get(info.store_id)

    def data_error(exc: Exception) -> HTTPException:
        return HTTPException(status_code=400, detail=str(exc))

    def vectors_label(selector: StoreSelector, info: StoreInfo) -> list[str]:
        return selector.vectors if selector.vectors else [f"store:{info.store_id}"]

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/stores", response_model=StoreInfo)
    def load_store_endpoint(request: LoadStoreRequest) -> StoreInfo:
        return load_store_checked(request.vectors, request.expected_dim)

    @app.post("/encode", response_model=EncodeResponse, response_model_exclude_none=True)
    def encode(request: EncodeRequest) -> EncodeResponse:
        store, info = resolve_store(request.store)
        cfg = request.gem.to_config()
        start = time.perf_counter()
        matrices, stats = build_sentence_matrices(
            request.sentences, store, request.text.tokenizer(), request.text.policy()
        )
        try:
            embeddings = encode_prepared(
                matrices,
                store.dim,
                cfg,
                workers=request.threads,
                with_scores=request.include_scores,
            )
        except (GembedError, ValueError) as exc:
            raise data_error(exc)
        outcome = EncodeOutcome(embeddings, stats, time.perf_counter() - start)
        manifest = build_manifest(
            "encode", vectors_label(request.store, info), store, cfg,
            request.text.tokenizer(), request.text.policy(), request.threads, outcome,
        )
        scores = None
        if request.include_scores:
            scores = []
            for matrix, emb in zip(matrices, embeddings):
                tokens = matrix.tokens if matrix is not None else ()
                scores.append(
                    [
                        TokenScores(
                            token=token,
                            novelty=s.novelty,
                            significance=s.significance,
                            uniqueness=s.uniqueness,
                            weight=s.weight,
                        )
                        for token, s in zip(tokens, emb.scores or ())
                    ]
                )
        return EncodeResponse(
            dim=store.dim,
            embeddings=[emb.vector.tolist() for emb in embeddings],
            scores=scores,
            manifest=manifest.to_dict(),
        )

    @app.post("/similarity", response_model=StsResponse)
    def similarity(request: StsRequest) -> StsResponse:
        store, info = resolve_store(request.store)
        cfg = request.gem.to_config()
        pairs = [SimilarityPair(p.gold, p.sent_a, p.sent_b) for p in request.pairs]
        try:
            score, outcome = run_sts_pairs(
                store, pairs, cfg, request.text.tokenizer(), request.text.policy(),
                threads=request.threads,
            )
        except (GembedError, ValueError) as exc:
            raise data_error(exc)
        manifest = build_manifest(
            "sts", vectors_label(request.store, info), store, cfg,
            request.text.tokenizer(), request.text.policy(), request.threads, outcome,
        )
        return StsResponse(pearson_x100=score, pair_count=len(pairs), manifest=manifest.to_dict())

    @app.post("/rank", response_model=RankResponse)
    def rank(request: RankRequest) -> RankResponse:
        store, info = resolve_store(request.store)
        cfg = request.gem.to_config()
        queries = [
            RankingQuery(
                q.query_id,
                q.text,
                tuple(RankingCandidate(c.text, c.label) for c in q.candidates),
            )
            for q in request.queries
        ]
        try:
            score, outcome = run_ranking_queries(
                store, queries, cfg, request.text.tokenizer(), request.text.policy(),
                threads=request.threads,
            )
        except (GembedError, ValueError) as exc:
            raise data_error(exc)
        manifest = build_manifest(
            "rank", vectors_label(request.store, info), store, cfg,
            request.text.tokenizer(), request.text.policy(), request.threads, outcome,
        )
        return RankResponse(
            mean_average_precision=score, query_count=len(queries), manifest=manifest.to_dict()
        )

    @app.post("/weights", response_model=WeightsResponse)
    def weights(request: WeightsRequest) -> WeightsResponse:
        store, info = resolve_store(request.store)
        cfg = request.gem.to_config()
        try:
            rows, outcome = run_weights(
                store, request.sentence, cfg, request.text.tokenizer(),
                request.text.policy(), corpus=request.corpus,
            )
        except (GembedError, ValueError) as exc:
            raise data_error(exc)
        if not rows:
            raise HTTPException(status_code=400, detail="sentence has no resolvable tokens")
        manifest = build_manifest(
            "weights", vectors_label(request.store, info), store, cfg,
            request.text.tokenizer(), request.text.policy(), 1, outcome,
        )
        return WeightsResponse(
            tokens=[
                TokenScores(token=token, novelty=n, significance=s, uniqueness=u, weight=w)
                for token, n, s, u, w in rows
            ],
            manifest=manifest.to_dict(),
        )

    return app

"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from .gemcore import GemConfig
from .textproc import TokenizerConfig
from .vecstore import OovPolicy


class GemParams(BaseModel):
    """Pipeline hyper-parameters; defaults mirror the similarity setup."""

    m: int = 7
    k: int = 45
    h: int = 17
    t: int = 3
    rerank: Literal["sigma", "plain"] = "sigma"
    removal: Literal["sdr", "sir", "none"] = "sdr"

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 1 <= self.h <= self.k:
            raise ValueError("h must satisfy 1 <= h <= k")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        return self

    def to_config(self) -> GemConfig:
        return GemConfig(
            m=self.m, k=self.k, h=self.h, t=self.t,
            rerank_mode=self.rerank, removal_mode=self.removal,
        )


class RankingGemParams(GemParams):
    """Ranking runs default to a narrower window and plain correlation."""

    m: int = 6
    h: int = 15
    rerank: Literal["sigma", "plain"] = "plain"


class StoreSelector(BaseModel):
    """Pick a loaded store by id, or name server-local vector files."""

    store_id: str | None = None
    vectors: list[str] | None = None
    expected_dim: int | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.store_id is None) == (self.vectors is None):
            raise ValueError("provide exactly one of store_id or vectors")
        if self.vectors is not None and not self.vectors:
            raise ValueError("vectors must not be empty")
        return self


class TextOptions(BaseModel):
    oov: Literal["hash", "zero", "skip"] = "hash"
    lowercase: bool = True

    def policy(self) -> OovPolicy:
        return OovPolicy(self.oov)

    def tokenizer(self) -> TokenizerConfig:
        return TokenizerConfig(lowercase=self.lowercase)


class LoadStoreRequest(BaseModel):
    vectors: list[str] = Field(min_length=1)
    expected_dim: int | None = None


class StoreInfo(BaseModel):
    store_id: str
    dim: int
    vocab_size: int
    duplicate_words: int


class TokenScores(BaseModel):
    token: str
    novelty: float
    significance: float
    uniqueness: float
    weight: float


class EncodeRequest(BaseModel):
    store: StoreSelector
    sentences: list[str] = Field(min_length=1)
    gem: GemParams = GemParams()
    text: TextOptions = TextOptions()
    threads: int = 1
    include_scores: bool = False


class EncodeResponse(BaseModel):
    dim: int
    embeddings: list[list[float]]
    scores: list[list[TokenScores]] | None = None
    manifest: dict


class SimilarityPairIn(BaseModel):
    gold: float
    sent_a: str
    sent_b: str


class StsRequest(BaseModel):
    store: StoreSelector
    pairs: list[SimilarityPairIn] = Field(min_length=2)
    gem: GemParams = GemParams()
    text: TextOptions = TextOptions()
    threads: int = 1


class StsResponse(BaseModel):
    pearson_x100: float
    pair_count: int
    manifest: dict


class RankingCandidateIn(BaseModel):
    text: str
    label: Literal["PerfectMatch", "Relevant", "Irrelevant"]


class RankingQueryIn(BaseModel):
    query_id: str
    text: str
    candidates: list[RankingCandidateIn] = Field(min_length=1)


class RankRequest(BaseModel):
    store: StoreSelector
    queries: list[RankingQueryIn] = Field(min_length=1)
    gem: RankingGemParams = RankingGemParams()
    text: TextOptions = TextOptions()
    threads: int = 1


class RankResponse(BaseModel):
    mean_average_precision: float
    query_count: int
    manifest: dict


class WeightsRequest(BaseModel):
    store: StoreSelector
    sentence: str
    corpus: list[str] | None = None
    gem: GemParams = GemParams()
    text: TextOptions = TextOptions()


class WeightsResponse(BaseModel):
    tokens: list[TokenScores]
    manifest: dict


class HealthResponse(BaseModel):
    status: str
    version: str

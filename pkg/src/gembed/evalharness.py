"""Evaluation harnesses: similarity files + Pearson, ranking files + MAP."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal, Sequence

import numpy as np

from .errors import ParseError
from .linalg import pearson

StsLayout = Literal["simple3", "stsb7"]

RELEVANT_LABELS = frozenset({"PerfectMatch", "Relevant"})
VALID_LABELS = frozenset({"PerfectMatch", "Relevant", "Irrelevant"})


@dataclass(frozen=True)
class SimilarityPair:
    gold: float
    sent_a: str
    sent_b: str


@dataclass(frozen=True)
class RankingCandidate:
    text: str
    label: str


@dataclass(frozen=True)
class RankingQuery:
    query_id: str
    text: str
    candidates: tuple[RankingCandidate, ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError(f"query {self.query_id!r} has no candidates")


def _rows(source) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from _rows(handle)
        return
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        source = io.StringIO(data)
    for row_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.strip():
            yield row_no, line


def parse_sts(source, layout: StsLayout = "simple3") -> list[SimilarityPair]:
    """Parse a similarity-pair TSV.

    "simple3" rows are ``score<TAB>sent_a<TAB>sent_b``. "stsb7" rows are
    the official STS benchmark layout with the gold score in column 5 and
    the sentences in columns 6-7 (trailing extra columns, present in some
    distributions, are ignored). One pair per non-empty row.
    """
    if layout not in ("simple3", "stsb7"):
        raise ValueError(f"unknown layout: {layout!r}")
    pairs: list[SimilarityPair] = []
    for row_no, line in _rows(source):
        fields = line.split("\t")
        if layout == "simple3":
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, found {len(fields)}", line=row_no)
            raw_score, sent_a, sent_b = fields
        else:
            if len(fields) < 7:
                raise ParseError(f"expected 7 tab-separated fields, found {len(fields)}", line=row_no)
            raw_score, sent_a, sent_b = fields[4], fields[5], fields[6]
        try:
            gold = float(raw_score)
        except ValueError:
            raise ParseError(f"unparseable score {raw_score!r}", line=row_no) from None
        if not np.isfinite(gold):
            raise ParseError(f"non-finite score {raw_score!r}", line=row_no)
        pairs.append(SimilarityPair(gold=gold, sent_a=sent_a, sent_b=sent_b))
    return pairs


def parse_ranking(queries_source, candidates_source) -> list[RankingQuery]:
    """Parse ranking inputs: a query file and a candidate file.

    The query file has ``query_id<TAB>text`` rows; the candidate file has
    ``query_id<TAB>label<TAB>text`` rows grouped by query id with labels
    in {PerfectMatch, Relevant, Irrelevant}. Queries keep the query-file
    order, candidates keep their file order within each query.
    """
    queries: list[tuple[str, str]] = []
    seen: set[str] = set()
    for row_no, line in _rows(queries_source):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 tab-separated fields, found {len(fields)}", line=row_no)
        if fields[0] in seen:
            raise ParseError(f"duplicate query id {fields[0]!r}", line=row_no)
        seen.add(fields[0])
        queries.append((fields[0], fields[1]))

    grouped: dict[str, list[RankingCandidate]] = {qid: [] for qid, _ in queries}
    for row_no, line in _rows(candidates_source):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, found {len(fields)}", line=row_no)
        qid, label, text = fields
        if qid not in grouped:
            raise ParseError(f"candidate references unknown query id {qid!r}", line=row_no)
        if label not in VALID_LABELS:
            raise ParseError(f"unknown relevance label {label!r}", line=row_no)
        grouped[qid].append(RankingCandidate(text=text, label=label))

    missing = [qid for qid, _ in queries if not grouped[qid]]
    if missing:
        raise ParseError(f"queries without candidates: {', '.join(missing)}")
    return [RankingQuery(qid, text, tuple(grouped[qid])) for qid, text in queries]


def cosine(u, v) -> float:
    """Cosine similarity, defined as 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    value = float(u @ v) / (nu * nv)
    return min(1.0, max(-1.0, value))


def sts_eval(
    pairs: Sequence[SimilarityPair],
    embeddings_a: Sequence[np.ndarray],
    embeddings_b: Sequence[np.ndarray],
) -> float:
    """100 x Pearson correlation between gold scores and cosine scores."""
    if not (len(pairs) == len(embeddings_a) == len(embeddings_b)):
        raise ValueError("pairs and embeddings are not aligned")
    gold = [pair.gold for pair in pairs]
    predicted = [cosine(a, b) for a, b in zip(embeddings_a, embeddings_b)]
    return 100.0 * pearson(gold, predicted)


def average_precision(relevant: Sequence[bool], scores: Sequence[float]) -> float:
    """AP of one ranked list; candidates sort by score descending, ties by input order."""
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    total_relevant = sum(relevant)
    if total_relevant == 0:
        return 0.0
    hits = 0
    precision_sum = 0.0
    for rank, j in enumerate(order, start=1):
        if relevant[j]:
            hits += 1
            precision_sum += hits / rank
    return precision_sum / total_relevant


def map_eval(
    queries: Sequence[RankingQuery],
    query_embeddings: Sequence[np.ndarray],
    candidate_embeddings: Sequence[Sequence[np.ndarray]],
) -> float:
    """Mean average precision over cosine-ranked candidate lists.

    PerfectMatch and Relevant both count as relevant; a query with no
    relevant candidate contributes an AP of 0.
    """
    if not (len(queries) == len(query_embeddings) == len(candidate_embeddings)):
        raise ValueError("queries and embeddings are not aligned")
    if not queries:
        raise ValueError("map_eval needs at least one query")
    total = 0.0
    for query, q_emb, c_embs in zip(queries, query_embeddings, candidate_embeddings):
        if len(c_embs) != len(query.candidates):
            raise ValueError(f"query {query.query_id!r}: candidate embeddings are not aligned")
        scores = [cosine(q_emb, c) for c in c_embs]
        relevant = [c.label in RELEVANT_LABELS for c in query.candidates]
        total += average_precision(relevant, scores)
    return total / len(queries)

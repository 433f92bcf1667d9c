"""Word-vector stores: text-format loading, concatenation, and OOV resolution.

Vector files use the common text layout `word c1 c2 ... cd`, one entry per
line, with an optional fastText-style `count dim` header. Stores are
immutable after loading and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import ParseError


class OovPolicy(str, Enum):
    """How to resolve a word that is missing from the vocabulary.

    HASH_TO_VOCAB maps the word onto an existing vocabulary entry through
    SHA-256, so distinct unknown words almost always land on distinct
    vectors and the mapping is a pure function of the word string.
    """

    HASH_TO_VOCAB = "hash"
    ZERO_VECTOR = "zero"
    SKIP_TOKEN = "skip"


@dataclass(frozen=True)
class WordVectorStore:
    """An immutable word -> vector table.

    `vocab` preserves the order of first appearance in the source file(s);
    `matrix` holds one row per vocabulary entry. `duplicate_words` counts
    entries that were dropped because an earlier line already defined them.
    """

    dim: int
    vocab: tuple[str, ...]
    matrix: np.ndarray
    index: dict[str, int]
    duplicate_words: int = 0

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        """Vector of an in-vocabulary word. Raises KeyError otherwise."""
        return self.matrix[self.index[word]]


def _freeze(vocab: list[str], rows: np.ndarray, duplicates: int) -> WordVectorStore:
    rows.flags.writeable = False
    index = {word: i for i, word in enumerate(vocab)}
    return WordVectorStore(
        dim=rows.shape[1],
        vocab=tuple(vocab),
        matrix=rows,
        index=index,
        duplicate_words=duplicates,
    )


def _open_lines(source) -> tuple[Iterator[str], str | None]:
    if isinstance(source, (str, Path)):
        handle = open(source, "r", encoding="utf-8")
        return iter(handle), str(source)
    if isinstance(source, (bytes, bytearray)):
        return iter(io.StringIO(source.decode("utf-8"))), None
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return iter(io.StringIO(data)), getattr(source, "name", None)
    raise TypeError(f"unsupported vector source: {type(source)!r}")


def _is_header(fields: list[str]) -> bool:
    # A fastText header is exactly two integer fields: `count dim`.
    if len(fields) != 2:
        return False
    try:
        int(fields[0])
        int(fields[1])
    except ValueError:
        return False
    return True


def load_store(source, expected_dim: int | None = None) -> WordVectorStore:
    """Parse a text vector file into a WordVectorStore.

    The dimension is taken from ``expected_dim`` when given, otherwise
    inferred from the first data line (every field after the first). Later
    lines are parsed from the right: the trailing ``dim`` fields are the
    components and everything before them is the word, so keys containing
    spaces (they exist in GloVe-840B) survive. Lines with too few numeric
    components, non-numeric or non-finite components fail fast with the
    line number. Duplicate words keep their first vector and are counted.
    """
    lines, path = _open_lines(source)
    if expected_dim is not None and expected_dim <= 0:
        raise ValueError(f"expected_dim must be positive, got {expected_dim}")

    dim = expected_dim
    vocab: list[str] = []
    index: dict[str, int] = {}
    rows: list[np.ndarray] = []
    duplicates = 0

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split()
        if not rows and line_no == 1 and _is_header(fields):
            continue

        if dim is None:
            if len(fields) < 2:
                raise ParseError("expected `word c1 ... cd`", path=path, line=line_no)
            dim = len(fields) - 1
            word, tail = fields[0], fields[1:]
        else:
            if len(fields) < dim + 1:
                raise ParseError(
                    f"expected {dim} components, found {len(fields) - 1}",
                    path=path,
                    line=line_no,
                )
            word = " ".join(fields[: len(fields) - dim])
            tail = fields[len(fields) - dim :]

        try:
            vec = np.array([float(c) for c in tail], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric vector component", path=path, line=line_no) from None
        if not np.all(np.isfinite(vec)):
            raise ParseError("non-finite vector component", path=path, line=line_no)

        if word in index:
            duplicates += 1
            continue
        index[word] = len(vocab)
        vocab.append(word)
        rows.append(vec)

    if not rows:
        raise ParseError("no vector data found", path=path)
    return _freeze(vocab, np.vstack(rows), duplicates)


def save_store(store: WordVectorStore, dest) -> None:
    """Write a store back to the text layout at full decimal precision.

    Components are written with the shortest representation that parses
    back to the identical float64, so save/load round-trips exactly.
    """
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as handle:
            save_store(store, handle)
        return
    for word, row in zip(store.vocab, store.matrix):
        dest.write(word + " " + " ".join(repr(float(c)) for c in row) + "\n")


def concat_stores(stores: Sequence[WordVectorStore]) -> WordVectorStore:
    """Concatenate several stores along the vector dimension.

    The result's vocabulary is the union in first-appearance order across
    stores (in list order); a word missing from one store gets an all-zero
    segment for that store, preserving the coverage of every source.
    """
    if not stores:
        raise ValueError("concat_stores requires at least one store")
    if len(stores) == 1:
        return stores[0]

    vocab: list[str] = []
    index: dict[str, int] = {}
    for store in stores:
        for word in store.vocab:
            if word not in index:
                index[word] = len(vocab)
                vocab.append(word)

    total_dim = sum(store.dim for store in stores)
    rows = np.zeros((len(vocab), total_dim), dtype=np.float64)
    offset = 0
    for store in stores:
        target = np.fromiter(
            (index[word] for word in store.vocab), dtype=np.intp, count=len(store.vocab)
        )
        rows[target, offset : offset + store.dim] = store.matrix
        offset += store.dim

    duplicates = sum(store.duplicate_words for store in stores)
    return _freeze(vocab, rows, duplicates)


def oov_index(word: str, vocab_size: int) -> int:
    """Deterministic vocabulary slot for an unknown word.

    The first 8 bytes of SHA-256(UTF-8 word), read big-endian, modulo the
    vocabulary size.
    """
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % vocab_size


def resolve(word: str, store: WordVectorStore, policy: OovPolicy) -> np.ndarray | None:
    """Vector for ``word`` under the given OOV policy.

    In-vocabulary words always get their own vector. Unknown words are
    hashed onto the vocabulary, replaced by a zero vector, or skipped
    (returns None) depending on the policy.
    """
    row = store.index.get(word)
    if row is not None:
        return store.matrix[row]
    if policy is OovPolicy.HASH_TO_VOCAB:
        return store.matrix[oov_index(word, len(store.vocab))]
    if policy is OovPolicy.ZERO_VECTOR:
        return np.zeros(store.dim, dtype=np.float64)
    return None

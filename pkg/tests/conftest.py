"""Shared fixtures: small hand-built vector stores and corpora."""

from __future__ import annotations

import io

import numpy as np
import pytest

from gembed import WordVectorStore, load_store


def store_from_dict(vectors: dict[str, list[float]]) -> WordVectorStore:
    """Build a store through the normal text-loading path."""
    text = "\n".join(
        word + " " + " ".join(repr(float(x)) for x in vec) for word, vec in vectors.items()
    )
    return load_store(io.BytesIO(text.encode("utf-8")))


# Hand-chosen 6-dim vectors: varied magnitudes, a well-separated corpus
# spectrum, and one all-zero vector to exercise the degenerate conventions.
TOY_VECTORS = {
    "a": [2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    "b": [0.0, 3.0, 0.0, 0.0, 0.0, 0.0],
    "c": [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
    "d": [0.0, 0.0, 2.0, 2.0, 0.0, 0.0],
    "e": [1.0, 0.0, 0.0, 0.0, 3.0, 0.0],
    "f": [0.0, 1.0, 0.0, 0.0, 0.0, 2.0],
    "g": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
    "i": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    "j": [0.0, 0.0, 0.0, 1.0, 0.0, 1.0],
    "z": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
}

# Five sentences covering long windows, repeated words, and the zero vector.
TOY_TOKENS = [
    ["a", "b", "c", "d", "e"],
    ["c", "d", "f"],
    ["b", "g", "i", "j", "a", "f"],
    ["e", "e", "e"],
    ["a", "z", "c"],
]
TOY_SENTENCES = [" ".join(tokens) for tokens in TOY_TOKENS]


@pytest.fixture(scope="session")
def toy_store() -> WordVectorStore:
    return store_from_dict(TOY_VECTORS)


@pytest.fixture(scope="session")
def toy_vectors() -> dict[str, np.ndarray]:
    return {w: np.asarray(v, dtype=np.float64) for w, v in TOY_VECTORS.items()}


def random_store(rng: np.random.Generator, n_words: int, dim: int) -> WordVectorStore:
    vectors = {
        f"w{i}": (rng.normal(size=dim) * rng.uniform(0.5, 2.0)).tolist()
        for i in range(n_words)
    }
    return store_from_dict(vectors)
